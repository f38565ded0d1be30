#include "ruinopt/control_file.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ruinopt {

namespace {

[[noreturn]] void fail(const std::string& source, int line, int field, const std::string& what) {
    throw std::runtime_error(source + ": line " + std::to_string(line) + ", field " +
                             std::to_string(field) + ": " + what);
}

double want_number(std::istringstream& ls, const std::string& source, int line, int* field) {
    std::string tok;
    if (!(ls >> tok)) fail(source, line, *field, "missing value");
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        ++*field;
        return v;
    } catch (const std::exception&) {
        fail(source, line, *field, "non-numeric token '" + tok + "'");
    }
}

int want_int(std::istringstream& ls, const std::string& source, int line, int* field) {
    const double v = want_number(ls, source, line, field);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail(source, line, *field - 1, "expected an integer");
    return i;
}

std::string next_line(std::istream& in, const std::string& source, int line) {
    std::string s;
    if (!std::getline(in, s)) fail(source, line, 1, "missing line");
    return s;
}

} // namespace

ControlConfig parse_control(std::istream& in, const std::string& source_name) {
    ControlConfig cfg;
    int field = 1;

    std::istringstream l1(next_line(in, source_name, 1));
    cfg.model.stock_mean = want_number(l1, source_name, 1, &field);
    cfg.model.stock_var = want_number(l1, source_name, 1, &field);
    cfg.model.bond_mean = want_number(l1, source_name, 1, &field);
    cfg.model.bond_var = want_number(l1, source_name, 1, &field);
    cfg.model.stock_bond_cov = want_number(l1, source_name, 1, &field);
    cfg.disc.rf_max = want_number(l1, source_name, 1, &field);
    cfg.model.expense_ratio = want_number(l1, source_name, 1, &field);
    cfg.disc.prune_power = want_number(l1, source_name, 1, &field);

    field = 1;
    std::istringstream l2(next_line(in, source_name, 2));
    cfg.disc.p_r = want_int(l2, source_name, 2, &field);
    cfg.disc.p_alpha = want_int(l2, source_name, 2, &field);

    field = 1;
    std::istringstream l3(next_line(in, source_name, 3));
    const int num_random = want_int(l3, source_name, 3, &field);
    if (num_random < 0) fail(source_name, 3, 1, "negative person count");
    if (num_random == 0) {
        cfg.random_horizon = false;
        cfg.fixed_years = want_int(l3, source_name, 3, &field);
        if (cfg.fixed_years < 1) fail(source_name, 3, 2, "fixed horizon must be >= 1 year");
    } else {
        cfg.random_horizon = true;
        for (int i = 0; i < num_random; ++i) {
            std::string gender;
            if (!(l3 >> gender)) fail(source_name, 3, field, "missing gender for person " +
                                                                 std::to_string(i + 1));
            ++field;
            MpuMember m;
            const char g = static_cast<char>(std::toupper(static_cast<unsigned char>(gender[0])));
            if (gender.size() != 1 || (g != 'M' && g != 'F'))
                fail(source_name, 3, field - 1, "invalid gender '" + gender + "'");
            m.gender = g == 'M' ? Gender::Male : Gender::Female;
            m.age = want_int(l3, source_name, 3, &field);
            cfg.mpu.members.push_back(m);
        }
    }
    std::string extra;
    if (l3 >> extra) fail(source_name, 3, field, "unexpected trailing token '" + extra + "'");

    cfg.model.validate();
    cfg.disc.validate();
    return cfg;
}

ControlConfig parse_control_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open control file: " + path);
    return parse_control(in, path);
}

std::string emit_control(const ControlConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << cfg.model.stock_mean << ' ' << cfg.model.stock_var << ' ' << cfg.model.bond_mean << ' '
        << cfg.model.bond_var << ' ' << cfg.model.stock_bond_cov << ' ' << cfg.disc.rf_max << ' '
        << cfg.model.expense_ratio << ' ' << cfg.disc.prune_power << '\n';
    out << cfg.disc.p_r << ' ' << cfg.disc.p_alpha << '\n';
    if (!cfg.random_horizon) {
        out << 0 << ' ' << cfg.fixed_years << '\n';
    } else {
        out << cfg.mpu.members.size();
        for (const auto& m : cfg.mpu.members)
            out << ' ' << (m.gender == Gender::Male ? 'M' : 'F') << ' ' << m.age;
        out << '\n';
    }
    return out.str();
}

} // namespace ruinopt
