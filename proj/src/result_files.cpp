#include "ruinopt/result_files.hpp"

#include "ruinopt/text_format.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ruinopt {

void write_results_v(std::ostream& out, const PolicyGrid& grid) {
    const long nb = grid.buckets();
    for (int t = 0; t < grid.stages; ++t) {
        for (long b = 1; b <= nb; ++b) {
            out << t << ' ' << fixed10(static_cast<double>(b) / grid.disc.p_r) << ' '
                << fixed50(grid.value_at(t, b)) << ' ' << fixed10(grid.alpha_at(t, b)) << '\n';
        }
    }
}

namespace {

void write_csv(std::ostream& out, const PolicyGrid& grid, bool probs) {
    const long nb = grid.buckets();
    out << "RF";
    for (int t = 0; t < grid.stages; ++t) out << ", Time (t=" << t << ")";
    out << '\n';
    for (long b = 1; b <= nb; ++b) {
        out << fixed10(static_cast<double>(b) / grid.disc.p_r);
        for (int t = 0; t < grid.stages; ++t) {
            out << ',';
            if (probs)
                out << fixed50(grid.value_at(t, b));
            else
                out << fixed10(grid.alpha_at(t, b));
        }
        out << '\n';
    }
}

} // namespace

void write_prob_csv(std::ostream& out, const PolicyGrid& grid) { write_csv(out, grid, true); }
void write_alpha_csv(std::ostream& out, const PolicyGrid& grid) { write_csv(out, grid, false); }

PolicyGrid read_results_v(std::istream& in, const std::string& source_name) {
    struct Row {
        int t;
        double rf, v, a;
    };
    std::vector<Row> rows;
    int t;
    double rf, v, a;
    int max_t = -1;
    while (in >> t >> rf >> v >> a) {
        rows.push_back({t, rf, v, a});
        max_t = std::max(max_t, t);
    }
    if (rows.empty()) throw std::runtime_error(source_name + ": no rows");

    const int stages = max_t + 1;
    if (rows.size() % static_cast<size_t>(stages) != 0)
        throw std::runtime_error(source_name + ": ragged stage blocks");
    const long nb = static_cast<long>(rows.size()) / stages;
    // Midpoints are i/p_r; the first row of stage 0 sits at 1/p_r.
    const int p_r = static_cast<int>(std::lround(1.0 / rows.front().rf));

    PolicyGrid grid;
    grid.disc.p_r = p_r;
    grid.disc.p_alpha = 1;
    grid.disc.rf_max = static_cast<double>(nb) / p_r;
    grid.stages = stages;
    grid.v.resize(rows.size());
    grid.alpha.resize(rows.size());
    grid.overflow.assign(static_cast<size_t>(stages), 1.0);
    for (const Row& r : rows) {
        const long b = static_cast<long>(r.rf * p_r + 0.5);
        if (r.t < 0 || r.t >= stages || b < 1 || b > nb)
            throw std::runtime_error(source_name + ": row out of range");
        const size_t idx =
            static_cast<size_t>(r.t) * static_cast<size_t>(nb) + static_cast<size_t>(b - 1);
        grid.v[idx] = r.v;
        grid.alpha[idx] = r.a;
    }
    return grid;
}

AlphaTable read_alpha_csv(std::istream& in, const std::string& source_name) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("RF", 0) != 0)
        throw std::runtime_error(source_name + ": missing 'RF, Time (t=0), ...' header");
    int stages = 0;
    for (size_t pos = header.find(','); pos != std::string::npos; pos = header.find(',', pos + 1))
        ++stages;
    if (stages < 1) throw std::runtime_error(source_name + ": header has no time columns");

    AlphaTable table;
    table.stages = stages;
    std::string line;
    double first_rf = 0.0;
    long rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        if (!std::getline(ls, cell, ',')) break;
        const double rf = std::stod(cell);
        if (rows == 0) first_rf = rf;
        int got = 0;
        while (std::getline(ls, cell, ',')) {
            table.alpha.push_back(std::stod(cell));
            ++got;
        }
        if (got != stages)
            throw std::runtime_error(source_name + ": row " + std::to_string(rows + 1) + " has " +
                                     std::to_string(got) + " columns, expected " +
                                     std::to_string(stages));
        ++rows;
    }
    if (rows == 0) throw std::runtime_error(source_name + ": no data rows");
    table.p_r = static_cast<int>(std::lround(1.0 / first_rf));

    // Stored row-major by bucket; transpose to stage-major.
    std::vector<double> by_stage(table.alpha.size());
    for (long b = 0; b < rows; ++b)
        for (int t = 0; t < stages; ++t)
            by_stage[static_cast<size_t>(t) * static_cast<size_t>(rows) + static_cast<size_t>(b)] =
                table.alpha[static_cast<size_t>(b) * static_cast<size_t>(stages) +
                            static_cast<size_t>(t)];
    table.alpha = std::move(by_stage);
    return table;
}

AlphaTable alpha_table_from_grid(const PolicyGrid& grid) {
    AlphaTable t;
    t.p_r = grid.disc.p_r;
    t.stages = grid.stages;
    t.alpha = grid.alpha;
    return t;
}

} // namespace ruinopt
