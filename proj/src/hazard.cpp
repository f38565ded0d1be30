#include "ruinopt/hazard.hpp"

#include "ruinopt/text_format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ruinopt {

namespace {
constexpr double kSumTol = 1e-15;
}

AgeTable load_age_table(std::istream& in, const std::string& source_name) {
    AgeTable t;
    std::string line;
    int row = 0;
    int prev_age = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        std::istringstream ls(line);
        int age;
        double male_p, female_p;
        if (!(ls >> age >> male_p >> female_p))
            throw std::runtime_error(source_name + ": malformed row " + std::to_string(row) +
                                     ": '" + line + "'");
        if (first) {
            t.start_age = age;
            first = false;
        } else if (age != prev_age + 1) {
            throw std::runtime_error(source_name + ": non-contiguous age " + std::to_string(age) +
                                     " at row " + std::to_string(row));
        }
        if (male_p < 0.0 || female_p < 0.0)
            throw std::runtime_error(source_name + ": negative probability at age " +
                                     std::to_string(age));
        t.male_pmf.push_back(male_p);
        t.female_pmf.push_back(female_p);
        if (male_p > 0.0) t.max_male_age = age;
        if (female_p > 0.0) t.max_female_age = age;
        prev_age = age;
    }
    if (t.male_pmf.empty())
        throw std::runtime_error(source_name + ": no rows");

    double male_sum = 0.0, female_sum = 0.0;
    for (double p : t.male_pmf) male_sum += p;
    for (double p : t.female_pmf) female_sum += p;
    if (std::min(male_sum, female_sum) < 1.0 - kSumTol ||
        std::max(male_sum, female_sum) > 1.0 + kSumTol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << source_name << ": column sums differ from 1 (male " << male_sum
            << ", female " << female_sum << ")";
        throw std::runtime_error(msg.str());
    }
    return t;
}

AgeTable load_age_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open age table: " + path);
    return load_age_table(in, path);
}

HazardSchedule derive_hazards(const AgeTable& table, const MpuSpec& mpu) {
    if (mpu.members.empty())
        throw std::invalid_argument("derive_hazards: MPU must have at least one member");

    int min_male = 999, min_female = 999;
    for (const auto& m : mpu.members) {
        const int max_age = m.gender == Gender::Male ? table.max_male_age : table.max_female_age;
        if (m.age < table.start_age || m.age > max_age)
            throw std::invalid_argument("derive_hazards: member age " + std::to_string(m.age) +
                                        " outside the table range [" +
                                        std::to_string(table.start_age) + ", " +
                                        std::to_string(max_age) + "]");
        if (m.gender == Gender::Male)
            min_male = std::min(min_male, m.age);
        else
            min_female = std::min(min_female, m.age);
    }

    // Horizon: S_Max + 1 entries. A member's last possible death year is
    // (gender max age - member age) after retirement start.
    const int male_span = min_male == 999 ? 0 : table.max_male_age - min_male + 1;
    const int female_span = min_female == 999 ? 0 : table.max_female_age - min_female + 1;
    const int rem_years = std::max(male_span, female_span);

    std::vector<double> td_cdf(static_cast<size_t>(rem_years), 1.0);
    for (const auto& m : mpu.members) {
        const auto& probs = m.gender == Gender::Male ? table.male_pmf : table.female_pmf;
        const int max_age = m.gender == Gender::Male ? table.max_male_age : table.max_female_age;

        // Renormalization mass over ages >= current age, summed high-to-low
        // as the original derivation does.
        double mass = 0.0;
        for (int j = static_cast<int>(probs.size()) - 1; j >= m.age - table.start_age; --j)
            mass += probs[static_cast<size_t>(j)];

        std::vector<double> pmf(static_cast<size_t>(rem_years), 0.0);
        for (int j = 0; j < max_age - (m.age - 1); ++j)
            pmf[static_cast<size_t>(j)] = probs[static_cast<size_t>(m.age - table.start_age + j)] / mass;

        double check = 0.0;
        for (double p : pmf) check += p;
        if (check < 1.0 - kSumTol || check > 1.0 + kSumTol)
            throw std::runtime_error("derive_hazards: renormalized member PMF does not sum to 1");

        double run = 0.0;
        for (int j = 0; j < rem_years; ++j) {
            run += pmf[static_cast<size_t>(j)];
            td_cdf[static_cast<size_t>(j)] *= run;
        }
    }

    HazardSchedule sched;
    sched.hazards.resize(static_cast<size_t>(rem_years));
    sched.hazards[0] = td_cdf[0];
    for (int j = 1; j < rem_years; ++j)
        sched.hazards[static_cast<size_t>(j)] =
            std::min((td_cdf[static_cast<size_t>(j)] - td_cdf[static_cast<size_t>(j - 1)]) /
                         (1.0 - td_cdf[static_cast<size_t>(j - 1)]),
                     1.0);
    return sched;
}

HazardSchedule fixed_horizon_schedule(int t_d) {
    if (t_d < 1) throw std::invalid_argument("fixed_horizon_schedule: t_d must be >= 1");
    HazardSchedule sched;
    sched.hazards.assign(static_cast<size_t>(t_d) + 1, 0.0);
    sched.hazards.back() = 1.0;
    return sched;
}

void write_hazards(std::ostream& out, const HazardSchedule& schedule) {
    for (size_t t = 0; t < schedule.hazards.size(); ++t)
        out << fixed50(schedule.hazards[t]) << " (t=" << t << ")\n";
}

HazardSchedule read_hazards(std::istream& in, const std::string& source_name) {
    HazardSchedule sched;
    double h;
    std::string tag;
    while (in >> h >> tag) sched.hazards.push_back(h);
    if (sched.hazards.empty())
        throw std::runtime_error(source_name + ": no hazard entries");
    return sched;
}

} // namespace ruinopt
