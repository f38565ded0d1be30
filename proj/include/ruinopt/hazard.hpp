#ifndef RUINOPT_HAZARD_HPP
#define RUINOPT_HAZARD_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ruinopt {

/// Death-age probabilities for each gender, indexed from `start_age`.
/// Each column sums to 1: entry [a - start_age] is the probability that a
/// person of `start_age` dies at age a.
struct AgeTable {
    int start_age = 0;
    std::vector<double> male_pmf;
    std::vector<double> female_pmf;
    int max_male_age = 0;   // last age with a positive male probability
    int max_female_age = 0; // last age with a positive female probability
};

/// Parses the space-delimited "age male_prob female_prob" rows. Rows must
/// be contiguous in age; each column must sum to 1 within 1e-15 and hold
/// no negative entries. Errors identify the offending row.
AgeTable load_age_table(std::istream& in, const std::string& source_name = "age table");
AgeTable load_age_table_file(const std::string& path);

enum class Gender { Male, Female };

struct MpuMember {
    Gender gender = Gender::Male;
    int age = 0;

    bool operator==(const MpuMember&) const = default;
};

/// A multi-person unit pooling funds; its T_D is the maximum of members'
/// remaining lifetimes.
struct MpuSpec {
    std::vector<MpuMember> members;

    bool operator==(const MpuSpec&) const = default;
};

/// Discrete-time hazard probabilities h(t) = P(T_D = t | T_D >= t) for
/// t = 0..S_Max. Decisions are made at t = 0..S_Max-1 only.
struct HazardSchedule {
    std::vector<double> hazards;

    int s_max() const { return static_cast<int>(hazards.size()) - 1; }
    int decision_stages() const { return s_max(); }
    double survival(int t) const { return 1.0 - hazards[static_cast<size_t>(t)]; }
};

/// Builds the MPU hazard schedule from the age table:
/// each member's remaining-lifetime PMF is the table column from their
/// current age renormalized and re-indexed to t = 0; F_TD is the product
/// of the member CDFs; h(t) = f_TD(t) / (1 - F_TD(t-1)) clamped at 1.
HazardSchedule derive_hazards(const AgeTable& table, const MpuSpec& mpu);

/// Degenerate schedule for a fixed horizon: h(t) = 0 for t < t_d, h(t_d) = 1.
HazardSchedule fixed_horizon_schedule(int t_d);

/// hrates.txt emission: one line per t, the hazard at 50 decimal places,
/// a space, then "(t=N)".
void write_hazards(std::ostream& out, const HazardSchedule& schedule);
HazardSchedule read_hazards(std::istream& in, const std::string& source_name = "hazard file");

} // namespace ruinopt

#endif
