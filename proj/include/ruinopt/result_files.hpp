#ifndef RUINOPT_RESULT_FILES_HPP
#define RUINOPT_RESULT_FILES_HPP

#include "ruinopt/dp_solver.hpp"

#include <iosfwd>
#include <string>

namespace ruinopt {

/// FinalResults_V.txt: one line per (stage, bucket), stages ascending —
/// "t rf(10dp) v(50dp) alpha(10dp)", space-delimited.
void write_results_v(std::ostream& out, const PolicyGrid& grid);

/// FinalProbResults_H.csv / FinalAlphaResults_H.csv: header
/// "RF, Time (t=0), Time (t=1), ..." then one row per bucket midpoint.
void write_prob_csv(std::ostream& out, const PolicyGrid& grid);
void write_alpha_csv(std::ostream& out, const PolicyGrid& grid);

/// Rebuilds a PolicyGrid from a FinalResults_V.txt stream. The
/// discretization is recovered from the row spacing; `prune_power` and
/// the per-stage overflow values are not stored in the file, so the
/// caller supplies the hazard schedule when overflow values matter.
PolicyGrid read_results_v(std::istream& in, const std::string& source_name = "results file");

/// Stage-by-bucket allocation table parsed from FinalAlphaResults_H.csv;
/// enough to drive the policy-following simulator.
struct AlphaTable {
    int p_r = 0;
    int stages = 0;
    std::vector<double> alpha; // stages x buckets, stage-major

    long buckets() const { return static_cast<long>(alpha.size()) / stages; }
    double at(int t, long bucket) const {
        return alpha[static_cast<size_t>(t) * static_cast<size_t>(buckets()) +
                     static_cast<size_t>(bucket - 1)];
    }
};

AlphaTable read_alpha_csv(std::istream& in, const std::string& source_name = "alpha csv");
AlphaTable alpha_table_from_grid(const PolicyGrid& grid);

} // namespace ruinopt

#endif
