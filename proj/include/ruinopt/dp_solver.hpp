#ifndef RUINOPT_DP_SOLVER_HPP
#define RUINOPT_DP_SOLVER_HPP

#include "ruinopt/hazard.hpp"
#include "ruinopt/return_model.hpp"
#include "ruinopt/ruin.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ruinopt {

/// Value function slice for one stage: v[i-1] is the minimum ruin
/// probability at bucket i, `overflow` the value of the region above
/// RF_Max + 1/(2 P_R). The boundary stage (t = S_Max) is all zeros.
struct StageVector {
    int t = 0;
    std::vector<double> v;
    double overflow = 0.0;
};

/// Run-length compression of a monotone stage vector: `endpoints[k]` is
/// the last bucket of the k-th run of equal values, `value[k]` that run's
/// value and `boundary_factor[k]` the precomputed return-space image
/// 1 + P_R/(endpoint + 0.5) of the run's upper ruin-factor edge.
/// Scanning stops once values reach the stage maximum (the overflow
/// value); everything above is folded into the overflow term.
struct StageRuns {
    std::vector<long> endpoints;
    std::vector<double> value;
    std::vector<double> boundary_factor;
    double overflow = 0.0;
};

/// Validates the stage (values in range, nondecreasing within the usual
/// floating-point slack) and builds the run representation. Throws
/// std::runtime_error on a violated invariant.
StageRuns compress_stage(const StageVector& next, const Discretization& d);

/// Conditional PMF of the next ruin-factor bucket given no ruin
/// (r_hat > rf): entries for buckets 1..bucket_count plus the overflow
/// bucket. Throws std::domain_error when ruin is certain (F(rf) == 1).
std::vector<double> transition_pmf(double rf, const NormalParams& dist,
                                   const Discretization& d);

/// One Bellman evaluation:
///   survival * (1 - (1 - F(rf)) * (1 - sum_j pmf(j) v_next(j)))
/// computed against the compressed representation of `next`. When
/// F(rf) == 1 the expectation term is next's overflow value.
double stage_value(double rf, const NormalParams& dist, const StageVector& next,
                   double survival, const Discretization& d);

/// Full solved policy, decision stages 0..S_Max-1.
struct PolicyGrid {
    Discretization disc;
    int stages = 0;
    std::vector<double> v;        // stages x bucket_count, stage-major
    std::vector<double> alpha;    // same layout
    std::vector<double> overflow; // per stage, equals 1 - h(t)

    long buckets() const { return disc.bucket_count(); }
    double value_at(int t, long bucket) const {
        return v[static_cast<size_t>(t) * static_cast<size_t>(buckets()) +
                 static_cast<size_t>(bucket - 1)];
    }
    double alpha_at(int t, long bucket) const {
        return alpha[static_cast<size_t>(t) * static_cast<size_t>(buckets()) +
                     static_cast<size_t>(bucket - 1)];
    }
};

/// Per-stage progress record handed to SolveOptions::on_stage.
struct StageLog {
    int t = 0;
    size_t unique_runs = 0;
    long prune_bucket = 0; // buckets above this were searched at alpha = 1 only
    double prune_threshold = 0.0;
    double seconds = 0.0;
};

struct SolveOptions {
    int workers = 0;                        // 0: hardware concurrency
    std::optional<double> single_alpha;     // restrict the grid to one value
    std::function<void(const StageLog&)> on_stage;
};

/// Backward induction over t = S_Max-1 .. 0. Output is independent of the
/// worker count.
PolicyGrid solve(const ReturnModel& model, const HazardSchedule& hazards,
                 const Discretization& d, const SolveOptions& options = {});

} // namespace ruinopt

#endif
