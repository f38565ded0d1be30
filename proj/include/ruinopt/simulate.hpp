#ifndef RUINOPT_SIMULATE_HPP
#define RUINOPT_SIMULATE_HPP

#include "ruinopt/hazard.hpp"
#include "ruinopt/result_files.hpp"
#include "ruinopt/return_model.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace ruinopt {

/// Counter-based generator (Philox 2x64, 10 rounds). Streams are keyed by
/// (seed, path index), so any partition of paths across workers draws the
/// same numbers for the same path.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path);

    std::uint64_t next_u64();
    /// Uniform on (0, 1), strictly inside.
    double next_uniform();
    /// Standard normal via the quantile transform.
    double next_normal();

private:
    std::uint64_t key_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2];
    int avail_ = 0;
};

/// Decumulation strategy followed along a path.
struct FixedAlpha {
    double alpha;
};
struct GlidePath {
    std::vector<double> alpha; // one entry per decision stage
};
struct PolicyStrategy {
    AlphaTable table; // solved grid; overflow region falls back to alpha = 1
};
using Strategy = std::variant<FixedAlpha, GlidePath, PolicyStrategy>;

struct SimConfig {
    long n_paths = 0;
    std::uint64_t master_seed = 0;
    Strategy strategy = FixedAlpha{0.5};
    double w_r = 0.04;
    HazardSchedule horizon;
    int workers = 0; // 0: hardware concurrency
};

struct SimResult {
    double ruin_estimate = 0.0;
    double std_error = 0.0;
    long ruined = 0;
    long paths = 0;
    std::vector<long> ruined_at; // index t = 1..S_Max; [0] unused
};

/// Monte Carlo estimate of the ruin probability under the configured
/// strategy. Each path draws its death year from the hazard schedule,
/// then steps the ruin-factor recursion with correlated bivariate-normal
/// real returns scaled by (1 - E_R). Results are identical for any worker
/// count.
SimResult simulate(const SimConfig& cfg, const ReturnModel& model);

struct GeometricMeanResult {
    double stock_gm = 0.0;
    double bond_gm = 0.0;
    long discarded_stock = 0; // non-positive gross draws plus matched high tail
    long discarded_bond = 0;
};

/// Average per-replication geometric mean of simulated gross real
/// returns, minus 1. Replications containing a non-positive gross return
/// are dropped together with an equal count from the top tail so the two
/// trims balance.
GeometricMeanResult geometric_mean_check(const ReturnModel& model, int years, long n_reps,
                                         std::uint64_t seed);

} // namespace ruinopt

#endif
