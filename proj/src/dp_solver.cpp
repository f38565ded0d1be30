#include "ruinopt/dp_solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ruinopt {

namespace {

// Floating-point allowances carried over from the original validator:
// stage values may exceed the stage maximum by two ulp-scale units and
// backslide by one, purely from rounding of the two algebraic forms.
const double kUpperSlack = 2.0 * std::pow(0.1, 16);
const double kMonotoneSlack = std::pow(0.1, 15);
const double kPruneTol = std::pow(0.1, 16) + std::pow(0.1, 17);

struct AlphaPoint {
    double alpha;
    double mean;
    double std;
};

struct CellEval {
    double cdf;
    double eprob;
};

// Expectation of the next-stage value over the bucket-transition PMF,
// evaluated by telescoping over the runs. Two exact shortcuts keep the
// loop short: runs whose return-space image lies at or above
// mean + 8.5*std carry CDF values that round to 1 and contribute zero
// mass, and once the remaining tail can no longer move the sum by more
// than `delta * (1 - F(rf))` it is folded into the overflow term (with
// delta == 0 this fires only when the fold is exact to the validator
// slack). The fold can only overstate the expectation, so screening
// callers get a one-sided bound.
CellEval eval_cell(double rf, double mean, double sd, const StageRuns& runs,
                   double delta) {
    const NormalParams nd{mean, sd};
    CellEval r;
    r.cdf = normal_cdf(nd, rf);
    if (r.cdf == 1.0) {
        r.eprob = runs.overflow;
        return r;
    }

    const size_t n = runs.endpoints.size();
    size_t k = 0;
    const double sure_one = mean + 8.5 * sd;
    if (rf * runs.boundary_factor[0] >= sure_one) {
        size_t lo = 0, hi = n;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (rf * runs.boundary_factor[mid] >= sure_one)
                lo = mid + 1;
            else
                hi = mid;
        }
        k = lo;
    }

    double rhs = 1.0;
    double acc = 0.0;
    const double fold_tol = delta * (1.0 - r.cdf);
    for (; k < n; ++k) {
        const double lhs = normal_cdf(nd, rf * runs.boundary_factor[k]);
        acc += (rhs - lhs) * runs.value[k];
        rhs = lhs;
        const double next_val = (k + 1 < n) ? runs.value[k + 1] : runs.overflow;
        if ((rhs - r.cdf) * (runs.overflow - next_val) <= fold_tol) break;
    }
    acc += (rhs - r.cdf) * runs.overflow;
    r.eprob = acc / (1.0 - r.cdf);
    return r;
}

inline double low_form(double hazard, double cdf, double e) {
    return (1.0 - hazard) * (cdf + e - (cdf * e));
}

inline double high_form(double hazard, double cdf, double e) {
    return 1.0 - (hazard + (1.0 - cdf) * (1.0 - e) - hazard * (1.0 - cdf) * (1.0 - e));
}

// Stabilized value: the low form keeps cancellation away from 0, the high
// form away from 1 - hazard; both are algebraically identical.
inline double cell_value(double hazard, double tie_thresh, const CellEval& ce) {
    double v = low_form(hazard, ce.cdf, ce.eprob);
    if (v > tie_thresh) v = high_form(hazard, ce.cdf, ce.eprob);
    return v;
}

// Scan variant with the regime flag held across one bucket's alpha scan;
// once any candidate crosses the threshold, later ones evaluate the high
// form directly and ties prefer the larger alpha.
inline double cell_value_scan(double hazard, double tie_thresh, const CellEval& ce,
                              bool& ties) {
    double v = 0.0;
    if (!ties) {
        v = low_form(hazard, ce.cdf, ce.eprob);
        if (v > tie_thresh) ties = true;
    }
    if (ties) v = high_form(hazard, ce.cdf, ce.eprob);
    return v;
}

struct CellResult {
    double v;
    double alpha;
};

struct StageContext {
    const StageRuns* runs;
    const std::vector<AlphaPoint>* grid;
    double hazard;
    double tie_thresh;
};

CellResult optimize_bucket_full(double rf, const StageContext& cx) {
    const auto& grid = *cx.grid;
    bool ties = false;
    double opt_v = 0.0, opt_a = 0.0;
    for (size_t a = 0; a < grid.size(); ++a) {
        const CellEval ce = eval_cell(rf, grid[a].mean, grid[a].std, *cx.runs, 0.0);
        const double v = cell_value_scan(cx.hazard, cx.tie_thresh, ce, ties);
        if (a == 0 || (!ties && v < opt_v) || (ties && v <= opt_v)) {
            opt_v = v;
            opt_a = grid[a].alpha;
        }
        if (opt_v == 0.0) break; // no alpha can improve on an exact zero
    }
    return {opt_v, opt_a};
}

struct Scratch {
    std::vector<double> vhat; // per alpha; NaN marks a dominance abort
    long warm = -1;           // winning alpha index of the previous bucket
};

// Bellman evaluation with dominance abort: while walking the runs, a
// rigorous lower bound on the cell value (remaining mass valued at the
// cheapest remaining run) is compared against the incumbent optimum;
// once it crosses, this alpha cannot win and the walk stops. An abort
// never discards a minimizer (the inequality over the incumbent upper
// bound is strict beyond the bound slack), so the selected optimum is the
// same as a full scan's.
constexpr double kBoundSlack = 2.5e-15; // covers form rounding and validator drift

bool eval_cell_bounded(double rf, double mean, double sd, const StageRuns& runs,
                       double hazard, double tie_thresh, double incumbent, double* vhat) {
    const NormalParams nd{mean, sd};
    const double survival = 1.0 - hazard;
    if (survival == 0.0) {
        *vhat = 0.0;
        return true;
    }
    const double cdf = normal_cdf(nd, rf);
    if (cdf == 1.0) {
        *vhat = cell_value(hazard, tie_thresh, {cdf, runs.overflow});
        return true;
    }

    const size_t n = runs.endpoints.size();
    const double denom = 1.0 - cdf;

    // Abort threshold in accumulated-mass units: the value forms are
    // monotone in the expectation term, so "this alpha cannot win" turns
    // into one compare per step against a precomputed constant. The slack
    // keeps every true minimizer on the safe side of form rounding and
    // the validator's monotonicity drift.
    const double v_thr = incumbent + kBoundSlack;
    double acc_thr;
    bool can_abort = v_thr < survival;
    if (can_abort) {
        acc_thr = (v_thr / survival - cdf) + 1e-15;
        if (runs.value[0] * denom > acc_thr)
            return false; // even the best reachable state is too costly
    } else {
        acc_thr = 2.0;
    }

    size_t k = 0;
    const double sure_one = mean + 8.5 * sd;
    if (rf * runs.boundary_factor[0] >= sure_one) {
        size_t lo = 0, hi = n;
        while (lo < hi) {
            const size_t mid = (lo + hi) / 2;
            if (rf * runs.boundary_factor[mid] >= sure_one)
                lo = mid + 1;
            else
                hi = mid;
        }
        k = lo;
    }

    // Skeleton bound: probe the CDF at a few interior runs and hold the
    // mass below each probe at that probe's (higher) value. The suffix
    // sums sharpen the running lower bound enough that hopeless
    // allocations abort after a handful of CDF calls.
    constexpr size_t kProbes = 16;
    double probe_f[kProbes + 1];
    double tail_lb[kProbes + 1];
    size_t probe_at[kProbes + 1];
    size_t n_probes = 0;
    if (can_abort && n - k > 3 * kProbes) {
        const size_t span = n - 1 - k;
        for (size_t m = 1; m <= kProbes; ++m) {
            const size_t p = k + span * m / (kProbes + 1);
            if (p <= k || p + 1 >= n) continue;
            if (n_probes > 0 && probe_at[n_probes - 1] >= p) continue;
            probe_at[n_probes] = p;
            probe_f[n_probes] = normal_cdf(nd, rf * runs.boundary_factor[p]);
            ++n_probes;
        }
        if (n_probes > 0) {
            tail_lb[n_probes - 1] =
                (probe_f[n_probes - 1] - cdf) * runs.value[probe_at[n_probes - 1] + 1];
            for (size_t m = n_probes - 1; m-- > 0;)
                tail_lb[m] = (probe_f[m] - probe_f[m + 1]) * runs.value[probe_at[m] + 1] +
                             tail_lb[m + 1];
            if ((1.0 - probe_f[0]) * runs.value[k] + tail_lb[0] > acc_thr) return false;
        }
    }

    double rhs = 1.0;
    double acc = 0.0;
    size_t seg = 0;
    size_t next_probe_end = n_probes > 0 ? probe_at[0] : n;
    for (; k < n; ++k) {
        const double lhs = normal_cdf(nd, rf * runs.boundary_factor[k]);
        acc += (rhs - lhs) * runs.value[k];
        rhs = lhs;
        const double next_val = (k + 1 < n) ? runs.value[k + 1] : runs.overflow;
        if ((rhs - cdf) * (runs.overflow - next_val) <= 0.0) break;
        if (k >= next_probe_end) {
            while (seg < n_probes && probe_at[seg] <= k) ++seg;
            next_probe_end = seg < n_probes ? probe_at[seg] : n;
        }
        const double lb = seg < n_probes
                              ? acc + (rhs - probe_f[seg]) * next_val + tail_lb[seg]
                              : acc + (rhs - cdf) * next_val;
        if (lb > acc_thr) return false;
    }
    acc += (rhs - cdf) * runs.overflow;
    *vhat = cell_value(hazard, tie_thresh, {cdf, acc / denom});
    return true;
}

CellResult optimize_bucket_screened(double rf, const StageContext& cx, Scratch& s) {
    const auto& grid = *cx.grid;
    const size_t n = grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.vhat.assign(n, nan);

    double incumbent = 2.0;
    auto consider = [&](size_t a) {
        double v;
        if (eval_cell_bounded(rf, grid[a].mean, grid[a].std, *cx.runs, cx.hazard, cx.tie_thresh,
                              incumbent, &v)) {
            s.vhat[a] = v;
            incumbent = std::min(incumbent, v);
        }
    };
    // The previous bucket's winner seeds a tight incumbent; the scan order
    // cannot change the result, only how fast the rest aborts.
    if (s.warm >= 0 && s.warm < static_cast<long>(n)) consider(static_cast<size_t>(s.warm));
    for (size_t a = 0; a < n; ++a)
        if (static_cast<long>(a) != s.warm) consider(a);

    // Completed entries carry exact values; everything aborted is strictly
    // worse than the optimum, so the production tie rule runs over the
    // survivors in ascending alpha order.
    double opt_v = 0.0, opt_a = 0.0;
    bool first = true;
    for (size_t a = 0; a < n; ++a) {
        const double v = s.vhat[a];
        if (!(v <= 2.0)) continue; // aborted
        if (first || v < opt_v || (v == opt_v && opt_v > cx.tie_thresh)) {
            opt_v = v;
            opt_a = grid[a].alpha;
            s.warm = static_cast<long>(a);
            first = false;
        }
        if (opt_v == 0.0) break;
    }
    return {opt_v, opt_a};
}

CellResult optimize_bucket(double rf, const StageContext& cx, Scratch& s) {
    if (cx.grid->size() <= 33) return optimize_bucket_full(rf, cx);
    return optimize_bucket_screened(rf, cx, s);
}

// alpha = 1 only; the regime flag still steers the form choice.
CellResult pruned_bucket(double rf, const StageContext& cx) {
    const AlphaPoint& p = cx.grid->back();
    bool ties = false;
    const CellEval ce = eval_cell(rf, p.mean, p.std, *cx.runs, 0.0);
    return {cell_value_scan(cx.hazard, cx.tie_thresh, ce, ties), p.alpha};
}

// First bucket whose optimal value has saturated to within the prune
// threshold; everything above it is searched at alpha = 1 only. The
// value function is nondecreasing in the bucket index, so bisection
// reproduces the sequential scan while staying independent of the worker
// partition.
long find_prune_bucket(const StageContext& cx, const Discretization& d,
                       double prune_threshold, Scratch& s) {
    const long nb = d.bucket_count();
    const double trigger = prune_threshold - kPruneTol;
    if (optimize_bucket(static_cast<double>(nb) / d.p_r, cx, s).v < trigger) return nb;
    long lo = 1, hi = nb;
    while (lo < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (optimize_bucket(static_cast<double>(mid) / d.p_r, cx, s).v >= trigger)
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

std::vector<AlphaPoint> build_alpha_grid(const ReturnModel& model, const Discretization& d,
                                         const std::optional<double>& single_alpha) {
    std::vector<AlphaPoint> grid;
    if (single_alpha) {
        const NormalParams nd = portfolio_dist(model, *single_alpha);
        grid.push_back({*single_alpha, nd.mean, nd.std});
        return grid;
    }
    grid.reserve(static_cast<size_t>(d.p_alpha) + 1);
    for (int a = 0; a <= d.p_alpha; ++a) {
        const double alpha = static_cast<double>(a) / d.p_alpha;
        const NormalParams nd = portfolio_dist(model, alpha);
        grid.push_back({alpha, nd.mean, nd.std});
    }
    return grid;
}

} // namespace

StageRuns compress_stage(const StageVector& next, const Discretization& d) {
    const long nb = d.bucket_count();
    if (static_cast<long>(next.v.size()) != nb)
        throw std::invalid_argument("compress_stage: stage size mismatch");

    const double upper = next.overflow + kUpperSlack;
    double prev = 0.0;
    for (long b = 1; b <= nb; ++b) {
        const double val = next.v[static_cast<size_t>(b - 1)];
        if (val < 0.0 || val > upper || val < prev - kMonotoneSlack)
            throw std::runtime_error("compress_stage: stage " + std::to_string(next.t) +
                                     " bucket " + std::to_string(b) +
                                     " violates the value-range/monotonicity check");
        prev = val;
    }

    StageRuns runs;
    runs.overflow = next.overflow;
    runs.endpoints.push_back(1); // the first bucket always closes its own run
    bool stopped = false;
    for (long b = 2; b <= nb - 1; ++b) {
        if (next.v[static_cast<size_t>(b - 1)] != next.v[static_cast<size_t>(b)]) {
            runs.endpoints.push_back(b);
            if (next.v[static_cast<size_t>(b)] >= next.overflow) {
                stopped = true; // saturated from here on; one overflow-valued tail
                break;
            }
        }
    }
    if (!stopped && nb > 1) runs.endpoints.push_back(nb);

    runs.value.reserve(runs.endpoints.size());
    runs.boundary_factor.reserve(runs.endpoints.size());
    for (long e : runs.endpoints) {
        runs.value.push_back(next.v[static_cast<size_t>(e - 1)]);
        runs.boundary_factor.push_back(1.0 + d.p_r / (e + 0.5));
    }
    return runs;
}

std::vector<double> transition_pmf(double rf, const NormalParams& dist,
                                   const Discretization& d) {
    if (!(rf > 0.0)) throw std::invalid_argument("transition_pmf: rf must be positive");
    const long nb = d.bucket_count();
    const double pr = d.p_r;
    const double cdf_rf = normal_cdf(dist, rf);
    if (cdf_rf == 1.0)
        throw std::domain_error("transition_pmf: ruin is certain, PMF undefined");
    const double denom = 1.0 - cdf_rf;

    std::vector<double> pmf(static_cast<size_t>(nb) + 1);
    double rhs = 1.0; // P(r_hat < inf)
    for (long i = 1; i <= nb; ++i) {
        const double lhs = normal_cdf(dist, rf * (1.0 + pr / (i + 0.5)));
        pmf[static_cast<size_t>(i - 1)] = std::max(0.0, (rhs - lhs) / denom);
        rhs = lhs;
    }
    pmf[static_cast<size_t>(nb)] = std::max(0.0, (rhs - cdf_rf) / denom);
    return pmf;
}

double stage_value(double rf, const NormalParams& dist, const StageVector& next,
                   double survival, const Discretization& d) {
    const StageRuns runs = compress_stage(next, d);
    const double hazard = 1.0 - survival;
    const double tie_thresh = 0.5 * survival;
    const CellEval ce = eval_cell(rf, dist.mean, dist.std, runs, 0.0);
    return cell_value(hazard, tie_thresh, ce);
}

PolicyGrid solve(const ReturnModel& model, const HazardSchedule& hazards,
                 const Discretization& d, const SolveOptions& options) {
    model.validate();
    d.validate();
    const int stages = hazards.decision_stages();
    if (stages < 1)
        throw std::invalid_argument("solve: hazard schedule must span at least one decision");
    for (double h : hazards.hazards)
        if (!(h >= 0.0 && h <= 1.0))
            throw std::invalid_argument("solve: hazards must lie in [0, 1]");
    if (options.single_alpha && !(*options.single_alpha >= 0.0 && *options.single_alpha <= 1.0))
        throw std::invalid_argument("solve: single_alpha must be in [0, 1]");

    const long nb = d.bucket_count();
    const std::vector<AlphaPoint> grid = build_alpha_grid(model, d, options.single_alpha);

    int workers = options.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());

    PolicyGrid out;
    out.disc = d;
    out.stages = stages;
    out.v.resize(static_cast<size_t>(stages) * static_cast<size_t>(nb));
    out.alpha.resize(out.v.size());
    out.overflow.resize(static_cast<size_t>(stages));

    StageVector next;
    next.t = stages;
    next.v.assign(static_cast<size_t>(nb), 0.0);
    next.overflow = 0.0;

    for (int t = stages - 1; t >= 0; --t) {
        const auto t0 = std::chrono::steady_clock::now();
        const StageRuns runs = compress_stage(next, d);
        const double hazard = hazards.hazards[static_cast<size_t>(t)];
        const double survival = 1.0 - hazard;

        StageContext cx;
        cx.runs = &runs;
        cx.grid = &grid;
        cx.hazard = hazard;
        cx.tie_thresh = (0.5) * survival;

        double prune_threshold = 0.0;
        long prune_bucket = nb;
        if (std::isfinite(d.prune_power)) {
            prune_threshold =
                std::floor(std::pow(10.0, d.prune_power) * survival) / std::pow(10.0, d.prune_power);
            Scratch s;
            prune_bucket = find_prune_bucket(cx, d, prune_threshold, s);
        }

        double* vrow = out.v.data() + static_cast<size_t>(t) * static_cast<size_t>(nb);
        double* arow = out.alpha.data() + static_cast<size_t>(t) * static_cast<size_t>(nb);

        std::atomic<long> cursor{1};
        const long block = 128;
        auto work = [&]() {
            Scratch s;
            for (;;) {
                const long b0 = cursor.fetch_add(block, std::memory_order_relaxed);
                if (b0 > nb) return;
                const long b1 = std::min(nb, b0 + block - 1);
                for (long b = b0; b <= b1; ++b) {
                    const double rf = static_cast<double>(b) / d.p_r;
                    const CellResult r = b <= prune_bucket ? optimize_bucket(rf, cx, s)
                                                           : pruned_bucket(rf, cx);
                    vrow[b - 1] = r.v;
                    arow[b - 1] = r.alpha;
                }
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<size_t>(workers - 1));
            for (int w = 1; w < workers; ++w) pool.emplace_back(work);
            work();
            for (auto& th : pool) th.join();
        }

        next.t = t;
        next.v.assign(vrow, vrow + nb);
        next.overflow = 1.0 - hazard;
        out.overflow[static_cast<size_t>(t)] = next.overflow;

        if (options.on_stage) {
            StageLog log;
            log.t = t;
            log.unique_runs = runs.endpoints.size();
            log.prune_bucket = prune_bucket;
            log.prune_threshold = prune_threshold;
            log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            options.on_stage(log);
        }
    }
    return out;
}

} // namespace ruinopt
