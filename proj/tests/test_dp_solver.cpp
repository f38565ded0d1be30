#include "ruinopt/dp_solver.hpp"

#include "oracles.hpp"
#include "ruinopt/result_files.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

using namespace ruinopt;
using oracles::OracleSolution;
using oracles::normal_mass;
using oracles::oracle_solve;
using oracles::paper_model;
using oracles::uniform_alpha_grid;

namespace {

std::string results_text(const PolicyGrid& grid) {
    std::ostringstream out;
    write_results_v(out, grid);
    return out.str();
}

} // namespace

TEST_CASE("transition PMF is a unit partition") {
    const Discretization d{100, 2, 0.1, 4.0};
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> urf(0.005, 0.09);
    std::uniform_real_distribution<double> ua(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double rf = urf(rng);
        const NormalParams nd = portfolio_dist(paper_model(), ua(rng));
        const auto pmf = transition_pmf(rf, nd, d);
        REQUIRE(pmf.size() == static_cast<size_t>(d.bucket_count()) + 1);
        double sum = 0.0;
        for (double p : pmf) {
            CHECK(p >= 0.0);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("transition PMF matches quadrature over the interval images") {
    const Discretization d{100, 2, 0.1, 4.0}; // 10 buckets + overflow
    const double rf = 0.04;
    const NormalParams nd = portfolio_dist(paper_model(), 0.5);
    const auto pmf = transition_pmf(rf, nd, d);

    const double pr = d.p_r;
    const double far = nd.mean + 12.0 * nd.std;
    const double denom = normal_mass(nd, rf, far);
    // bucket i image: [rf(1 + pr/(i+1/2)), rf(1 + pr/(i-1/2))), bucket 1
    // upper end open at infinity, overflow down to rf.
    for (long i = 1; i <= d.bucket_count(); ++i) {
        const double lo = rf * (1.0 + pr / (i + 0.5));
        const double hi = i == 1 ? far : rf * (1.0 + pr / (i - 0.5));
        const double want = normal_mass(nd, lo, std::min(hi, far)) / denom;
        CHECK(pmf[static_cast<size_t>(i - 1)] == doctest::Approx(want).epsilon(1e-10));
    }
    const double want_ovf = normal_mass(nd, rf, rf * (1.0 + pr / (d.bucket_count() + 0.5))) / denom;
    CHECK(pmf.back() == doctest::Approx(want_ovf).epsilon(1e-10));
}

TEST_CASE("degenerate distribution concentrates on one bucket") {
    const Discretization d{100, 2, 0.1, 4.0};
    const double rf = 0.04;
    // place the next ruin factor exactly at midpoint 0.05
    const NormalParams nd{rf * (1.0 + 1.0 / 0.05), 0.0};
    const auto pmf = transition_pmf(rf, nd, d);
    for (long i = 1; i <= d.bucket_count() + 1; ++i)
        CHECK(pmf[static_cast<size_t>(i - 1)] == (i == 5 ? 1.0 : 0.0));
    // certain ruin has no conditional PMF
    CHECK_THROWS_AS(transition_pmf(0.04, NormalParams{0.01, 0.0}, d), std::domain_error);
}

TEST_CASE("stage_value reduces to the plain tail at the last decision") {
    const Discretization d{50, 4, 1.0, 4.0};
    StageVector boundary;
    boundary.t = 1;
    boundary.v.assign(static_cast<size_t>(d.bucket_count()), 0.0);
    boundary.overflow = 0.0;
    const NormalParams nd = portfolio_dist(paper_model(), 0.4);
    for (double rf : {0.02, 0.1, 0.5, 0.9}) {
        CHECK(stage_value(rf, nd, boundary, 1.0, d) == normal_cdf(nd, rf));
        CHECK(stage_value(rf, nd, boundary, 0.0, d) == 0.0);
    }
}

TEST_CASE("stage_value equals the direct PMF expectation") {
    const Discretization d{80, 4, 0.5, 4.0};
    const long nb = d.bucket_count();
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> uv(0.0, 1.0);

    // randomized monotone stage, overflow at the stage maximum
    for (int rep = 0; rep < 20; ++rep) {
        StageVector next;
        next.t = 3;
        next.overflow = 1.0;
        double acc = 0.0;
        for (long b = 0; b < nb; ++b) {
            acc = std::min(1.0, acc + (uv(rng) < 0.3 ? uv(rng) * 0.1 : 0.0));
            next.v.push_back(acc);
        }
        const double rf = 0.04 + 0.3 * uv(rng);
        const NormalParams nd = portfolio_dist(paper_model(), uv(rng));
        if (normal_cdf(nd, rf) == 1.0) continue;

        const auto pmf = transition_pmf(rf, nd, d);
        double e = 0.0;
        for (long b = 1; b <= nb; ++b)
            e += pmf[static_cast<size_t>(b - 1)] * next.v[static_cast<size_t>(b - 1)];
        e += pmf.back() * next.overflow;
        const double F = normal_cdf(nd, rf);
        const double direct = 1.0 - (1.0 - F) * (1.0 - e);
        CHECK(stage_value(rf, nd, next, 1.0, d) == doctest::Approx(direct).epsilon(1e-15));
    }
}

TEST_CASE("compress_stage structure and failure modes") {
    const Discretization d{10, 2, 1.0, 4.0};
    const long nb = d.bucket_count();

    StageVector zeros;
    zeros.t = 5;
    zeros.v.assign(static_cast<size_t>(nb), 0.0);
    zeros.overflow = 0.0;
    const StageRuns z = compress_stage(zeros, d);
    CHECK(z.endpoints.size() <= 2); // one run of zeros (bucket 1 kept apart)

    StageVector inc;
    inc.t = 5;
    inc.overflow = 1.0;
    for (long b = 0; b < nb; ++b) inc.v.push_back(0.01 * static_cast<double>(b));
    const StageRuns r = compress_stage(inc, d);
    CHECK(r.endpoints.size() == static_cast<size_t>(nb)); // strictly increasing: no merging

    StageVector bad = inc;
    bad.v[4] = bad.v[3] - 0.5; // monotonicity violated
    CHECK_THROWS_AS(compress_stage(bad, d), std::runtime_error);

    StageVector high = inc;
    high.v[4] = 1.5; // above the stage maximum
    CHECK_THROWS_AS(compress_stage(high, d), std::runtime_error);
}

TEST_CASE("solve matches the from-scratch enumeration on small instances") {
    struct Case {
        int p_r;
        double rf_max;
        int p_alpha;
        HazardSchedule hz;
    };
    std::vector<Case> cases;
    cases.push_back({4, 0.5, 2, fixed_horizon_schedule(2)});
    cases.push_back({8, 1.0, 4, fixed_horizon_schedule(3)});
    HazardSchedule random_h;
    random_h.hazards = {0.02, 0.10, 0.55, 1.0};
    cases.push_back({8, 1.0, 4, random_h});

    for (const auto& c : cases) {
        Discretization d{c.p_r, c.p_alpha, c.rf_max, 4.0};
        const PolicyGrid got = solve(paper_model(), c.hz, d, {});
        const OracleSolution want =
            oracle_solve(paper_model(), c.hz, d, uniform_alpha_grid(c.p_alpha));
        for (int t = 0; t < got.stages; ++t) {
            for (long b = 1; b <= d.bucket_count(); ++b) {
                CHECK(got.value_at(t, b) ==
                      doctest::Approx(want.v[static_cast<size_t>(t)][static_cast<size_t>(b - 1)])
                          .epsilon(1e-12));
                CHECK(std::fabs(got.alpha_at(t, b) -
                                want.alpha[static_cast<size_t>(t)][static_cast<size_t>(b - 1)]) <=
                      1.0 / c.p_alpha + 1e-12);
            }
        }
    }
}

TEST_CASE("last decision minimizes the one-step tail") {
    const Discretization d{40, 8, 1.0, 4.0};
    const PolicyGrid grid = solve(paper_model(), fixed_horizon_schedule(1), d, {});
    for (long b = 1; b <= d.bucket_count(); ++b) {
        const double rf = static_cast<double>(b) / d.p_r;
        double best = 2.0, best_a = 0.0;
        for (int a = 0; a <= d.p_alpha; ++a) {
            const double alpha = static_cast<double>(a) / d.p_alpha;
            const double F = normal_cdf(portfolio_dist(paper_model(), alpha), rf);
            if (F < best) {
                best = F;
                best_a = alpha;
            }
        }
        CHECK(grid.value_at(0, b) == doctest::Approx(best).epsilon(1e-14));
        CHECK(grid.alpha_at(0, b) == best_a);
    }
}

TEST_CASE("policy grid invariants hold on a moderate instance") {
    const Discretization d{300, 40, 1.5, 4.0};
    HazardSchedule hz;
    hz.hazards = {0.01, 0.03, 0.08, 0.2, 0.5, 1.0};
    const PolicyGrid grid = solve(paper_model(), hz, d, {});
    for (int t = 0; t < grid.stages; ++t) {
        const double bound = 1.0 - hz.hazards[static_cast<size_t>(t)] + 2e-16;
        double prev = 0.0;
        for (long b = 1; b <= d.bucket_count(); ++b) {
            const double v = grid.value_at(t, b);
            CHECK(v >= 0.0);
            CHECK(v <= bound);
            CHECK(v >= prev - 1e-15);
            prev = v;
            const double a = grid.alpha_at(t, b);
            CHECK(a * d.p_alpha == doctest::Approx(std::round(a * d.p_alpha)).epsilon(1e-9));
        }
    }
    // fixed-horizon time monotonicity: more time left cannot lower risk
    const PolicyGrid fixed = solve(paper_model(), fixed_horizon_schedule(6),
                                   Discretization{200, 20, 1.0, 4.0}, {});
    for (int t = 1; t < fixed.stages; ++t)
        for (long b = 1; b <= fixed.buckets(); ++b)
            CHECK(fixed.value_at(t, b) <= fixed.value_at(t - 1, b) + 1e-15);
}

TEST_CASE("fixed-horizon solve equals the equivalent hazard-schedule solve bit for bit") {
    const Discretization d{100, 10, 1.0, 4.0};
    HazardSchedule manual;
    manual.hazards.assign(8, 0.0);
    manual.hazards.push_back(1.0); // S_Max = 8
    const PolicyGrid a = solve(paper_model(), fixed_horizon_schedule(8), d, {});
    const PolicyGrid b = solve(paper_model(), manual, d, {});
    CHECK(a.v == b.v);
    CHECK(a.alpha == b.alpha);
}

TEST_CASE("longer fixed solves contain the shorter ones") {
    const Discretization d{100, 10, 1.0, 4.0};
    const PolicyGrid t6 = solve(paper_model(), fixed_horizon_schedule(6), d, {});
    const PolicyGrid t4 = solve(paper_model(), fixed_horizon_schedule(4), d, {});
    for (long b = 1; b <= d.bucket_count(); ++b) {
        CHECK(t6.value_at(2, b) == t4.value_at(0, b));
        CHECK(t6.alpha_at(2, b) == t4.alpha_at(0, b));
    }
}

TEST_CASE("output is byte-identical across worker counts") {
    const Discretization d{150, 16, 1.0, 4.0};
    HazardSchedule hz;
    hz.hazards = {0.001, 0.01, 0.05, 0.2, 1.0};
    SolveOptions o1, o4, o8;
    o1.workers = 1;
    o4.workers = 4;
    o8.workers = 8;
    const std::string r1 = results_text(solve(paper_model(), hz, d, o1));
    const std::string r4 = results_text(solve(paper_model(), hz, d, o4));
    const std::string r8 = results_text(solve(paper_model(), hz, d, o8));
    CHECK(r1 == r4);
    CHECK(r1 == r8);
}

TEST_CASE("singleton grids can never beat the full grid") {
    Discretization d{60, 8, 1.0, 4.0};
    d.prune_power = std::numeric_limits<double>::infinity(); // compare unpruned optima
    HazardSchedule hz;
    hz.hazards = {0.01, 0.05, 0.3, 1.0};
    const PolicyGrid full = solve(paper_model(), hz, d, {});
    for (double a : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        SolveOptions opt;
        opt.single_alpha = a;
        const PolicyGrid single = solve(paper_model(), hz, d, opt);
        for (long b = 1; b <= d.bucket_count(); ++b)
            CHECK(single.value_at(0, b) >= full.value_at(0, b) - 1e-12);
    }
}

TEST_CASE("pruning only rewrites the saturated region") {
    Discretization pruned{120, 10, 1.5, 4.0};
    Discretization open = pruned;
    open.prune_power = std::numeric_limits<double>::infinity();
    HazardSchedule hz;
    hz.hazards = {0.02, 0.08, 0.3, 0.6, 1.0};

    long first_prune_bucket = pruned.bucket_count() + 1;
    SolveOptions po;
    po.on_stage = [&](const StageLog& log) {
        if (log.t == hz.decision_stages() - 1) first_prune_bucket = log.prune_bucket;
    };
    const PolicyGrid with = solve(paper_model(), hz, pruned, po);
    const PolicyGrid without = solve(paper_model(), hz, open, {});

    // The first processed stage reads the exact boundary, so below its
    // prune point the two solves agree exactly.
    const int last = hz.decision_stages() - 1;
    for (long b = 1; b <= std::min(first_prune_bucket, pruned.bucket_count()); ++b) {
        CHECK(with.value_at(last, b) == without.value_at(last, b));
        CHECK(with.alpha_at(last, b) == without.alpha_at(last, b));
    }
    // Globally the rewrite is bounded by the prune resolution.
    for (int t = 0; t < with.stages; ++t)
        for (long b = 1; b <= pruned.bucket_count(); ++b)
            CHECK(std::fabs(with.value_at(t, b) - without.value_at(t, b)) <= 5e-4);
}

TEST_CASE("solver input validation") {
    const Discretization d{10, 2, 1.0, 4.0};
    HazardSchedule empty;
    CHECK_THROWS_AS(solve(paper_model(), empty, d, {}), std::invalid_argument);
    HazardSchedule bad;
    bad.hazards = {0.5, 1.5};
    CHECK_THROWS_AS(solve(paper_model(), bad, d, {}), std::invalid_argument);
    SolveOptions opt;
    opt.single_alpha = 1.5;
    CHECK_THROWS_AS(solve(paper_model(), fixed_horizon_schedule(2), d, opt),
                    std::invalid_argument);
}
