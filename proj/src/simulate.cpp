#include "ruinopt/simulate.hpp"

#include "ruinopt/normal.hpp"
#include "ruinopt/ruin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace ruinopt {

namespace {

constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ULL;
constexpr std::uint64_t kPhiloxW = 0x9E3779B97F4A7C15ULL;

inline void philox_round(std::uint64_t& c0, std::uint64_t& c1, std::uint64_t key) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(kPhiloxM) * c0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    c0 = hi ^ key ^ c1;
    c1 = lo;
}

inline void philox2x64(std::uint64_t counter0, std::uint64_t counter1, std::uint64_t key,
                       std::uint64_t out[2]) {
    std::uint64_t c0 = counter0, c1 = counter1, k = key;
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, k);
        k += kPhiloxW;
    }
    out[0] = c0;
    out[1] = c1;
}

} // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) : key_(seed), path_(path) {}

std::uint64_t PathRng::next_u64() {
    if (avail_ == 0) {
        philox2x64(path_, block_++, key_, buf_);
        avail_ = 2;
    }
    return buf_[2 - avail_--];
}

double PathRng::next_uniform() {
    // 53 random bits, centered in the bin: u in (0, 1) strictly.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double PathRng::next_normal() { return standard_normal_quantile(next_uniform()); }

namespace {

struct ReturnSampler {
    double stock_mean, stock_std;
    double bond_mean, bond_cond_std, rho_scaled;
    double one_minus_er;

    explicit ReturnSampler(const ReturnModel& m) {
        stock_mean = m.stock_mean;
        stock_std = std::sqrt(m.stock_var);
        bond_mean = m.bond_mean;
        const double bond_std = std::sqrt(m.bond_var);
        const double rho =
            stock_std > 0.0 && bond_std > 0.0 ? m.stock_bond_cov / (stock_std * bond_std) : 0.0;
        rho_scaled = rho * bond_std;
        bond_cond_std = bond_std * std::sqrt(std::max(0.0, 1.0 - rho * rho));
        one_minus_er = 1.0 - m.expense_ratio;
    }

    // Gross inflation/expense-adjusted portfolio multiplier for one year.
    double draw_r_hat(PathRng& rng, double alpha) const {
        const double z1 = rng.next_normal();
        const double z2 = rng.next_normal();
        const double rs = stock_mean + stock_std * z1;
        const double rb = bond_mean + rho_scaled * z1 + bond_cond_std * z2;
        return one_minus_er * (alpha * (1.0 + rs) + (1.0 - alpha) * (1.0 + rb));
    }

    void draw_pair(PathRng& rng, double& rs, double& rb) const {
        const double z1 = rng.next_normal();
        const double z2 = rng.next_normal();
        rs = stock_mean + stock_std * z1;
        rb = bond_mean + rho_scaled * z1 + bond_cond_std * z2;
    }
};

// CDF of the death year, for one inverse-transform draw per path.
std::vector<double> death_cdf(const HazardSchedule& h) {
    std::vector<double> cdf(h.hazards.size());
    double alive = 1.0;
    double acc = 0.0;
    for (size_t t = 0; t < h.hazards.size(); ++t) {
        acc += alive * h.hazards[t];
        cdf[t] = acc;
        alive *= 1.0 - h.hazards[t];
    }
    cdf.back() = 1.0; // P(T_D > S_Max) = 0 by construction
    return cdf;
}

int draw_death_year(PathRng& rng, const std::vector<double>& cdf) {
    const double u = rng.next_uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(it - cdf.begin());
}

struct StrategyView {
    const double* glide = nullptr; // per-stage alphas (fixed uses stage 0 only)
    int glide_len = 0;
    const AlphaTable* table = nullptr;
    double fixed = 0.0;
    bool is_fixed = false;

    double alpha_at(int t, double rf) const {
        if (is_fixed) return fixed;
        if (glide) return glide[t];
        // Policy lookup against the solved grid's own buckets, no
        // interpolation; the overflow region allocates fully to stocks.
        const long nb = table->buckets();
        const double x = rf * table->p_r;
        if (x > static_cast<double>(nb) + 0.5) return 1.0;
        long b = static_cast<long>(std::ceil(x - 0.5));
        if (b < 1) b = 1;
        if (b > nb) b = nb;
        return table->at(t, b);
    }
};

} // namespace

SimResult simulate(const SimConfig& cfg, const ReturnModel& model) {
    if (cfg.n_paths < 1) throw std::invalid_argument("simulate: n_paths must be >= 1");
    if (!(cfg.w_r > 0.0 && cfg.w_r < 1.0))
        throw std::invalid_argument("simulate: w_r must be in (0, 1)");
    model.validate();
    const int s_max = cfg.horizon.s_max();
    if (s_max < 1) throw std::invalid_argument("simulate: horizon must span at least one year");

    StrategyView view;
    if (const auto* f = std::get_if<FixedAlpha>(&cfg.strategy)) {
        if (!(f->alpha >= 0.0 && f->alpha <= 1.0))
            throw std::invalid_argument("simulate: fixed alpha must be in [0, 1]");
        view.is_fixed = true;
        view.fixed = f->alpha;
    } else if (const auto* g = std::get_if<GlidePath>(&cfg.strategy)) {
        if (static_cast<int>(g->alpha.size()) != cfg.horizon.decision_stages())
            throw std::invalid_argument("simulate: glide path length must equal decision stages");
        view.glide = g->alpha.data();
        view.glide_len = static_cast<int>(g->alpha.size());
    } else {
        const auto& p = std::get<PolicyStrategy>(cfg.strategy);
        if (p.table.stages < cfg.horizon.decision_stages())
            throw std::invalid_argument("simulate: policy grid has fewer stages than the horizon");
        view.table = &p.table;
    }

    const ReturnSampler sampler(model);
    const std::vector<double> cdf = death_cdf(cfg.horizon);

    int workers = cfg.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());

    std::vector<std::vector<long>> hist(static_cast<size_t>(workers),
                                        std::vector<long>(static_cast<size_t>(s_max) + 1, 0));
    std::vector<long> ruined_per(static_cast<size_t>(workers), 0);

    std::atomic<long> cursor{0};
    const long chunk = 4096;
    auto work = [&](int w) {
        auto& local_hist = hist[static_cast<size_t>(w)];
        long local_ruined = 0;
        for (;;) {
            const long p0 = cursor.fetch_add(chunk, std::memory_order_relaxed);
            if (p0 >= cfg.n_paths) break;
            const long p1 = std::min(cfg.n_paths, p0 + chunk);
            for (long p = p0; p < p1; ++p) {
                PathRng rng(cfg.master_seed, static_cast<std::uint64_t>(p));
                const int t_d = draw_death_year(rng, cdf);
                double rf = cfg.w_r;
                for (int t = 1; t <= t_d; ++t) {
                    const double alpha = view.alpha_at(t - 1, rf);
                    const double r_hat = sampler.draw_r_hat(rng, alpha);
                    if (r_hat <= rf) {
                        ++local_ruined;
                        ++local_hist[static_cast<size_t>(t)];
                        break;
                    }
                    rf = rf / (r_hat - rf);
                }
            }
        }
        ruined_per[static_cast<size_t>(w)] = local_ruined;
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
        for (auto& th : pool) th.join();
    }

    SimResult res;
    res.paths = cfg.n_paths;
    res.ruined_at.assign(static_cast<size_t>(s_max) + 1, 0);
    for (int w = 0; w < workers; ++w) {
        res.ruined += ruined_per[static_cast<size_t>(w)];
        for (size_t t = 0; t <= static_cast<size_t>(s_max); ++t)
            res.ruined_at[t] += hist[static_cast<size_t>(w)][t];
    }
    res.ruin_estimate = static_cast<double>(res.ruined) / static_cast<double>(cfg.n_paths);
    res.std_error = std::sqrt(res.ruin_estimate * (1.0 - res.ruin_estimate) /
                              static_cast<double>(cfg.n_paths));
    return res;
}

GeometricMeanResult geometric_mean_check(const ReturnModel& model, int years, long n_reps,
                                         std::uint64_t seed) {
    if (years < 2) throw std::invalid_argument("geometric_mean_check: years must be >= 2");
    if (n_reps < 1) throw std::invalid_argument("geometric_mean_check: n_reps must be >= 1");
    model.validate();
    const ReturnSampler sampler(model);

    // Per-rep geometric means; NaN marks a rep with a non-positive gross draw.
    std::vector<double> stock_gm(static_cast<size_t>(n_reps));
    std::vector<double> bond_gm(static_cast<size_t>(n_reps));

    for (long rep = 0; rep < n_reps; ++rep) {
        PathRng rng(seed, static_cast<std::uint64_t>(rep));
        double ls = 0.0, lb = 0.0;
        bool bad_s = false, bad_b = false;
        for (int y = 0; y < years; ++y) {
            double rs, rb;
            sampler.draw_pair(rng, rs, rb);
            const double gs = 1.0 + rs, gb = 1.0 + rb;
            if (gs <= 0.0)
                bad_s = true;
            else
                ls += std::log(gs);
            if (gb <= 0.0)
                bad_b = true;
            else
                lb += std::log(gb);
        }
        stock_gm[static_cast<size_t>(rep)] =
            bad_s ? std::numeric_limits<double>::quiet_NaN() : std::expm1(ls / years);
        bond_gm[static_cast<size_t>(rep)] =
            bad_b ? std::numeric_limits<double>::quiet_NaN() : std::expm1(lb / years);
    }

    auto trimmed_mean = [](std::vector<double>& gms, long& discarded) {
        std::vector<double> valid;
        valid.reserve(gms.size());
        long bad = 0;
        for (double g : gms) {
            if (std::isnan(g))
                ++bad;
            else
                valid.push_back(g);
        }
        // Balance the removed low-tail outliers with the same count from
        // the top so the trim stays symmetric.
        if (bad > 0 && static_cast<size_t>(bad) < valid.size()) {
            std::nth_element(valid.begin(), valid.end() - bad, valid.end());
            valid.resize(valid.size() - static_cast<size_t>(bad));
        }
        discarded = 2 * bad;
        double sum = 0.0;
        for (double g : valid) sum += g;
        return sum / static_cast<double>(valid.size());
    };

    GeometricMeanResult res;
    res.stock_gm = trimmed_mean(stock_gm, res.discarded_stock);
    res.bond_gm = trimmed_mean(bond_gm, res.discarded_bond);
    return res;
}

} // namespace ruinopt
