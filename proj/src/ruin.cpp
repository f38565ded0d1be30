#include "ruinopt/ruin.hpp"

#include <cmath>
#include <stdexcept>

namespace ruinopt {

std::optional<double> next_ruin_factor(double rf_prev, double r_hat) {
    if (!(rf_prev > 0.0))
        throw std::invalid_argument("next_ruin_factor: rf_prev must be positive");
    if (r_hat <= rf_prev) return std::nullopt;
    return rf_prev / (r_hat - rf_prev);
}

double real_balance(const AccountSnapshot& snap) {
    if (!(snap.rf_t > 0.0))
        throw std::invalid_argument("real_balance: ruined state has no balance");
    return snap.initial_balance * snap.rf0 / snap.rf_t;
}

StandardForm to_standard_form(double balance_b, double w_r) {
    if (!(balance_b > 0.0))
        throw std::invalid_argument("to_standard_form: balance must be positive");
    if (!(w_r > 0.0 && w_r < 1.0))
        throw std::invalid_argument("to_standard_form: w_r must be in (0, 1)");
    StandardForm sf;
    sf.w0 = w_r / (1.0 + w_r);
    sf.balance_a = balance_b * (1.0 - sf.w0);
    return sf;
}

void Discretization::validate() const {
    if (p_r < 1) throw std::invalid_argument("Discretization: p_r must be >= 1");
    if (p_alpha < 1) throw std::invalid_argument("Discretization: p_alpha must be >= 1");
    if (!(rf_max > 0.0)) throw std::invalid_argument("Discretization: rf_max must be positive");
    const double cells = rf_max * p_r;
    if (std::fabs(cells - std::floor(cells + 0.5)) > 1e-6)
        throw std::invalid_argument("Discretization: rf_max must be a multiple of 1/p_r");
    if (std::isnan(prune_power) || (std::isfinite(prune_power) && prune_power < 0.0))
        throw std::invalid_argument("Discretization: prune_power must be >= 0 or +inf");
}

long bucket_index(double rf, const Discretization& d) {
    if (!(rf > 0.0))
        throw std::invalid_argument("bucket_index: rf must be positive");
    const long nb = d.bucket_count();
    const double x = rf * d.p_r;
    if (x > nb + 0.5) return nb + 1; // overflow region
    long i = static_cast<long>(std::ceil(x - 0.5));
    if (i < 1) i = 1;
    if (i > nb) i = nb;
    return i;
}

double bucket_midpoint(long i, const Discretization& d) {
    if (i < 1 || i > d.bucket_count())
        throw std::invalid_argument("bucket_midpoint: bucket out of range");
    return static_cast<double>(i) / d.p_r;
}

} // namespace ruinopt
