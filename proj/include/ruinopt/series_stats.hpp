#ifndef RUINOPT_SERIES_STATS_HPP
#define RUINOPT_SERIES_STATS_HPP

#include <string>
#include <vector>

namespace ruinopt {

/// Sample autocorrelations r(1..max_lag) with the Box-Jenkins biased
/// denominator: r(k) = sum_t (y_t - ybar)(y_{t+k} - ybar) / sum_t (y_t - ybar)^2.
/// The full-series mean is used at every lag. Throws on zero variance.
std::vector<double> acf(const std::vector<double>& series, int max_lag);

/// Partial autocorrelations via the Yule-Walker equations: phi_hat(k) is
/// the last coefficient of the AR(k) fit, solved by the Levinson-Durbin
/// recursion on the given autocorrelations. Throws std::runtime_error
/// naming the lag when the Toeplitz system degenerates.
std::vector<double> pacf_from_acf(const std::vector<double>& acf_values);
std::vector<double> pacf_yule_walker(const std::vector<double>& series, int max_lag);

struct WhitenessReport {
    double threshold = 0.0; // 2/sqrt(n)
    std::vector<double> acf_values;
    std::vector<double> pacf_values;
    std::vector<bool> acf_flagged;
    std::vector<bool> pacf_flagged;

    int flagged_count() const;
};

/// Flags lags whose |r(k)| or |phi_hat(k)| exceeds 2/sqrt(n), the
/// large-sample 95% band for a white-noise series.
WhitenessReport whiteness_report(const std::vector<double>& series, int max_lag);

/// Stationarity check for fitted AR(p), p <= 2: all roots of
/// 1 - phi_1 B - phi_2 B^2 must lie strictly outside the unit circle.
bool ar_roots_outside_unit_circle(const std::vector<double>& phi);

} // namespace ruinopt

#endif
