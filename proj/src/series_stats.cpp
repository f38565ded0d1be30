#include "ruinopt/series_stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ruinopt {

std::vector<double> acf(const std::vector<double>& series, int max_lag) {
    const int n = static_cast<int>(series.size());
    if (n < 2) throw std::invalid_argument("acf: need at least 2 observations");
    if (max_lag < 1 || max_lag > n - 1)
        throw std::invalid_argument("acf: max_lag must be in [1, n-1]");

    double mean = 0.0;
    for (double y : series) mean += y;
    mean /= n;

    double denom = 0.0;
    for (double y : series) denom += (y - mean) * (y - mean);
    if (denom == 0.0) throw std::invalid_argument("acf: series has zero variance");

    std::vector<double> r(static_cast<size_t>(max_lag));
    for (int k = 1; k <= max_lag; ++k) {
        double num = 0.0;
        for (int t = 0; t + k < n; ++t)
            num += (series[static_cast<size_t>(t)] - mean) *
                   (series[static_cast<size_t>(t + k)] - mean);
        r[static_cast<size_t>(k - 1)] = num / denom;
    }
    return r;
}

std::vector<double> pacf_from_acf(const std::vector<double>& acf_values) {
    const int m = static_cast<int>(acf_values.size());
    std::vector<double> pacf(static_cast<size_t>(m));
    std::vector<double> phi(static_cast<size_t>(m), 0.0);
    std::vector<double> prev(static_cast<size_t>(m), 0.0);
    double err = 1.0; // prediction error variance, in units of r(0) = 1

    for (int k = 1; k <= m; ++k) {
        if (!(err > 0.0))
            throw std::runtime_error("pacf: Yule-Walker system is singular at lag " +
                                     std::to_string(k));
        double num = acf_values[static_cast<size_t>(k - 1)];
        for (int j = 1; j < k; ++j)
            num -= prev[static_cast<size_t>(j - 1)] * acf_values[static_cast<size_t>(k - j - 1)];
        const double reflect = num / err;
        phi[static_cast<size_t>(k - 1)] = reflect;
        for (int j = 1; j < k; ++j)
            phi[static_cast<size_t>(j - 1)] = prev[static_cast<size_t>(j - 1)] -
                                              reflect * prev[static_cast<size_t>(k - j - 1)];
        err *= 1.0 - reflect * reflect;
        pacf[static_cast<size_t>(k - 1)] = reflect;
        prev = phi;
    }
    return pacf;
}

std::vector<double> pacf_yule_walker(const std::vector<double>& series, int max_lag) {
    return pacf_from_acf(acf(series, max_lag));
}

int WhitenessReport::flagged_count() const {
    int c = 0;
    for (size_t k = 0; k < acf_flagged.size(); ++k)
        if (acf_flagged[k] || pacf_flagged[k]) ++c;
    return c;
}

WhitenessReport whiteness_report(const std::vector<double>& series, int max_lag) {
    WhitenessReport rep;
    rep.threshold = 2.0 / std::sqrt(static_cast<double>(series.size()));
    rep.acf_values = acf(series, max_lag);
    rep.pacf_values = pacf_from_acf(rep.acf_values);
    rep.acf_flagged.resize(rep.acf_values.size());
    rep.pacf_flagged.resize(rep.pacf_values.size());
    for (size_t k = 0; k < rep.acf_values.size(); ++k) {
        rep.acf_flagged[k] = std::fabs(rep.acf_values[k]) > rep.threshold;
        rep.pacf_flagged[k] = std::fabs(rep.pacf_values[k]) > rep.threshold;
    }
    return rep;
}

bool ar_roots_outside_unit_circle(const std::vector<double>& phi) {
    if (phi.empty()) return true; // AR(0) has no roots
    if (phi.size() == 1) return std::fabs(phi[0]) < 1.0;
    if (phi.size() == 2) {
        // 1 - phi1 B - phi2 B^2: roots outside the unit circle iff the
        // stationarity triangle holds.
        const double p1 = phi[0], p2 = phi[1];
        return std::fabs(p2) < 1.0 && p2 + p1 < 1.0 && p2 - p1 < 1.0;
    }
    throw std::invalid_argument("ar_roots_outside_unit_circle: only p <= 2 is supported");
}

} // namespace ruinopt
