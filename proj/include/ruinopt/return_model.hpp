#ifndef RUINOPT_RETURN_MODEL_HPP
#define RUINOPT_RETURN_MODEL_HPP

#include "ruinopt/normal.hpp"

namespace ruinopt {

/// Joint real (inflation-adjusted) annual return law of the two asset
/// classes, stored as variances and covariance, plus the yearly expense
/// ratio. This matches the control-file layout, which carries variances
/// rather than standard deviations and a correlation.
struct ReturnModel {
    double stock_mean = 0.0;
    double stock_var = 0.0;
    double bond_mean = 0.0;
    double bond_var = 0.0;
    double stock_bond_cov = 0.0;
    double expense_ratio = 0.0;

    /// Convenience constructor from per-asset standard deviations and a
    /// correlation coefficient.
    static ReturnModel from_correlation(double stock_mean, double stock_std,
                                        double bond_mean, double bond_std,
                                        double rho, double expense_ratio = 0.0);

    /// Throws std::invalid_argument when variances are negative, the
    /// covariance implies |rho| > 1, or expense_ratio is outside [0, 1).
    void validate() const;

    bool operator==(const ReturnModel&) const = default;
};

/// Distribution of the gross multiplier applied to the real balance over
/// one period for a portfolio holding fraction `alpha` in stocks:
///   mean = (1-E_R) * (1 + a*mu_s + (1-a)*mu_b)
///   var  = (1-E_R)^2 * (a^2 vs + (1-a)^2 vb + 2a(1-a) cov)
/// The mean sits near 1, not 0. Throws on alpha outside [0, 1].
NormalParams portfolio_dist(const ReturnModel& model, double alpha);

/// P(r_hat <= x) under the blended-portfolio law.
inline double return_cdf(const NormalParams& dist, double x) {
    return normal_cdf(dist, x);
}

} // namespace ruinopt

#endif
