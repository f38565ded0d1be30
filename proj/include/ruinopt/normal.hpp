#ifndef RUINOPT_NORMAL_HPP
#define RUINOPT_NORMAL_HPP

namespace ruinopt {

/// Parameters of a univariate normal law. A zero standard deviation is
/// permitted and denotes the degenerate point mass at `mean`.
struct NormalParams {
    double mean = 0.0;
    double std = 1.0;
};

/// P(X <= x) for X ~ N(mean, std^2).
///
/// Backed by erfc, which keeps the left tail relatively accurate down to
/// the underflow threshold; the DP consumes deep-tail masses directly, so
/// absolute-only accuracy would not be enough. For std == 0 this is the
/// step function with the jump counted at x == mean (P = 1 there).
double normal_cdf(const NormalParams& dist, double x);

/// Standard normal CDF.
double standard_normal_cdf(double z);

/// Quantile of the standard normal law (Wichura's AS241 rational
/// approximations, ~1 ulp over (0,1)). Out-of-range p yields -inf/+inf.
double standard_normal_quantile(double p);

} // namespace ruinopt

#endif
