#ifndef RUINOPT_RUIN_HPP
#define RUINOPT_RUIN_HPP

#include <optional>

namespace ruinopt {

/// One step of the ruin-factor recursion:
///   RF(t) = RF(t-1) / (r_hat - RF(t-1))   when r_hat > RF(t-1)
/// Returns nullopt when the withdrawal cannot be sustained (r_hat <=
/// rf_prev; equality counts as ruin). Downstream code never sees a
/// non-positive ruin factor.
std::optional<double> next_ruin_factor(double rf_prev, double r_hat);

/// Ruin test for the next withdrawal: true iff r_hat <= rf_prev.
inline bool is_ruin(double rf_prev, double r_hat) { return r_hat <= rf_prev; }

/// A live account expressed through its ruin-factor history. The real
/// balance recovers as initial_balance * rf0 / rf_t; 1/rf_t is the number
/// of real withdrawals the account can still fund.
struct AccountSnapshot {
    double initial_balance = 0.0;
    double rf0 = 0.0;  // RF(0) == W_R
    double rf_t = 0.0; // current RF(t), > 0 while un-ruined
};

double real_balance(const AccountSnapshot& snap);

/// Standard-form conversion for a retiree who needs funding between t=0
/// and t=1: withdraw w0*B now, model the remainder A with rate w_r.
/// Satisfies w0*B == w_r*A (purchasing power preserved).
struct StandardForm {
    double balance_a = 0.0;
    double w0 = 0.0;
};

StandardForm to_standard_form(double balance_b, double w_r);

/// Discretization of the positive ruin-factor axis and the allocation
/// grid. Bucket 1 covers (0, 1.5/P_R]; bucket i covers
/// (i/P_R - 1/(2 P_R), i/P_R + 1/(2 P_R)]; everything above
/// RF_Max + 1/(2 P_R) falls in the overflow bucket.
struct Discretization {
    int p_r = 1;             // ruin-factor precision P_R
    int p_alpha = 1;         // allocation precision P_alpha
    double rf_max = 1.0;     // largest midpoint, a multiple of 1/P_R
    double prune_power = 4.0; // decimal places before heavy pruning; +inf disables

    bool operator==(const Discretization&) const = default;

    long bucket_count() const { return static_cast<long>(rf_max * p_r + 0.5); }
    long overflow_bucket() const { return bucket_count() + 1; }
    int alpha_grid_size() const { return p_alpha + 1; }

    void validate() const; // throws std::invalid_argument
};

/// Bucket lookup for an observed ruin factor (1..bucket_count+1, the last
/// value being the overflow bucket). rf must be positive.
long bucket_index(double rf, const Discretization& d);

/// Midpoint i/P_R of a regular bucket; the overflow bucket has none.
double bucket_midpoint(long i, const Discretization& d);

} // namespace ruinopt

#endif
