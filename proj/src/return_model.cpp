#include "ruinopt/return_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ruinopt {

ReturnModel ReturnModel::from_correlation(double stock_mean, double stock_std,
                                          double bond_mean, double bond_std,
                                          double rho, double expense_ratio) {
    ReturnModel m;
    m.stock_mean = stock_mean;
    m.stock_var = stock_std * stock_std;
    m.bond_mean = bond_mean;
    m.bond_var = bond_std * bond_std;
    m.stock_bond_cov = rho * stock_std * bond_std;
    m.expense_ratio = expense_ratio;
    m.validate();
    return m;
}

void ReturnModel::validate() const {
    if (!(stock_var >= 0.0) || !(bond_var >= 0.0))
        throw std::invalid_argument("ReturnModel: variances must be nonnegative");
    const double bound = std::sqrt(stock_var * bond_var);
    if (std::fabs(stock_bond_cov) > bound * (1.0 + 1e-12) + 1e-300)
        throw std::invalid_argument("ReturnModel: covariance exceeds the valid correlation range");
    if (!(expense_ratio >= 0.0) || !(expense_ratio < 1.0))
        throw std::invalid_argument("ReturnModel: expense ratio must be in [0, 1)");
}

NormalParams portfolio_dist(const ReturnModel& model, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("portfolio_dist: alpha must be in [0, 1]");
    const double er = model.expense_ratio;
    NormalParams d;
    d.mean = (1.0 - er) * (1.0 + alpha * model.stock_mean + (1.0 - alpha) * model.bond_mean);
    d.std = (1.0 - er) * std::sqrt(alpha * alpha * model.stock_var +
                                   (1.0 - alpha) * (1.0 - alpha) * model.bond_var +
                                   2.0 * alpha * (1.0 - alpha) * model.stock_bond_cov);
    return d;
}

} // namespace ruinopt
