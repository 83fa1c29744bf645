#include "epiquery/linear_fit.hpp"

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

#include "epiquery/error.hpp"

namespace epiquery {

LinearFit fit_linear(const std::vector<std::vector<double>>& columns,
                     const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t p = columns.size();
    for (const auto& col : columns) {
        if (col.size() != n) {
            throw Error(ErrorKind::degenerate, "predictor column length mismatch");
        }
    }
    if (n <= p + 1) {
        throw Error(ErrorKind::degenerate,
                    "need more observations (" + std::to_string(n) + ") than predictors + 1 (" +
                        std::to_string(p + 1) + ")");
    }

    Eigen::MatrixXd design(n, p + 1);
    design.col(0).setOnes();
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            design(k, j + 1) = columns[j][k];
        }
    }
    Eigen::Map<const Eigen::VectorXd> target(y.data(), n);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    Eigen::VectorXd beta = cod.solve(target);

    LinearFit fit;
    fit.rank_deficient = cod.rank() < static_cast<Eigen::Index>(p + 1);
    fit.intercept = beta(0);
    fit.coefficients.assign(beta.data() + 1, beta.data() + 1 + p);

    Eigen::VectorXd residual = target - design * beta;
    double ss_res = residual.squaredNorm();
    double mean = target.mean();
    double ss_tot = (target.array() - mean).matrix().squaredNorm();

    // Numerically-zero total variance (constant target up to rounding): the
    // usual ratio is meaningless, so report a perfect fit only for a
    // bit-exact zero residual and no skill otherwise.
    double scale = target.cwiseAbs().maxCoeff();
    double zero_tol = 1e-24 * static_cast<double>(n) * std::max(1.0, scale * scale);
    if (ss_tot <= zero_tol) {
        fit.r2 = ss_res == 0.0 ? 1.0 : 0.0;
    } else {
        fit.r2 = 1.0 - ss_res / ss_tot;
    }
    return fit;
}

} // namespace epiquery
