#pragma once

#include <vector>

namespace epiquery {

/// Ordinary least-squares fit of y against one column per predictor, with an
/// intercept term.
struct LinearFit {
    std::vector<double> coefficients; // aligned with the predictor columns
    double intercept = 0.0;
    double r2 = 0.0;
    bool rank_deficient = false; // solved via minimum-norm solution
};

/// Fits y_k ~ intercept + sum_j coefficients[j] * columns[j][k] minimizing the
/// squared residual over observations k. Requires more observations than
/// predictors + 1. Rank-deficient designs are solved minimum-norm and
/// flagged. R^2 is computed in-sample; when the target has (numerically) zero
/// variance it is 1 for an exactly-zero residual and 0 otherwise.
LinearFit fit_linear(const std::vector<std::vector<double>>& columns,
                     const std::vector<double>& y);

} // namespace epiquery
