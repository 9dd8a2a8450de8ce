#pragma once

#include <Eigen/Dense>

#include <vector>

namespace mtclt {

// Three-term recurrence x p_k = a[k+1] p_{k+1} + b[k] p_k + a[k] p_{k-1} of the orthonormal
// polynomials of a discrete measure; a[0] = 0.
struct RecurrenceCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  double min_norm = 0.0;  // smallest unnormalized residual norm met along the way
};

// Discretized Stieltjes procedure (Lanczos form) with compensated dot products and one full
// re-orthogonalization pass per step. If `values` is given it receives p_j(x_i), j < count.
RecurrenceCoefficients stieltjes(const std::vector<double>& x, const std::vector<double>& w,
                                 int count, Eigen::MatrixXd* values = nullptr);

}  // namespace mtclt
