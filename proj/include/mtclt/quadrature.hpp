#pragma once

#include <vector>

namespace mtclt {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order on [lo, hi].
QuadratureRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

// Composite Gauss-Legendre: `panels` equal panels per interval between consecutive breakpoints.
QuadratureRule gauss_legendre_panels(const std::vector<double>& breakpoints, int panels, int order);

// Sum with Neumaier compensation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

// Pairwise summation; the result depends only on the input order, not on any scheduling.
double pairwise_sum(const double* x, long n);

}  // namespace mtclt
