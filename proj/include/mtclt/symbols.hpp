#pragma once

#include <Eigen/Dense>

#include <functional>
#include <variant>
#include <vector>

#include "mtclt/polynomial.hpp"

namespace mtclt {

// Laurent polynomial sum_{j=-q}^{p} a_j z^j.
class LaurentSymbol {
 public:
  LaurentSymbol() = default;
  // coeffs[i] multiplies z^{min_power + i}
  LaurentSymbol(int min_power, std::vector<double> coeffs);
  static LaurentSymbol constant(double c);
  // a1 e^{-tau} z + a0 + a1 e^{tau} / z: the limit of the weighted recurrence near the cut
  static LaurentSymbol tridiagonal(double a0, double a1, double tau = 0.0);

  int min_power() const { return min_; }
  int max_power() const { return min_ + static_cast<int>(c_.size()) - 1; }
  double operator[](int j) const;
  bool is_zero() const;

  LaurentSymbol reversed() const;  // a(1/z)

  friend LaurentSymbol operator+(const LaurentSymbol& a, const LaurentSymbol& b);
  friend LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b);
  LaurentSymbol scaled(double c) const;

 private:
  void trim();
  int min_ = 0;
  std::vector<double> c_{0.0};
};

// f(a(z)) as a Laurent polynomial.
LaurentSymbol compose(const Polynomial& f, const LaurentSymbol& a);
LaurentSymbol compose(const ChebyshevSeries& f, const LaurentSymbol& a);

// T(a)_{jk} = a_{j-k} and H(a)_{jk} = a_{j+k-1}, 1-based, size x size.
Eigen::MatrixXd toeplitz_matrix(const LaurentSymbol& a, int size);
Eigen::MatrixXd hankel_matrix(const LaurentSymbol& a, int size);

using LayerFunction = std::variant<Polynomial, ChebyshevSeries>;

int layer_degree(const LayerFunction& f);
double layer_eval(const LayerFunction& f, double x);

// x -> f(m, x) per layer at times t_1 < ... < t_N, each multiplied by weights[m].
struct LayeredStatistic {
  std::vector<LayerFunction> layers;
  std::vector<double> times;
  std::vector<double> weights;  // empty means all ones

  static LayeredStatistic same_polynomial(const Polynomial& f, std::vector<double> times);
  // Riemann-weighted statistic for growing N: layer m is (t_{m+1} - t_m) g(t_m, .),
  // with t_{N+1} = end.
  static LayeredStatistic riemann(const std::vector<LayerFunction>& g_layers,
                                  std::vector<double> times, double end);

  int size() const { return static_cast<int>(layers.size()); }
  double weight(int m) const { return weights.empty() ? 1.0 : weights[m]; }
  int max_degree() const;
  void validate() const;
  // N * sum (t_{m+1} - t_m)^2 for a grid ending at `end`
  double grid_regularity(double end) const;
};

// [z^k] f(a(z)) by exact symbolic composition.
double fourier_coeff(const Polynomial& f, const LaurentSymbol& a, int k);

// (1/pi) int_0^pi f(a0 + 2 a1 cos th) cos(k th) dth on quad_order Chebyshev nodes.
double chebyshev_coeff(const std::function<double(double)>& f, double a0, double a1, int k,
                       int quad_order);
// All coefficients k = 0..kmax at once.
std::vector<double> chebyshev_coeffs(const std::function<double(double)>& f, double a0, double a1,
                                     int kmax, int quad_order);

struct LayerLimit {
  double a0 = 0.0, a1 = 1.0, tau = 0.0;
};

struct VarianceBreakdown {
  double sigma2 = 0.0;             // symmetric form
  double sigma2_asymmetric = 0.0;  // sum over ordered layer pairs with f_k = e^{-tau k} fhat_k
  std::vector<double> per_k_terms; // index k-1
  int series_K = 0;
};

// K <= 0 picks max(32, 2 * max degree).
VarianceBreakdown variance_fixed_N(const LayeredStatistic& stat, const std::vector<LayerLimit>& limits,
                                   int K = 0);

// Limit of the second cumulant for layer operators with arbitrary Laurent symbols.
double toeplitz_variance_limit(const std::vector<LaurentSymbol>& symbols);

// sum_{l >= 1} l a_l b_{-l} = Tr H(a) H(b~)
double hankel_product_trace(const LaurentSymbol& a, const LaurentSymbol& b);

// log det e^{T(a_1)} ... e^{T(a_N)} for symbols summing to zero.
double ehrhardt_log_det(const std::vector<LaurentSymbol>& symbols);

// Limit data along a continuous time interval for growing-N statistics.
struct GrowingLimits {
  std::function<double(double)> a0, a1, tau;
};

struct GrowingQuadrature {
  std::vector<double> breakpoints;  // interval [front, back]; g_k may jump at inner points
  int panels = 4;                   // panels between consecutive breakpoints
  int order = 32;
  int K = 32;
};

struct GrowingVariance {
  double sigma2 = 0.0;
  std::vector<double> per_k_terms;
  double last_term = 0.0;  // magnitude of the K-th term, a tail indicator
};

// sigma^2 = sum_k k iint e^{-k |tau(t1) - tau(t2)|} g_k(t1) g_k(t2), with the coefficient
// table supplied by `gk(t)` returning g_1..g_K at time t.
GrowingVariance variance_growing(const std::function<std::vector<double>(double)>& gk,
                                 const std::function<double(double)>& tau,
                                 const GrowingQuadrature& quad);

// Convenience: g(t, x) given as a callable, coefficients by chebyshev_coeffs.
GrowingVariance variance_growing(const std::function<double(double, double)>& g,
                                 const GrowingLimits& limits, const GrowingQuadrature& quad,
                                 int cheb_order = 128);

// Symmetric variance via the frequency-domain form; a cross-check for variance_fixed_N.
double variance_fixed_N_frequency(const LayeredStatistic& stat, const std::vector<LayerLimit>& limits,
                                  int K = 0);

}  // namespace mtclt
