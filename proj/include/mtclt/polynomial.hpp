#pragma once

#include <functional>
#include <vector>

namespace mtclt {

// Polynomial in the monomial basis; coeffs[k] multiplies x^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial constant(double c);
  static Polynomial monomial(int k, double c = 1.0);

  int degree() const;  // 0 for constants, including the zero polynomial
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(int k) const;
  double operator()(double x) const;
  Polynomial derivative() const;
  Polynomial scaled(double c) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  std::vector<double> coeffs_{0.0};
};

// Truncated Chebyshev expansion sum_k c_k T_k(u), u = (2x - lo - hi) / (hi - lo).
class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(std::vector<double> coeffs, double lo, double hi);

  // Interpolates f at degree+1 Chebyshev points of the first kind.
  static ChebyshevSeries interpolate(const std::function<double(double)>& f, double lo, double hi,
                                     int degree);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double operator()(double x) const;

 private:
  std::vector<double> coeffs_{0.0};
  double lo_ = -1.0, hi_ = 1.0;
};

}  // namespace mtclt
