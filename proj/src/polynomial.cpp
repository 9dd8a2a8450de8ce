#include "mtclt/polynomial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtclt {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int k, double c) {
  if (k < 0) throw std::invalid_argument("monomial degree must be non-negative");
  std::vector<double> v(k + 1, 0.0);
  v[k] = c;
  return Polynomial(std::move(v));
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

double Polynomial::coeff(int k) const {
  return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : 0.0;
}

double Polynomial::operator()(double x) const {
  double r = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
  return r;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  std::vector<double> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(double c) const {
  auto v = coeffs_;
  for (auto& x : v) x *= c;
  return Polynomial(std::move(v));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> v(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
  for (size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
  return Polynomial(std::move(v));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<double> v(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(v));
}

ChebyshevSeries::ChebyshevSeries(std::vector<double> coeffs, double lo, double hi)
    : coeffs_(std::move(coeffs)), lo_(lo), hi_(hi) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  if (!(hi > lo)) throw std::invalid_argument("Chebyshev interval must have hi > lo");
}

ChebyshevSeries ChebyshevSeries::interpolate(const std::function<double(double)>& f, double lo,
                                             double hi, int degree) {
  if (degree < 0) throw std::invalid_argument("Chebyshev degree must be non-negative");
  const int q = degree + 1;
  std::vector<double> vals(q);
  for (int j = 0; j < q; ++j) {
    double th = std::numbers::pi * (j + 0.5) / q;
    vals[j] = f(0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(th));
  }
  std::vector<double> c(q, 0.0);
  for (int k = 0; k < q; ++k) {
    double s = 0.0;
    for (int j = 0; j < q; ++j) s += vals[j] * std::cos(k * std::numbers::pi * (j + 0.5) / q);
    c[k] = (k == 0 ? 1.0 : 2.0) * s / q;
  }
  return ChebyshevSeries(std::move(c), lo, hi);
}

double ChebyshevSeries::operator()(double x) const {
  // Clenshaw
  double u = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree(); k >= 1; --k) {
    double b0 = 2.0 * u * b1 - b2 + coeffs_[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + coeffs_[0];
}

}  // namespace mtclt
