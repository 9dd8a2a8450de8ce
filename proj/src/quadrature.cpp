#include "mtclt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mtclt {

namespace {

QuadratureRule reference_rule(int order) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  QuadratureRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    r.weights[i] = r.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) r.nodes[order / 2] = 0.0;
  cache[order] = r;
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  QuadratureRule r = reference_rule(order);
  const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = m + h * r.nodes[i];
    r.weights[i] *= h;
  }
  return r;
}

QuadratureRule gauss_legendre_panels(const std::vector<double>& breakpoints, int panels, int order) {
  if (breakpoints.size() < 2) throw std::invalid_argument("need at least two breakpoints");
  if (panels < 1) throw std::invalid_argument("need at least one panel");
  QuadratureRule out;
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    for (int p = 0; p < panels; ++p) {
      auto r = gauss_legendre(order, a + (b - a) * p / panels, a + (b - a) * (p + 1) / panels);
      out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
      out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    }
  }
  return out;
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double pairwise_sum(const double* x, long n) {
  if (n <= 8) {
    double s = 0.0;
    for (long i = 0; i < n; ++i) s += x[i];
    return s;
  }
  long h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace mtclt
