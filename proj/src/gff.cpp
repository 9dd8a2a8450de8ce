#include "mtclt/gff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtclt/quadrature.hpp"

namespace mtclt {

namespace {

constexpr double kPi = std::numbers::pi;

// f'(0) by central differences with one Richardson step
double derivative(const std::function<double(double)>& f, double h = 1e-4) {
  auto d = [&](double s) { return (f(s) - f(-s)) / (2.0 * s); };
  return (4.0 * d(0.5 * h) - d(h)) / 3.0;
}

double integrate(const std::function<double(double)>& f, double lo, double hi, int panels, int order) {
  if (!(hi > lo)) return 0.0;
  const auto r = gauss_legendre_panels({lo, hi}, panels, order);
  double s = 0.0;
  for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(r.nodes[i]);
  return s;
}

}  // namespace

GffGeometry GffGeometry::hermite_ou(double alpha, double beta) {
  GffGeometry g;
  g.a0 = [](double) { return 0.0; };
  g.a1 = [](double) { return 1.0; };
  g.tau = [](double t) { return t; };
  g.tau_inverse = [](double s) { return s; };
  g.tau_prime = [](double) { return 1.0; };
  g.alpha = alpha;
  g.beta = beta;
  return g;
}

std::pair<double, double> GffGeometry::to_domain(double t, double x) const {
  const double u = std::clamp((x - a0(t)) / (2.0 * a1(t)), -1.0, 1.0);
  return {tau(t), std::acos(u)};
}

std::pair<double, double> GffGeometry::from_domain(double tau_value, double theta) const {
  const double t = tau_inverse(tau_value);
  return {t, a0(t) + 2.0 * a1(t) * std::cos(theta)};
}

double TestFunctionPhi::lap(double tau, double theta) const {
  if (laplacian) return laplacian(tau, theta);
  auto five = [&](double h) {
    return (phi(tau + h, theta) + phi(tau - h, theta) + phi(tau, theta + h) + phi(tau, theta - h) -
            4.0 * phi(tau, theta)) / (h * h);
  };
  const double h = 1e-4;
  return (4.0 * five(0.5 * h) - five(h)) / 3.0;
}

double TestFunctionPhi::grad_tau(double tau, double theta) const {
  if (d_tau) return d_tau(tau, theta);
  return derivative([&](double s) { return phi(tau + s, theta); });
}

double TestFunctionPhi::grad_theta(double tau, double theta) const {
  if (d_theta) return d_theta(tau, theta);
  return derivative([&](double s) { return phi(tau, theta + s); });
}

TestFunctionPhi TestFunctionPhi::scaled(double c) const {
  TestFunctionPhi o = *this;
  auto wrap = [c](const std::function<double(double, double)>& f) -> std::function<double(double, double)> {
    if (!f) return {};
    return [f, c](double a, double b) { return c * f(a, b); };
  };
  o.phi = wrap(phi);
  o.laplacian = wrap(laplacian);
  o.d_tau = wrap(d_tau);
  o.d_theta = wrap(d_theta);
  return o;
}

TestFunctionPhi product_bump(double tc, double rt, double sc, double rs, double amp, int power) {
  if (power < 3) throw std::invalid_argument("product_bump: power must be >= 3 for a C^2 bump");
  if (!(rt > 0 && rs > 0)) throw std::invalid_argument("product_bump: radii must be positive");
  if (sc - rs < 0.0 || sc + rs > kPi) throw std::invalid_argument("product_bump: theta support must lie in [0, pi]");
  const int q = power;
  auto b = [q](double u) { return std::abs(u) < 1 ? std::pow(1 - u * u, q) : 0.0; };
  auto b1 = [q](double u) { return std::abs(u) < 1 ? -2.0 * q * u * std::pow(1 - u * u, q - 1) : 0.0; };
  auto b2 = [q](double u) {
    if (std::abs(u) >= 1) return 0.0;
    const double w = 1 - u * u;
    return -2.0 * q * std::pow(w, q - 1) + 4.0 * q * (q - 1) * u * u * std::pow(w, q - 2);
  };
  TestFunctionPhi p;
  p.phi = [=](double t, double s) { return amp * b((t - tc) / rt) * b((s - sc) / rs); };
  p.d_tau = [=](double t, double s) { return amp * b1((t - tc) / rt) / rt * b((s - sc) / rs); };
  p.d_theta = [=](double t, double s) { return amp * b((t - tc) / rt) * b1((s - sc) / rs) / rs; };
  p.laplacian = [=](double t, double s) {
    const double u = (t - tc) / rt, v = (s - sc) / rs;
    return amp * (b2(u) * b(v) / (rt * rt) + b(u) * b2(v) / (rs * rs));
  };
  p.tau_lo = tc - rt;
  p.tau_hi = tc + rt;
  p.theta_lo = sc - rs;
  p.theta_hi = sc + rs;
  return p;
}

double dirichlet_norm(const TestFunctionPhi& phi, int order) {
  if (!(phi.theta_lo >= 0.0 && phi.theta_hi <= kPi && phi.theta_hi > phi.theta_lo && phi.tau_hi > phi.tau_lo))
    throw std::invalid_argument("dirichlet_norm: support box must lie inside the domain");
  auto value = [&](int panels) {
    const auto rt = gauss_legendre_panels({phi.tau_lo, phi.tau_hi}, panels, order);
    const auto rs = gauss_legendre_panels({phi.theta_lo, phi.theta_hi}, panels, order);
    CompensatedSum s;
    for (size_t i = 0; i < rt.nodes.size(); ++i)
      for (size_t j = 0; j < rs.nodes.size(); ++j) {
        const double gt = phi.grad_tau(rt.nodes[i], rs.nodes[j]);
        const double gs = phi.grad_theta(rt.nodes[i], rs.nodes[j]);
        s.add(rt.weights[i] * rs.weights[j] * (gt * gt + gs * gs));
      }
    return kPi * s.value();
  };
  double prev = value(2);
  for (int panels = 4; panels <= 128; panels *= 2) {
    const double cur = value(panels);
    if (std::abs(cur - prev) <= 1e-6 * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  throw std::runtime_error("dirichlet_norm: refinement did not converge");
}

std::function<double(double)> g_from_phi(const TestFunctionPhi& phi, const GffGeometry& geom, double t) {
  if (t < geom.alpha || t > geom.beta) throw std::invalid_argument("g_from_phi: t outside the interval");
  const double tv = geom.tau(t), tp = geom.tau_prime(t);
  return [phi, geom, t, tv, tp](double x) {
    const double theta = geom.to_domain(t, x).second;
    const double lo = std::max(theta, phi.theta_lo);
    if (tv <= phi.tau_lo || tv >= phi.tau_hi) return 0.0;
    return kPi * tp * integrate([&](double s) { return phi.lap(tv, s); }, lo, phi.theta_hi, 8, 16);
  };
}

std::vector<double> g_coefficients(const TestFunctionPhi& phi, const GffGeometry& geom, double t, int K,
                                   int quad) {
  std::vector<double> out(K + 1, 0.0);
  const double tv = geom.tau(t);
  if (tv <= phi.tau_lo || tv >= phi.tau_hi) return out;
  const double tp = geom.tau_prime(t);
  // nodes theta_j = pi (j + 1/2) / quad, integrate from pi downwards cumulatively
  std::vector<double> g(quad);
  double acc = 0.0, upper = kPi;
  const auto rule = gauss_legendre(16);
  for (int j = quad - 1; j >= 0; --j) {
    const double th = kPi * (j + 0.5) / quad;
    const double lo = std::max(th, phi.theta_lo), hi = std::min(upper, phi.theta_hi);
    if (hi > lo) {
      const double h = 0.5 * (hi - lo), m = 0.5 * (hi + lo);
      for (int i = 0; i < 16; ++i) acc += h * rule.weights[i] * phi.lap(tv, m + h * rule.nodes[i]);
    }
    upper = th;
    g[j] = kPi * tp * acc;
  }
  for (int j = 0; j < quad; ++j) {
    const double th = kPi * (j + 0.5) / quad;
    for (int k = 0; k <= K; ++k) out[k] += g[j] * std::cos(k * th) / quad;
  }
  return out;
}

SigmaReport sigma_from_phi(const TestFunctionPhi& phi, const GffGeometry& geom, int K, int quad) {
  SigmaReport rep;
  const double lo = std::max(geom.alpha, geom.tau_inverse(phi.tau_lo));
  const double hi = std::min(geom.beta, geom.tau_inverse(phi.tau_hi));
  rep.per_k_terms.assign(K, 0.0);
  if (!(hi > lo)) return rep;
  GrowingQuadrature q;
  q.breakpoints = {lo, hi};
  q.panels = 4;
  q.order = quad;
  q.K = K;
  const int cheb = std::max(4 * K, 256);
  auto gk = [&](double t) {
    auto c = g_coefficients(phi, geom, t, K, cheb);
    return std::vector<double>(c.begin() + 1, c.end());
  };
  const auto v = variance_growing(gk, geom.tau, q);
  rep.sigma2 = v.sigma2;
  rep.last_term = v.last_term;
  rep.per_k_terms = v.per_k_terms;
  return rep;
}

}  // namespace mtclt
