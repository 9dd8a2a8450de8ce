#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mtclt/gff.hpp"
#include "mtclt/quadrature.hpp"

using namespace mtclt;

namespace {

constexpr double kPi = std::numbers::pi;

TestFunctionPhi zero_phi() {
  TestFunctionPhi z;
  z.phi = [](double, double) { return 0.0; };
  z.laplacian = [](double, double) { return 0.0; };
  z.tau_lo = 0.2;
  z.tau_hi = 0.8;
  z.theta_lo = 0.5;
  z.theta_hi = 2.5;
  return z;
}

}  // namespace

TEST_CASE("coordinate maps are mutually inverse") {
  const auto g = GffGeometry::hermite_ou(0.0, 1.0);
  for (double t = 0.05; t < 1.0; t += 0.1)
    for (double x = -1.95; x < 2.0; x += 0.15) {
      const auto [tau, th] = g.to_domain(t, x);
      const auto [t2, x2] = g.from_domain(tau, th);
      CHECK(std::abs(t2 - t) < 1e-12);
      CHECK(std::abs(x2 - x) < 1e-12);
    }
}

TEST_CASE("dirichlet norm") {
  CHECK(dirichlet_norm(zero_phi()) == 0.0);
  const double T = 1.5;
  TestFunctionPhi s;
  s.phi = [T](double tau, double th) { return std::sin(kPi * tau / T) * std::sin(th); };
  s.tau_lo = 0;
  s.tau_hi = T;
  s.theta_lo = 0;
  s.theta_hi = kPi;
  const double exact = kPi * (kPi * kPi / (T * T) + 1.0) * (T / 2) * (kPi / 2);
  CHECK(dirichlet_norm(s) == doctest::Approx(exact).epsilon(1e-7));

  const auto b = product_bump(0.5, 0.3, 1.4, 0.8);
  CHECK(dirichlet_norm(b.scaled(-2.5)) == doctest::Approx(6.25 * dirichlet_norm(b)).epsilon(1e-12));
}

TEST_CASE("product bump derivatives match finite differences") {
  const auto b = product_bump(0.5, 0.3, 1.4, 0.8, 1.7, 3);
  TestFunctionPhi fd = b;
  fd.laplacian = nullptr;
  fd.d_tau = nullptr;
  fd.d_theta = nullptr;
  for (double tau : {0.31, 0.5, 0.66})
    for (double th : {0.9, 1.3, 2.0}) {
      CHECK(fd.lap(tau, th) == doctest::Approx(b.lap(tau, th)).epsilon(1e-5).scale(1.0));
      CHECK(fd.grad_tau(tau, th) == doctest::Approx(b.grad_tau(tau, th)).epsilon(1e-7).scale(1.0));
      CHECK(fd.grad_theta(tau, th) == doctest::Approx(b.grad_theta(tau, th)).epsilon(1e-7).scale(1.0));
    }
  CHECK(b.phi(0.85, 1.4) == 0.0);
  CHECK_THROWS(product_bump(0.5, 0.3, 1.4, 0.8, 1.0, 2));
}

TEST_CASE("g from phi") {
  const auto geom = GffGeometry::hermite_ou(0.0, 1.0);
  const auto gz = g_from_phi(zero_phi(), geom, 0.5);
  for (double x = -2; x <= 2; x += 0.5) CHECK(gz(x) == 0.0);

  const auto b = product_bump(0.5, 0.3, 1.4, 0.8);
  const auto g = g_from_phi(b, geom, 0.45);
  CHECK(g(-2.0) == 0.0);

  // k g_k = tau' int_0^pi lap phi(tau, theta) sin(k theta) d theta after integration by parts
  const auto gk = g_coefficients(b, geom, 0.45, 12, 256);
  // the Laplacian vanishes outside the support, so integrate over it exactly
  const auto rule = gauss_legendre_panels({b.theta_lo, b.theta_hi}, 32, 16);
  std::vector<double> direct(13, 0.0);
  double scale = 0;
  for (int k = 1; k <= 12; ++k) {
    for (size_t i = 0; i < rule.nodes.size(); ++i)
      direct[k] += rule.weights[i] * b.lap(0.45, rule.nodes[i]) * std::sin(k * rule.nodes[i]);
    scale = std::max(scale, std::abs(direct[k]));
  }
  // the cosine transform of g carries a small aliasing error from the finite smoothness of the bump
  for (int k = 1; k <= 12; ++k) CHECK(std::abs(k * gk[k] - direct[k]) < 1e-7 * scale);
}

TEST_CASE("variance identity") {
  const auto geom = GffGeometry::hermite_ou(0.0, 1.0);
  CHECK(sigma_from_phi(zero_phi(), geom).sigma2 == doctest::Approx(0.0).scale(1.0));
  const auto b = product_bump(0.5, 0.4, 1.3, 0.9);
  const auto s = sigma_from_phi(b, geom);
  const double d = dirichlet_norm(b);
  CHECK(s.sigma2 > 0);
  CHECK(std::abs(s.sigma2 - d) / d < 1e-3);
  CHECK(s.last_term < 1e-6 * s.sigma2);
  CHECK(sigma_from_phi(b.scaled(3.0), geom).sigma2 == doctest::Approx(9.0 * s.sigma2).epsilon(1e-12));
}
