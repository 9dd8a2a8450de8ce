#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mtclt/symbols.hpp"

namespace mtclt {

struct GffGeometry {
  std::function<double(double)> a0, a1, tau, tau_inverse, tau_prime;
  double alpha = 0.0, beta = 1.0;  // time interval I

  // a0 = 0, a1 = 1, tau(t) = t
  static GffGeometry hermite_ou(double alpha, double beta);

  // (t, x) -> (tau, theta) with theta = arccos((x - a0) / (2 a1))
  std::pair<double, double> to_domain(double t, double x) const;
  std::pair<double, double> from_domain(double tau_value, double theta) const;
};

struct TestFunctionPhi {
  std::function<double(double, double)> phi;
  std::function<double(double, double)> laplacian;   // optional; finite differences otherwise
  std::function<double(double, double)> d_tau, d_theta;  // optional; central differences otherwise
  double tau_lo = 0, tau_hi = 1, theta_lo = 0, theta_hi = 3.141592653589793;  // support box

  double lap(double tau, double theta) const;
  double grad_tau(double tau, double theta) const;
  double grad_theta(double tau, double theta) const;
  TestFunctionPhi scaled(double c) const;
};

// amplitude * b((tau - tau_c) / r_tau) * b((theta - theta_c) / r_theta), b(u) = (1 - u^2)^power on
// |u| < 1. power >= 3 makes it C^2 with a continuous analytic Laplacian.
TestFunctionPhi product_bump(double tau_c, double r_tau, double theta_c, double r_theta, double amplitude = 1.0,
                             int power = 4);

// pi iint |grad phi|^2 over the support box; refines until doubling changes < 1e-6.
double dirichlet_norm(const TestFunctionPhi& phi, int order = 16);

// x -> g(t, x) = pi tau'(t) int_theta^pi lap phi(tau(t), s) ds, theta = theta(t, x)
std::function<double(double)> g_from_phi(const TestFunctionPhi& phi, const GffGeometry& geom, double t);

// g_0..g_K of g(t, .) with respect to a0(t), a1(t), on quad Chebyshev nodes
std::vector<double> g_coefficients(const TestFunctionPhi& phi, const GffGeometry& geom, double t, int K,
                                   int quad);

struct SigmaReport {
  double sigma2 = 0.0;
  double last_term = 0.0;
  std::vector<double> per_k_terms;
};

SigmaReport sigma_from_phi(const TestFunctionPhi& phi, const GffGeometry& geom, int K = 64, int quad = 64);

}  // namespace mtclt
