#include <doctest.h>

#include <cmath>
#include <random>

#include "mtclt/banded.hpp"
#include "mtclt/symbols.hpp"

using namespace mtclt;

namespace {

LaurentSymbol random_symbol(std::mt19937_64& rng, int q, int p) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(q + p + 1);
  for (auto& x : c) x = u(rng);
  return LaurentSymbol(-q, c);
}

// log det of the n x n principal block of e^{T(a_1)} ... e^{T(a_N)} from a larger truncation
double dense_log_det(const std::vector<LaurentSymbol>& syms, int n, int margin) {
  const int S = n + margin;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(S, S);
  for (const auto& a : syms) P = P * expm(toeplitz_matrix(a, S));
  return std::log(P.topLeftCorner(n, n).determinant());
}

}  // namespace

TEST_CASE("laurent symbol algebra") {
  const auto a = LaurentSymbol(-1, {1.0, 2.0, 3.0});
  CHECK(a[-1] == 1.0);
  CHECK(a[0] == 2.0);
  CHECK(a[1] == 3.0);
  CHECK(a[5] == 0.0);
  CHECK(a.reversed()[1] == 1.0);
  const auto sq = a * a;
  CHECK(sq.min_power() == -2);
  CHECK(sq[0] == doctest::Approx(2 * 3 + 4));
  CHECK((a + a.scaled(-1.0)).is_zero());
  const auto t = LaurentSymbol::tridiagonal(0.5, 2.0, 0.3);
  CHECK(t[1] == doctest::Approx(2.0 * std::exp(-0.3)));
  CHECK(t[-1] == doctest::Approx(2.0 * std::exp(0.3)));
  CHECK(t[0] == 0.5);
}

TEST_CASE("fourier coefficients by exact composition") {
  const auto s = LaurentSymbol::tridiagonal(0.0, 1.0);
  const Polynomial x({0, 1}), x2({0, 0, 1});
  CHECK(fourier_coeff(x, s, 1) == 1.0);
  CHECK(fourier_coeff(x, s, -1) == 1.0);
  CHECK(fourier_coeff(x, s, 0) == 0.0);
  CHECK(fourier_coeff(x, s, 2) == 0.0);
  CHECK(fourier_coeff(x2, s, 2) == 1.0);
  CHECK(fourier_coeff(x2, s, -2) == 1.0);
  CHECK(fourier_coeff(x2, s, 0) == 2.0);
  const auto g = LaurentSymbol::tridiagonal(0.7, 1.3);
  CHECK(fourier_coeff(x, g, 0) == doctest::Approx(0.7));
  CHECK(fourier_coeff(x, g, 1) == doctest::Approx(1.3));
  CHECK(fourier_coeff(x, g, -1) == doctest::Approx(1.3));
}

TEST_CASE("chebyshev coefficients") {
  auto c = chebyshev_coeffs([](double x) { return x; }, 0.4, 1.7, 5, 16);
  CHECK(c[0] == doctest::Approx(0.4));
  CHECK(c[1] == doctest::Approx(1.7));
  for (int k = 2; k <= 5; ++k) CHECK(std::abs(c[k]) < 1e-14);
  c = chebyshev_coeffs([](double) { return 1.0; }, 0.0, 1.0, 4, 8);
  CHECK(c[0] == doctest::Approx(1.0));
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(c[k]) < 1e-15);
  c = chebyshev_coeffs([](double x) { return x * x; }, 0.0, 1.0, 4, 8);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[2] == doctest::Approx(1.0));
  CHECK(std::abs(c[1]) < 1e-14);
  const auto f = [](double x) { return std::exp(0.3 * x); };
  CHECK(chebyshev_coeff(f, 0.1, 0.8, 3, 32) == chebyshev_coeff(f, 0.1, 0.8, -3, 32));
  CHECK_THROWS(chebyshev_coeff(f, 0.0, -1.0, 1, 8));
}

TEST_CASE("fourier and chebyshev coefficients agree after weight conjugation") {
  const Polynomial f({0.2, -1.0, 0.3, 0.5, -0.25});
  const double a0 = 0.6, a1 = 0.9;
  for (double tau : {0.0, 0.4, -0.7}) {
    const auto s = LaurentSymbol::tridiagonal(a0, a1, tau);
    const auto fh = chebyshev_coeffs([&](double x) { return f(x); }, a0, a1, 6, 16);
    for (int k = -5; k <= 5; ++k)
      CHECK(fourier_coeff(f, s, k) ==
            doctest::Approx(std::exp(-tau * k) * fh[std::abs(k)]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("fixed-N variance worked examples") {
  auto one = LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0});
  auto v = variance_fixed_N(one, {{0.0, 1.0, 0.0}});
  CHECK(v.sigma2 == doctest::Approx(1.0));
  CHECK(v.series_K == 32);
  CHECK(v.per_k_terms.size() == 32);

  const double tau = 0.5;
  auto two = LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, tau});
  v = variance_fixed_N(two, {{0.0, 1.0, 0.0}, {0.0, 1.0, tau}});
  CHECK(v.sigma2 == doctest::Approx(2 + 2 * std::exp(-tau)));
  CHECK(v.sigma2_asymmetric == doctest::Approx(v.sigma2));

  auto c = LayeredStatistic::same_polynomial(Polynomial({3.0}), {0.0});
  CHECK(variance_fixed_N(c, {{0.0, 1.0, 0.0}}).sigma2 == 0.0);

  // x^2 at a single time: fhat_2 = a1^2, fhat_1 = 2 a0 a1
  auto sq = LayeredStatistic::same_polynomial(Polynomial({0, 0, 1}), {0.0});
  CHECK(variance_fixed_N(sq, {{0.5, 1.0, 0.0}}).sigma2 == doctest::Approx(1.0 * 1.0 + 2.0 * 1.0));

  CHECK_THROWS(variance_fixed_N(two, {{0.0, 1.0, 0.5}, {0.0, 1.0, 0.5}}));
  CHECK_THROWS(variance_fixed_N(two, {{0.0, 1.0, 0.0}}));
}

TEST_CASE("variance is nonnegative and the two forms agree on random statistics") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int N = 1 + trial % 4;
    LayeredStatistic st;
    std::vector<LayerLimit> lim;
    double tau = u(rng);
    for (int m = 0; m < N; ++m) {
      std::vector<double> c(1 + trial % 5);
      for (auto& x : c) x = u(rng);
      st.layers.emplace_back(Polynomial(c));
      st.times.push_back(tau);
      lim.push_back({u(rng), 0.5 + std::abs(u(rng)), tau});
      tau += 0.05 + std::abs(u(rng));
    }
    const auto v = variance_fixed_N(st, lim);
    CHECK(v.sigma2 >= 0.0);
    CHECK(v.sigma2_asymmetric == doctest::Approx(v.sigma2).epsilon(1e-9));
  }
}

TEST_CASE("frequency-domain form cross-checks the time-domain form") {
  LayeredStatistic st;
  st.layers = {Polynomial({0, 1, 0.5}), Polynomial({0, -0.3, 0, 0.2}), Polynomial({1, 0.7})};
  st.times = {0.0, 0.3, 1.1};
  const std::vector<LayerLimit> lim = {{0.1, 1.0, 0.0}, {0.0, 0.8, 0.3}, {-0.2, 1.2, 1.1}};
  const double t = variance_fixed_N(st, lim).sigma2;
  CHECK(variance_fixed_N_frequency(st, lim) == doctest::Approx(t).epsilon(1e-6));
}

TEST_CASE("chebyshev-series layers behave like their polynomial") {
  const Polynomial p({0.1, 0.4, -0.2, 0.3});
  const auto c = ChebyshevSeries::interpolate([&](double x) { return p(x); }, -3.0, 3.0, 6);
  const auto s = LaurentSymbol::tridiagonal(0.2, 0.9, 0.4);
  const auto a = compose(p, s), b = compose(c, s);
  for (int k = -3; k <= 3; ++k) CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-12).scale(1.0));
  LayeredStatistic sp, sc;
  sp.layers = {p, p};
  sc.layers = {c, c};
  sp.times = sc.times = {0.0, 0.4};
  const std::vector<LayerLimit> lim = {{0.2, 0.9, 0.0}, {0.2, 0.9, 0.4}};
  CHECK(variance_fixed_N(sc, lim).sigma2 == doctest::Approx(variance_fixed_N(sp, lim).sigma2).epsilon(1e-12));
}

TEST_CASE("hankel product traces") {
  const auto s = LaurentSymbol::tridiagonal(0.0, 1.0);
  CHECK(hankel_product_trace(s, s) == 1.0);
  CHECK(hankel_product_trace(LaurentSymbol(2, {1.0}), LaurentSymbol(-2, {1.0})) == 2.0);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_symbol(rng, 3, 3), b = random_symbol(rng, 3, 3);
    const double dense = (hankel_matrix(a, 6) * hankel_matrix(b.reversed(), 6)).trace();
    CHECK(hankel_product_trace(a, b) == doctest::Approx(dense).epsilon(1e-13));
  }
}

TEST_CASE("ehrhardt log determinant") {
  const auto a = LaurentSymbol(0, {0.0, 0.7}).scaled(1.0);
  CHECK(ehrhardt_log_det({a, a.scaled(-1.0)}) == 0.0);
  CHECK(ehrhardt_log_det({LaurentSymbol(), LaurentSymbol()}) == 0.0);
  CHECK_THROWS(ehrhardt_log_det({a}));

  const std::vector<LaurentSymbol> ex = {LaurentSymbol(1, {1.0}), LaurentSymbol(-1, {1.0}),
                                         LaurentSymbol(-1, {-1.0, 0.0, -1.0})};
  CHECK(ehrhardt_log_det(ex) == doctest::Approx(dense_log_det(ex, 400, 80)).epsilon(1e-8).scale(1.0));

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const auto x = random_symbol(rng, 2, 3), y = random_symbol(rng, 3, 1);
    const auto z = (x + y).scaled(-1.0);
    const std::vector<LaurentSymbol> sy = {x, y, z};
    CHECK(ehrhardt_log_det(sy) == doctest::Approx(dense_log_det(sy, 200, 80)).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("toeplitz variance limit") {
  const auto s = LaurentSymbol::tridiagonal(0.0, 1.0);
  CHECK(toeplitz_variance_limit({s}) == doctest::Approx(1.0));
  // disjoint frequencies: no cross terms
  const auto p = LaurentSymbol(-1, {1.0, 0.0, 1.0}), q = LaurentSymbol(-2, {1.0, 0, 0, 0, 1.0});
  CHECK(toeplitz_variance_limit({p, q}) ==
        doctest::Approx(toeplitz_variance_limit({p}) + toeplitz_variance_limit({q})));
  const double tau = 0.8;
  const auto s1 = LaurentSymbol::tridiagonal(0.0, 1.0, 0.0), s2 = LaurentSymbol::tridiagonal(0.0, 1.0, tau);
  CHECK(toeplitz_variance_limit({s1, s2}) == doctest::Approx(2 + 2 * std::exp(-tau)));
}

TEST_CASE("growing-N variance") {
  GrowingLimits lim{[](double) { return 0.0; }, [](double) { return 1.0; }, [](double t) { return t; }};
  GrowingQuadrature q;
  q.breakpoints = {0.0, 2.0};
  q.K = 8;
  auto v = variance_growing([](double, double x) { return x; }, lim, q, 16);
  CHECK(v.sigma2 == doctest::Approx(2 * (2.0 - 1 + std::exp(-2.0))).epsilon(1e-12));
  CHECK(variance_growing([](double, double) { return 1.0; }, lim, q, 16).sigma2 == doctest::Approx(0.0).scale(1.0));
  q.breakpoints = {0.5, 0.5};
  CHECK(variance_growing([](double, double x) { return x; }, lim, q, 16).sigma2 == 0.0);
}

TEST_CASE("Riemann statistics converge to the growing-N variance") {
  // g(t, x) = (1 + t) x + t x^2 on [0, 1] with HermiteOU limits
  auto g = [](double t, double x) { return (1 + t) * x + t * x * x; };
  GrowingLimits lim{[](double) { return 0.0; }, [](double) { return 1.0; }, [](double t) { return t; }};
  GrowingQuadrature q;
  q.breakpoints = {0.0, 1.0};
  q.K = 8;
  const double target = variance_growing(g, lim, q, 16).sigma2;
  double prev = INFINITY;
  for (int N : {4, 16, 64}) {
    std::vector<LayerFunction> layers;
    std::vector<double> times;
    std::vector<LayerLimit> ll;
    for (int m = 0; m < N; ++m) {
      const double t = static_cast<double>(m) / N;
      layers.emplace_back(Polynomial({0, 1 + t, t}));
      times.push_back(t);
      ll.push_back({0.0, 1.0, t});
    }
    const auto st = LayeredStatistic::riemann(layers, times, 1.0);
    CHECK(st.grid_regularity(1.0) == doctest::Approx(1.0));
    const double err = std::abs(variance_fixed_N(st, ll).sigma2 - target);
    CHECK(err < 0.3 * prev);  // first order in the mesh
    prev = err;
  }
  CHECK(prev < 3e-2);
}
