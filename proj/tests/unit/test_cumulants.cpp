#include <doctest.h>

#include <cmath>
#include <random>

#include "mtclt/cumulants.hpp"
#include "mtclt/dpp.hpp"
#include "mtclt/ensembles.hpp"

using namespace mtclt;

namespace {

EnsembleSpec make(Family f, int n) {
  EnsembleSpec s;
  s.family = f;
  s.n = n;
  switch (f) {
    case Family::LaguerreSquaredOU: s.r = 0.5; break;
    case Family::JacobiDiffusion: s.alpha = 0.5; s.beta = 1.5; break;
    case Family::Meixner: s.gamma = 1.5; s.mu = 0.3; break;
    case Family::CharlierEdge:
    case Family::CharlierBulk: s.mu = 0.7; break;
    case Family::Krawtchouk: s.p = 0.3; s.gamma = 2.5; break;
    default: break;
  }
  return s;
}

CumulantRequest request(const EnsembleSpec& e, const std::vector<double>& times, const LayeredStatistic& st,
                        int k_max = 4) {
  CumulantRequest r;
  r.stat = st;
  r.n = e.n;
  r.k_max = k_max;
  const int S = required_truncation(e.n, k_max, st);
  for (double t : times) r.J_list.push_back(weighted_recurrence(e, t, S));
  return r;
}

double prediction(const EnsembleSpec& e, const std::vector<double>& times, const LayeredStatistic& st) {
  std::vector<LayerLimit> lim;
  for (double t : times) {
    const auto d = limit_symbol(e, t);
    lim.push_back({d.a0, d.a1, d.tau});
  }
  LayeredStatistic s = st;
  for (size_t m = 0; m < times.size(); ++m) s.times[m] = lim[m].tau;
  return variance_fixed_N(s, lim).sigma2;
}

}  // namespace

TEST_CASE("moment generating determinant worked examples") {
  const auto e = make(Family::HermiteOU, 6);
  auto r = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0}));
  CHECK(moment_generating_det(r, 0.0).value() == doctest::Approx(1.0));

  r.stat = LayeredStatistic::same_polynomial(Polynomial({0.7}), {0.0});
  CHECK(moment_generating_det(r, 0.4).log_abs == doctest::Approx(0.4 * 0.7 * 6));

  // one particle on {0, 1} with equal weights: E e^{lam x} = (1 + e^lam) / 2
  const auto ope = DiscreteOPE::build({0.0, 1.0}, {0.5, 0.5}, 1);
  CumulantRequest two;
  two.J_list = {ope.jacobi()};
  two.stat = LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0});
  two.n = 1;
  CHECK(moment_generating_det(two, 0.3).value() == doctest::Approx(0.5 * (1 + std::exp(0.3))).epsilon(1e-13));
}

TEST_CASE("contour cumulants worked examples") {
  auto e = make(Family::HermiteOU, 40);
  auto r = request(e, {0.0, 0.5}, LayeredStatistic{{Polynomial({1.5}), Polynomial({-0.25})}, {0.0, 0.5}, {}});
  const auto c = cumulants_contour(r);
  CHECK(c.values.at(1) == doctest::Approx(40 * 1.25));
  for (int k = 2; k <= 4; ++k) CHECK(std::abs(c.values.at(k)) < 1e-10);
  CHECK(c.method == CumulantMethod::contour_full);
  CHECK(c.truncation == r.J_list[0].dim());
  CHECK(c.radius > 0);

  e = make(Family::HermiteOU, 500);
  r = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0}));
  auto x = cumulants_contour(r);
  CHECK(x.values.at(2) == doctest::Approx(1.0).epsilon(2e-2));
  CHECK(x.residual < 1e-8);
  r = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 0, 1}), {0.0}));
  x = cumulants_contour(r);
  CHECK(x.values.at(2) == doctest::Approx(2.0).epsilon(5e-2 / 2));
  CHECK(std::abs(x.values.at(3)) < 5e-2);
  CHECK(std::abs(x.values.at(4)) < 5e-2);
}

TEST_CASE("request validation") {
  const auto e = make(Family::HermiteOU, 20);
  auto r = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0}));
  auto bad = r;
  bad.k_max = 7;
  bad.quad_points = 64;
  CHECK_THROWS_AS(cumulants_contour(bad), std::invalid_argument);
  bad = r;
  bad.quad_points = 16;
  CHECK_THROWS_AS(cumulants_contour(bad), std::invalid_argument);
  bad = r;
  bad.radius = 10.0;
  CHECK_THROWS_AS(cumulants_contour(bad), std::invalid_argument);
  bad = r;
  bad.J_list.push_back(bad.J_list[0]);
  CHECK_THROWS_AS(cumulants_contour(bad), std::invalid_argument);
  CHECK_THROWS_WITH(cumulants_windowed(r, 1), "window principle applies to k >= 2 only");
  bad = r;
  bad.k_max = 1;
  CHECK_THROWS(cumulants_windowed_report(bad));
}

TEST_CASE("windowed equals full contour and ignores entries outside the window") {
  const auto e = make(Family::HermiteOU, 500);
  auto r = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0}));
  const double full = cumulants_contour(r).values.at(2);
  const double win = cumulants_windowed(r, 2);
  CHECK(win == doctest::Approx(full).epsilon(1e-8));

  const auto rep = cumulants_windowed_report(r);
  CHECK(rep.values.count(1) == 0);
  CHECK(rep.window == comparison_window(layer_operators(r.J_list, r.stat), r.k_max));
  CHECK(rep.window == 2 * 1 * (4 + 1));

  auto far = r;
  far.J_list[0].add(5, 5, 10.0);
  CHECK(cumulants_windowed(far, 2) == win);
  auto near = r;
  near.J_list[0].add(500, 500, 0.1);
  CHECK(cumulants_windowed(near, 2) != win);
}

TEST_CASE("composition series") {
  const auto e = make(Family::HermiteOU, 300);
  auto r = request(e, {0.0, 0.4}, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, 0.4}));
  CHECK(composition_series_C2(r.J_list, r.stat, r.n) == doctest::Approx(cumulants_windowed(r, 2)).epsilon(1e-10));
  CHECK(composition_series_C2(r.J_list, LayeredStatistic::same_polynomial(Polynomial({2.0}), {0.0, 0.4}), r.n) ==
        doctest::Approx(0.0).scale(1.0));

  // two identical layers double the statistic
  auto one = request(e, {0.0}, LayeredStatistic::same_polynomial(Polynomial({0, 1, 0.3}), {0.0}));
  const double c1 = composition_series_C2(one.J_list, one.stat, one.n);
  const std::vector<BandedMatrix> same = {one.J_list[0], one.J_list[0]};
  const auto st2 = LayeredStatistic::same_polynomial(Polynomial({0, 1, 0.3}), {0.0, 1.0});
  CHECK(composition_series_C2(same, st2, one.n) == doctest::Approx(4 * c1).epsilon(1e-10));
  auto req2 = one;
  req2.J_list = same;
  req2.stat = st2;
  CHECK(cumulants_windowed(req2, 2) == doctest::Approx(4 * c1).epsilon(1e-9));
}

TEST_CASE("contour radius invariance") {
  const auto e = make(Family::HermiteOU, 200);
  auto r = request(e, {0.0, 0.3}, LayeredStatistic{{Polynomial({0, 1, 0.5}), Polynomial({0, -1, 0, 0.2})}, {0.0, 0.3}, {}});
  const auto a = cumulants_windowed_report(r);
  auto half = r;
  half.radius = 0.5 * a.radius;
  const auto b = cumulants_windowed_report(half);
  CHECK(std::abs(a.values.at(2) - b.values.at(2)) < 1e-8);
}

TEST_CASE("universality under small perturbations near the cut") {
  const auto e = make(Family::HermiteOU, 400);
  const auto st = LayeredStatistic{{Polynomial({0, 1, 0.2}), Polynomial({0, 0.5})}, {0.0, 0.5}, {}};
  const auto base = request(e, {0.0, 0.5}, st);
  const auto ops = layer_operators(base.J_list, st);
  double M = 0;
  for (const auto& A : ops) M += A.inf_norm();
  std::mt19937_64 rng(17);
  for (int k : {2, 3}) {
    const double c0 = cumulants_windowed(base, k);
    std::vector<double> diffs;
    for (double eps : {1e-6, 1e-4}) {
      std::uniform_int_distribution<int> idx(e.n - 5, e.n + 5);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      auto p = base;
      for (auto& J : p.J_list)
        for (int i = 0; i < 6; ++i) {
          const int r = idx(rng), s = r + std::uniform_int_distribution<int>(-1, 1)(rng);
          J.add(r, s, eps * u(rng));
        }
      const double d = std::abs(cumulants_windowed(p, k) - c0);
      CHECK(d <= std::pow(2.0, k + 2) * (k + 1) * std::pow(M, k) * eps);
      diffs.push_back(d);
    }
    if (k == 2) CHECK(diffs[0] < diffs[1]);
  }
}

TEST_CASE("windowed cumulants approach the Toeplitz limit for every recurrence family") {
  const std::vector<std::pair<Family, std::vector<double>>> cases = {
      {Family::HermiteOU, {0.0, 0.5}},  {Family::LaguerreSquaredOU, {0.0, 0.5}}, {Family::JacobiDiffusion, {0.0, 0.8}},
      {Family::Meixner, {0.0, 0.4}},    {Family::CharlierEdge, {0.0, 0.5}},      {Family::CharlierBulk, {0.0, 0.5}},
      {Family::Krawtchouk, {0.0, 0.3}}};
  const std::vector<Polynomial> fs = {Polynomial({0, 1}), Polynomial({0.5, -0.4, 0.3}), Polynomial({0, 0.2, 0, 0.1})};
  for (const auto& [fam, times] : cases)
    for (const auto& f : fs) {
      CAPTURE(family_name(fam));
      CAPTURE(f.degree());
      double prev = INFINITY, prev3 = INFINITY;
      for (int n : {200, 800, 3200}) {
        const auto e = make(fam, n);
        const auto st = LayeredStatistic::same_polynomial(f, times);
        const auto rq = request(e, times, st);
        const auto rep = cumulants_windowed_report(rq);
        const double err = std::abs(rep.values.at(2) - prediction(e, times, st));
        const double hi = std::max(std::abs(rep.values.at(3)), std::abs(rep.values.at(4)));
        // errors shrink at least like n^{-1/2}, down to a roundoff floor
        CHECK(err <= std::max(0.55 * prev, 1e-11));
        CHECK(hi <= std::max(0.55 * prev3, 1e-8));
        prev = err;
        prev3 = hi;
      }
      CHECK(prev < 1e-2);
      CHECK(prev3 < 0.11);
    }
}
