#include <doctest.h>

#include <cmath>

#include "mtclt/montecarlo.hpp"
#include "mtclt/rng.hpp"

using namespace mtclt;

namespace {

OUBridgeConfig config(int n, std::vector<double> times, long samples, std::uint64_t seed = 1, int threads = 1) {
  OUBridgeConfig c;
  c.n = n;
  c.times = std::move(times);
  c.samples = samples;
  c.seed = seed;
  c.threads = threads;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS(config(5, {0.0, 0.0}, 10).validate());
  CHECK_THROWS(config(5, {0.0}, 1).validate());
  CHECK_THROWS(config(0, {0.0}, 10).validate());
  CHECK_NOTHROW(config(5, {0.0, 1.0}, 10).validate());
  auto c = config(5, {0.0, 1.0}, 10);
  CHECK_THROWS(run_experiment(c, LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, 2.0})));
}

TEST_CASE("k-statistics of a small data set") {
  const auto r = summarize({1, 2, 3, 4, 5, 9, -2});
  CHECK(r.mean == doctest::Approx(3.142857142857143));
  CHECK(r.variance == doctest::Approx(11.80952380952381));
  CHECK(r.k3 == doctest::Approx(14.142857142857142));
  CHECK(r.k4 == doctest::Approx(139.0095238095238));
  CHECK(r.se_k3 == doctest::Approx(std::sqrt(6 * std::pow(r.variance, 3) / 7)));
}

TEST_CASE("matrix OU path") {
  auto rng = stream_rng(3, 0);
  const auto same = sample_matrix_ou_path(6, {0.0, 0.0}, rng);
  CHECK(same[0] == same[1]);
  CHECK(same[0].size() == 6);
  CHECK(std::is_sorted(same[0].begin(), same[0].end()));

  // E sum xi^2 = n for the rescaled eigenvalues
  const int n = 8, S = 20000;
  std::vector<double> sq(S);
  for (int i = 0; i < S; ++i) {
    auto r = stream_rng(5, i);
    const auto path = sample_matrix_ou_path(n, {0.0}, r);
    double s = 0;
    for (double x : path[0]) s += x * x;
    sq[i] = s;
  }
  const auto rep = summarize(sq);
  CHECK(std::abs(rep.mean - n) < 3 * rep.se_mean);
}

TEST_CASE("distant times decorrelate") {
  const auto r = run_experiment(config(6, {0.0, 30.0}, 20000),
                                LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, 30.0}));
  // Cov of the two layer traces; each has unit variance, so the standard error is about 1/sqrt(S)
  CHECK(std::abs(r.layer_covariance[0][1]) < 3.0 / std::sqrt(20000.0));
}

TEST_CASE("constant statistic has zero variance") {
  const auto r = run_experiment(config(5, {0.0, 0.5}, 100), LayeredStatistic::same_polynomial(Polynomial({2.0}), {0.0, 0.5}));
  CHECK(r.variance == 0.0);
  CHECK(r.mean == doctest::Approx(2.0 * 5 * 2));
}

TEST_CASE("two-time trace variance and stationarity") {
  const double dt = 0.5;
  const auto r = run_experiment(config(20, {0.0, dt}, 40000, 9, 4),
                                LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, dt}));
  CHECK(r.used_power_sums);
  CHECK(std::abs(r.variance - (2 + 2 * std::exp(-dt))) < 3 * r.se_variance);
  CHECK(std::abs(r.k3) < 3 * r.se_k3);
  CHECK(std::abs(r.k4) < 3 * r.se_k4);
  for (int m = 0; m < 2; ++m) CHECK(std::abs(r.layer_means[m]) < 3 * std::sqrt(r.layer_covariance[m][m] / r.samples));
}

TEST_CASE("single-time x^2 variance at n = 100") {
  const auto r = run_experiment(config(100, {0.0}, 100000, 21, 8),
                                LayeredStatistic::same_polynomial(Polynomial({0, 0, 1}), {0.0}));
  CHECK(std::abs(r.variance - 2.0) < 0.1);
  // second moment per time equals n
  CHECK(std::abs(r.mean - 100.0) < 3 * r.se_mean);
}

TEST_CASE("covariance depends only on the time lag") {
  const auto r = run_experiment(config(10, {0.0, 0.3, 0.6}, 40000, 4, 4),
                                LayeredStatistic::same_polynomial(Polynomial({0, 1}), {0.0, 0.3, 0.6}));
  const double c01 = r.layer_covariance[0][1], c12 = r.layer_covariance[1][2];
  // both estimate e^{-0.3}; their difference has standard error below sqrt(2 * 2 / S)
  CHECK(std::abs(c01 - c12) < 3 * std::sqrt(4.0 / r.samples));
  CHECK(std::abs(c01 - std::exp(-0.3)) < 3 * std::sqrt(2.0 / r.samples));
}

TEST_CASE("eigenvalue path agrees with the power-sum path sample by sample") {
  const Polynomial f({0.5, -1.0, 0.25});
  const std::vector<double> t = {0.0, 0.2};
  const auto fast = run_experiment(config(7, t, 300, 13), LayeredStatistic::same_polynomial(f, t));
  LayeredStatistic cheb;
  cheb.layers.assign(2, ChebyshevSeries::interpolate([&](double x) { return f(x); }, -10, 10, 4));
  cheb.times = t;
  const auto slow = run_experiment(config(7, t, 300, 13), cheb);
  CHECK(fast.used_power_sums);
  CHECK(!slow.used_power_sums);
  for (size_t i = 0; i < fast.per_sample.size(); ++i)
    CHECK(slow.per_sample[i] == doctest::Approx(fast.per_sample[i]).epsilon(1e-9));
}

TEST_CASE("results do not depend on the thread count") {
  const std::vector<double> t = {0.0, 0.5};
  const auto st = LayeredStatistic::same_polynomial(Polynomial({0, 1, 0, 0.3}), t);
  const auto a = run_experiment(config(6, t, 997, 77, 1), st);
  for (int threads : {2, 3, 8}) {
    const auto b = run_experiment(config(6, t, 997, 77, threads), st);
    CHECK(a.per_sample == b.per_sample);
    CHECK(a.variance == b.variance);
    CHECK(a.k4 == b.k4);
    CHECK(a.layer_covariance == b.layer_covariance);
  }
  const auto c = run_experiment(config(6, t, 997, 78, 1), st);
  CHECK(c.per_sample != a.per_sample);
}
