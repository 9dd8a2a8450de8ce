#include "mtclt/montecarlo.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mtclt/quadrature.hpp"
#include "mtclt/rng.hpp"

namespace mtclt {

void OUBridgeConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (samples < 2) throw std::invalid_argument("samples must be >= 2");
  if (times.empty()) throw std::invalid_argument("at least one time required");
  for (size_t m = 1; m < times.size(); ++m)
    if (!(times[m] > times[m - 1])) throw std::invalid_argument("times must strictly increase");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

namespace {

// Hermitian matrix kept as its diagonal and the real/imaginary parts of the strict upper part.
struct GueState {
  int n;
  std::vector<double> diag, re, im;

  explicit GueState(int n_) : n(n_), diag(n_), re(n_ * (n_ - 1) / 2), im(n_ * (n_ - 1) / 2) {}

  template <typename Rng>
  void draw(Rng& rng, double decay, double noise) {
    std::normal_distribution<double> N(0.0, 1.0);
    const double off = noise / std::sqrt(2.0);
    for (auto& d : diag) d = decay * d + noise * N(rng);
    for (size_t k = 0; k < re.size(); ++k) {
      re[k] = decay * re[k] + off * N(rng);
      im[k] = decay * im[k] + off * N(rng);
    }
  }

  double trace() const {
    double s = 0.0;
    for (double d : diag) s += d;
    return s;
  }
  double trace_sq() const {
    double s = 0.0;
    for (double d : diag) s += d * d;
    double o = 0.0;
    for (size_t k = 0; k < re.size(); ++k) o += re[k] * re[k] + im[k] * im[k];
    return s + 2.0 * o;
  }
  std::vector<double> eigenvalues() const {
    Eigen::MatrixXcd H(n, n);
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
      H(i, i) = diag[i];
      for (int j = i + 1; j < n; ++j, ++k) {
        H(i, j) = {re[k], im[k]};
        H(j, i) = {re[k], -im[k]};
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + n);
  }
};

template <typename Rng>
void advance(GueState& H, Rng& rng, bool first, double dt) {
  if (first)
    H.draw(rng, 0.0, 1.0);
  else
    H.draw(rng, std::exp(-dt), std::sqrt(-std::expm1(-2.0 * dt)));
}

}  // namespace

std::vector<std::vector<double>> sample_matrix_ou_path(int n, const std::vector<double>& times,
                                                       std::mt19937_64& rng, bool rescale) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  GueState H(n);
  std::vector<std::vector<double>> out;
  const double s = rescale ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;
  for (size_t m = 0; m < times.size(); ++m) {
    advance(H, rng, m == 0, m == 0 ? 0.0 : times[m] - times[m - 1]);
    auto ev = H.eigenvalues();
    for (auto& x : ev) x *= s;
    out.push_back(std::move(ev));
  }
  return out;
}

ExperimentReport summarize(const std::vector<double>& x) {
  ExperimentReport r;
  const long N = static_cast<long>(x.size());
  if (N < 2) throw std::invalid_argument("need at least two samples");
  r.samples = N;
  const double Nd = static_cast<double>(N);
  r.mean = pairwise_sum(x.data(), N) / Nd;
  std::vector<double> d2(N), d3(N), d4(N);
  for (long i = 0; i < N; ++i) {
    const double d = x[i] - r.mean;
    d2[i] = d * d;
    d3[i] = d2[i] * d;
    d4[i] = d2[i] * d2[i];
  }
  const double m2 = pairwise_sum(d2.data(), N) / Nd;
  const double m3 = pairwise_sum(d3.data(), N) / Nd;
  const double m4 = pairwise_sum(d4.data(), N) / Nd;
  r.variance = Nd / (Nd - 1.0) * m2;
  if (N > 2) r.k3 = Nd * Nd / ((Nd - 1.0) * (Nd - 2.0)) * m3;
  if (N > 3)
    r.k4 = Nd * Nd * ((Nd + 1.0) * m4 - 3.0 * (Nd - 1.0) * m2 * m2) / ((Nd - 1.0) * (Nd - 2.0) * (Nd - 3.0));
  r.se_mean = std::sqrt(r.variance / Nd);
  r.se_variance = std::sqrt(std::max(0.0, m4 - m2 * m2) / Nd);
  r.se_k3 = std::sqrt(6.0 * r.variance * r.variance * r.variance / Nd);
  r.se_k4 = std::sqrt(24.0 * std::pow(r.variance, 4) / Nd);
  return r;
}

ExperimentReport run_experiment(const OUBridgeConfig& config, const LayeredStatistic& stat) {
  config.validate();
  stat.validate();
  if (stat.times != config.times) throw std::invalid_argument("statistic and config times differ");
  const auto t0 = std::chrono::steady_clock::now();
  const int N = stat.size();
  const int n = config.n;
  const double scale = config.rescale ? 1.0 / std::sqrt(static_cast<double>(n)) : 1.0;

  bool power_sums = true;
  for (const auto& f : stat.layers)
    if (!std::holds_alternative<Polynomial>(f) || std::get<Polynomial>(f).degree() > 2) power_sums = false;

  const long S = config.samples;
  std::vector<double> layer_vals(static_cast<size_t>(S) * N);
  auto work = [&](long begin, long end) {
    GueState H(n);
    for (long i = begin; i < end; ++i) {
      auto rng = stream_rng(config.seed, static_cast<std::uint64_t>(i));
      for (int m = 0; m < N; ++m) {
        advance(H, rng, m == 0, m == 0 ? 0.0 : stat.times[m] - stat.times[m - 1]);
        double v;
        if (power_sums) {
          const auto& c = std::get<Polynomial>(stat.layers[m]);
          v = c.coeff(0) * n + c.coeff(1) * H.trace() * scale + c.coeff(2) * H.trace_sq() * scale * scale;
        } else {
          v = 0.0;
          for (double x : H.eigenvalues()) v += layer_eval(stat.layers[m], x * scale);
        }
        layer_vals[static_cast<size_t>(i) * N + m] = stat.weight(m) * v;
      }
    }
  };
  const int T = static_cast<int>(std::min<long>(config.threads, S));
  if (T <= 1) {
    work(0, S);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) pool.emplace_back(work, S * t / T, S * (t + 1) / T);
    for (auto& th : pool) th.join();
  }

  std::vector<double> X(S);
  for (long i = 0; i < S; ++i) {
    double s = 0.0;
    for (int m = 0; m < N; ++m) s += layer_vals[static_cast<size_t>(i) * N + m];
    X[i] = s;
  }
  ExperimentReport r = summarize(X);
  r.used_power_sums = power_sums;
  r.layer_means.assign(N, 0.0);
  r.layer_covariance.assign(N, std::vector<double>(N, 0.0));
  std::vector<double> col(S), prod(S);
  for (int m = 0; m < N; ++m) {
    for (long i = 0; i < S; ++i) col[i] = layer_vals[static_cast<size_t>(i) * N + m];
    r.layer_means[m] = pairwise_sum(col.data(), S) / S;
  }
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      for (long i = 0; i < S; ++i)
        prod[i] = (layer_vals[static_cast<size_t>(i) * N + a] - r.layer_means[a]) *
                  (layer_vals[static_cast<size_t>(i) * N + b] - r.layer_means[b]);
      r.layer_covariance[a][b] = r.layer_covariance[b][a] = pairwise_sum(prod.data(), S) / (S - 1.0);
    }
  r.per_sample = std::move(X);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace mtclt
