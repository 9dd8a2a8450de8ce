#include "mtclt/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "mtclt/rng.hpp"
#include "mtclt/stieltjes.hpp"

namespace mtclt {

DiscreteOPE DiscreteOPE::build(std::vector<double> grid, std::vector<double> weights, int n) {
  if (grid.empty() || grid.size() != weights.size())
    throw std::invalid_argument("discrete OPE: grid and weights must be non-empty and equal length");
  if (n < 1 || n > static_cast<int>(grid.size()))
    throw std::invalid_argument("discrete OPE: need 1 <= n <= grid size");
  for (double w : weights)
    if (!(w > 0)) throw std::invalid_argument("discrete OPE: weights must be positive");
  DiscreteOPE o;
  o.grid = std::move(grid);
  o.weights = std::move(weights);
  o.n = n;
  const auto rc = stieltjes(o.grid, o.weights, o.size(), &o.ortho);
  o.a = rc.a;
  o.b = rc.b;
  double total = 0.0;
  for (double w : o.weights) total += w;
  if (o.size() > 2000 || rc.min_norm < 1e-12 * std::sqrt(total))
    o.warnings.push_back("orthonormalization poorly conditioned: smallest normalization " +
                         std::to_string(rc.min_norm));
  return o;
}

DiscreteOPE DiscreteOPE::krawtchouk(int M, double p, int n) {
  if (M < 0 || !(p > 0 && p < 1)) throw std::invalid_argument("Krawtchouk requires M >= 0 and 0 < p < 1");
  std::vector<double> x(M + 1), w(M + 1);
  for (int k = 0; k <= M; ++k) {
    x[k] = k;
    w[k] = std::exp(std::lgamma(M + 1.0) - std::lgamma(k + 1.0) - std::lgamma(M - k + 1.0) +
                    k * std::log(p) + (M - k) * std::log1p(-p));
  }
  return build(std::move(x), std::move(w), n);
}

namespace {

// log weights until the remaining tail mass is negligible
DiscreteOPE truncated(const std::function<double(int)>& logw, int n, int grid_max) {
  std::vector<double> x, w;
  if (grid_max >= 0) {
    for (int k = 0; k <= grid_max; ++k) {
      x.push_back(k);
      w.push_back(std::exp(logw(k)));
    }
  } else {
    double mass = 0.0;
    int k = 0;
    for (;; ++k) {
      const double v = std::exp(logw(k));
      x.push_back(k);
      w.push_back(v);
      mass += v;
      // geometric tail bound from the ratio of consecutive weights
      const double ratio = std::exp(logw(k + 1) - logw(k));
      if (k > 2 && ratio < 1.0 && v * ratio / (1.0 - ratio) < 1e-15 * mass) break;
      if (k > 100000) throw std::runtime_error("discrete weight tail does not decay");
    }
  }
  return DiscreteOPE::build(std::move(x), std::move(w), n);
}

}  // namespace

DiscreteOPE DiscreteOPE::charlier(double mu, int n, int grid_max) {
  if (!(mu > 0)) throw std::invalid_argument("Charlier requires mu > 0");
  return truncated([mu](int k) { return -mu + k * std::log(mu) - std::lgamma(k + 1.0); }, n, grid_max);
}

DiscreteOPE DiscreteOPE::meixner(double gamma, double mu, int n, int grid_max) {
  if (!(gamma > 0) || !(mu > 0 && mu < 1)) throw std::invalid_argument("Meixner requires gamma > 0 and 0 < mu < 1");
  return truncated(
      [=](int k) {
        return std::lgamma(gamma + k) - std::lgamma(gamma) - std::lgamma(k + 1.0) + k * std::log(mu) +
               gamma * std::log1p(-mu);
      },
      n, grid_max);
}

BandedMatrix DiscreteOPE::jacobi() const {
  const int S = size();
  BandedMatrix J(S, S > 1 ? 1 : 0);
  for (int k = 1; k <= S; ++k) {
    J.set(k, k, b[k - 1]);
    if (k < S) {
      J.set(k, k + 1, a[k]);
      J.set(k + 1, k, a[k]);
    }
  }
  return J;
}

KernelTable KernelTable::from(const DiscreteOPE& ope) {
  KernelTable t;
  const auto P = ope.ortho.leftCols(ope.n);
  t.K = P * P.transpose();
  t.weights = ope.weights;
  t.n = ope.n;
  return t;
}

double variance_oracle_single_time(const DiscreteOPE& ope, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != ope.size()) throw std::invalid_argument("f must have one value per grid point");
  if (ope.size() > 5000) throw std::invalid_argument("variance oracle limited to 5000 grid points");
  const auto kt = KernelTable::from(ope);
  double s = 0.0;
  for (int i = 0; i < ope.size(); ++i)
    for (int j = i + 1; j < ope.size(); ++j) {
      const double d = f[i] - f[j], k = kt.K(i, j);
      s += d * d * k * k * ope.weights[i] * ope.weights[j];
    }
  return s;  // the symmetric double sum counts each unordered pair twice, halved
}

EnumerationResult enumerate_small(const DiscreteOPE& ope, const std::vector<double>& f) {
  const int M1 = ope.size(), n = ope.n;
  if (static_cast<int>(f.size()) != M1) throw std::invalid_argument("f must have one value per grid point");
  double count = 1.0;
  for (int i = 1; i <= n; ++i) count = count * (M1 - n + i) / i;
  if (count > 1e6)
    throw std::invalid_argument("enumeration too large: " + std::to_string(static_cast<long long>(count)) +
                                " configurations");
  // probability of a configuration: prod_{i<j} (x_i - x_j)^2 prod w / Z
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<double> logp, xs;
  double lmax = -std::numeric_limits<double>::infinity();
  while (true) {
    double lp = 0.0, x = 0.0;
    for (int i = 0; i < n; ++i) {
      lp += std::log(ope.weights[idx[i]]);
      x += f[idx[i]];
      for (int j = i + 1; j < n; ++j) lp += 2.0 * std::log(std::abs(ope.grid[idx[i]] - ope.grid[idx[j]]));
    }
    logp.push_back(lp);
    xs.push_back(x);
    lmax = std::max(lmax, lp);
    int i = n - 1;
    while (i >= 0 && idx[i] == M1 - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  EnumerationResult r;
  r.configurations = static_cast<long>(xs.size());
  std::vector<double> p(xs.size());
  double Z = 0.0;
  for (size_t c = 0; c < xs.size(); ++c) Z += (p[c] = std::exp(logp[c] - lmax));
  std::map<double, double> dist;
  for (size_t c = 0; c < xs.size(); ++c) dist[xs[c]] += p[c] / Z;
  for (const auto& [v, q] : dist) {
    r.values.push_back(v);
    r.probabilities.push_back(q);
  }
  double mean = 0.0;
  for (size_t c = 0; c < xs.size(); ++c) mean += xs[c] * p[c] / Z;
  double m2 = 0, m3 = 0, m4 = 0;
  r.raw_moments.assign(4, 0.0);
  for (size_t c = 0; c < xs.size(); ++c) {
    const double q = p[c] / Z, d = xs[c] - mean;
    m2 += q * d * d;
    m3 += q * d * d * d;
    m4 += q * d * d * d * d;
    double xp = 1.0;
    for (int k = 0; k < 4; ++k) r.raw_moments[k] += q * (xp *= xs[c]);
  }
  r.mean = mean;
  r.variance = m2;
  r.k3 = m3;
  r.k4 = m4 - 3.0 * m2 * m2;
  return r;
}

std::vector<int> sample_projection_dpp(const KernelTable& kernel, std::mt19937_64& rng) {
  const int M = static_cast<int>(kernel.K.rows());
  // symmetric form W^{1/2} K W^{1/2} and its range
  Eigen::VectorXd sw(M);
  for (int i = 0; i < M; ++i) sw[i] = std::sqrt(kernel.weights[i]);
  const Eigen::MatrixXd Ks = sw.asDiagonal() * kernel.K * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ks);
  const auto& ev = es.eigenvalues();
  int rank = 0;
  for (int i = 0; i < M; ++i) {
    if (std::abs(ev[i] - 1.0) < 1e-6)
      ++rank;
    else if (std::abs(ev[i]) > 1e-6)
      throw std::invalid_argument("kernel is not a projection");
  }
  if (rank != kernel.n) throw std::invalid_argument("kernel rank deficiency: rank " + std::to_string(rank));
  Eigen::MatrixXd V = es.eigenvectors().rightCols(rank);

  std::vector<int> out;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int remaining = rank; remaining > 0; --remaining) {
    Eigen::VectorXd prob = V.rowwise().squaredNorm();
    const double total = prob.sum();
    double u = U(rng) * total, acc = 0.0;
    int pick = M - 1;
    for (int i = 0; i < M; ++i) {
      acc += prob[i];
      if (u < acc) { pick = i; break; }
    }
    // keep only the part of the span orthogonal to e_pick
    if (prob[pick] <= 0.0) throw std::runtime_error("sampler picked a zero-intensity site");
    out.push_back(pick);
    if (remaining == 1) break;
    int j;
    V.row(pick).cwiseAbs().maxCoeff(&j);
    const Eigen::VectorXd vj = V.col(j);
    V.col(j) = V.col(V.cols() - 1);
    V.conservativeResize(Eigen::NoChange, V.cols() - 1);
    for (int c = 0; c < V.cols(); ++c) V.col(c) -= (V(pick, c) / vj[pick]) * vj;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
    V = qr.householderQ() * Eigen::MatrixXd::Identity(M, V.cols());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> sample_projection_dpp(const KernelTable& kernel, std::uint64_t seed) {
  auto rng = stream_rng(seed, 0);
  return sample_projection_dpp(kernel, rng);
}

}  // namespace mtclt
