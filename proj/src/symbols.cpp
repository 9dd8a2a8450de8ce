#include "mtclt/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtclt/quadrature.hpp"

namespace mtclt {

LaurentSymbol::LaurentSymbol(int min_power, std::vector<double> coeffs)
    : min_(min_power), c_(std::move(coeffs)) {
  if (c_.empty()) {
    c_.push_back(0.0);
    min_ = 0;
  }
  trim();
}

LaurentSymbol LaurentSymbol::constant(double c) { return LaurentSymbol(0, {c}); }

LaurentSymbol LaurentSymbol::tridiagonal(double a0, double a1, double tau) {
  return LaurentSymbol(-1, {a1 * std::exp(tau), a0, a1 * std::exp(-tau)});
}

void LaurentSymbol::trim() {
  size_t lead = 0;
  while (lead + 1 < c_.size() && c_[lead] == 0.0) ++lead;
  c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
  min_ += static_cast<int>(lead);
  while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
  if (c_.size() == 1 && c_[0] == 0.0) min_ = 0;
}

double LaurentSymbol::operator[](int j) const {
  const int i = j - min_;
  return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : 0.0;
}

bool LaurentSymbol::is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

LaurentSymbol LaurentSymbol::reversed() const {
  std::vector<double> r(c_.rbegin(), c_.rend());
  return LaurentSymbol(-max_power(), std::move(r));
}

LaurentSymbol LaurentSymbol::scaled(double c) const {
  auto v = c_;
  for (auto& x : v) x *= c;
  return LaurentSymbol(min_, std::move(v));
}

LaurentSymbol operator+(const LaurentSymbol& a, const LaurentSymbol& b) {
  const int lo = std::min(a.min_power(), b.min_power());
  const int hi = std::max(a.max_power(), b.max_power());
  std::vector<double> v(hi - lo + 1);
  for (int j = lo; j <= hi; ++j) v[j - lo] = a[j] + b[j];
  return LaurentSymbol(lo, std::move(v));
}

LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b) {
  std::vector<double> v(a.c_.size() + b.c_.size() - 1, 0.0);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return LaurentSymbol(a.min_ + b.min_, std::move(v));
}

LaurentSymbol compose(const Polynomial& f, const LaurentSymbol& a) {
  const auto& c = f.coeffs();
  LaurentSymbol r = LaurentSymbol::constant(c.back());
  for (int k = f.degree() - 1; k >= 0; --k) r = r * a + LaurentSymbol::constant(c[k]);
  return r;
}

LaurentSymbol compose(const ChebyshevSeries& f, const LaurentSymbol& a) {
  const double span = f.hi() - f.lo();
  const LaurentSymbol u = a.scaled(2.0 / span) + LaurentSymbol::constant(-(f.lo() + f.hi()) / span);
  const auto& c = f.coeffs();
  LaurentSymbol b1, b2;
  for (int k = f.degree(); k >= 1; --k) {
    LaurentSymbol b0 = (u * b1).scaled(2.0) + b2.scaled(-1.0) + LaurentSymbol::constant(c[k]);
    b2 = b1;
    b1 = b0;
  }
  return u * b1 + b2.scaled(-1.0) + LaurentSymbol::constant(c[0]);
}

Eigen::MatrixXd toeplitz_matrix(const LaurentSymbol& a, int size) {
  Eigen::MatrixXd t(size, size);
  for (int j = 0; j < size; ++j)
    for (int k = 0; k < size; ++k) t(j, k) = a[j - k];
  return t;
}

Eigen::MatrixXd hankel_matrix(const LaurentSymbol& a, int size) {
  Eigen::MatrixXd h(size, size);
  for (int j = 1; j <= size; ++j)
    for (int k = 1; k <= size; ++k) h(j - 1, k - 1) = a[j + k - 1];
  return h;
}

int layer_degree(const LayerFunction& f) {
  return std::visit([](const auto& p) { return p.degree(); }, f);
}

double layer_eval(const LayerFunction& f, double x) {
  return std::visit([x](const auto& p) { return p(x); }, f);
}

static LaurentSymbol compose_layer(const LayerFunction& f, const LaurentSymbol& a) {
  return std::visit([&a](const auto& p) { return compose(p, a); }, f);
}

LayeredStatistic LayeredStatistic::same_polynomial(const Polynomial& f, std::vector<double> times) {
  LayeredStatistic s;
  s.layers.assign(times.size(), f);
  s.times = std::move(times);
  return s;
}

LayeredStatistic LayeredStatistic::riemann(const std::vector<LayerFunction>& g_layers,
                                           std::vector<double> times, double end) {
  if (g_layers.size() != times.size()) throw std::invalid_argument("riemann: layer/time count mismatch");
  LayeredStatistic s;
  s.layers = g_layers;
  s.times = std::move(times);
  s.weights.resize(s.times.size());
  for (size_t m = 0; m < s.times.size(); ++m) {
    const double next = m + 1 < s.times.size() ? s.times[m + 1] : end;
    s.weights[m] = next - s.times[m];
    if (!(s.weights[m] > 0)) throw std::invalid_argument("riemann: grid must increase up to end");
  }
  return s;
}

int LayeredStatistic::max_degree() const {
  int d = 0;
  for (const auto& f : layers) d = std::max(d, layer_degree(f));
  return d;
}

void LayeredStatistic::validate() const {
  if (layers.empty()) throw std::invalid_argument("statistic needs at least one layer");
  if (times.size() != layers.size()) throw std::invalid_argument("statistic: one time per layer required");
  if (!weights.empty() && weights.size() != layers.size())
    throw std::invalid_argument("statistic: one weight per layer required");
  for (size_t m = 1; m < times.size(); ++m)
    if (!(times[m] > times[m - 1])) throw std::invalid_argument("statistic: times must strictly increase");
}

double LayeredStatistic::grid_regularity(double end) const {
  double s = 0.0;
  for (size_t m = 0; m < times.size(); ++m) {
    const double next = m + 1 < times.size() ? times[m + 1] : end;
    s += (next - times[m]) * (next - times[m]);
  }
  return static_cast<double>(times.size()) * s;
}

double fourier_coeff(const Polynomial& f, const LaurentSymbol& a, int k) { return compose(f, a)[k]; }

std::vector<double> chebyshev_coeffs(const std::function<double(double)>& f, double a0, double a1,
                                     int kmax, int quad_order) {
  if (!(a1 > 0)) throw std::invalid_argument("chebyshev_coeff: a1 must be positive");
  if (quad_order < 1 || kmax < 0) throw std::invalid_argument("chebyshev_coeff: bad orders");
  std::vector<double> out(kmax + 1, 0.0);
  for (int j = 0; j < quad_order; ++j) {
    const double th = std::numbers::pi * (j + 0.5) / quad_order;
    const double v = f(a0 + 2.0 * a1 * std::cos(th)) / quad_order;
    for (int k = 0; k <= kmax; ++k) out[k] += v * std::cos(k * th);
  }
  return out;
}

double chebyshev_coeff(const std::function<double(double)>& f, double a0, double a1, int k,
                       int quad_order) {
  return chebyshev_coeffs(f, a0, a1, std::abs(k), quad_order)[std::abs(k)];
}

namespace {

void check_limits(const LayeredStatistic& stat, const std::vector<LayerLimit>& limits) {
  stat.validate();
  if (limits.size() != stat.layers.size()) throw std::invalid_argument("one limit per layer required");
  for (size_t m = 0; m < limits.size(); ++m) {
    if (!(limits[m].a1 > 0)) throw std::invalid_argument("limit a1 must be positive");
    if (m > 0 && !(limits[m].tau > limits[m - 1].tau))
      throw std::invalid_argument("tau values must strictly increase");
  }
}

int default_K(const LayeredStatistic& stat, int K) {
  return K > 0 ? K : std::max(32, 2 * stat.max_degree());
}

// fhat[m][k], k = 0..K, weighted
std::vector<std::vector<double>> symmetric_coeffs(const LayeredStatistic& stat,
                                                  const std::vector<LayerLimit>& limits, int K) {
  std::vector<std::vector<double>> fh(stat.size(), std::vector<double>(K + 1, 0.0));
  for (int m = 0; m < stat.size(); ++m) {
    const LaurentSymbol s = compose_layer(stat.layers[m], LaurentSymbol::tridiagonal(limits[m].a0, limits[m].a1));
    for (int k = 0; k <= K; ++k) fh[m][k] = stat.weight(m) * s[k];
  }
  return fh;
}

}  // namespace

VarianceBreakdown variance_fixed_N(const LayeredStatistic& stat, const std::vector<LayerLimit>& limits,
                                   int K) {
  check_limits(stat, limits);
  K = default_K(stat, K);
  const int N = stat.size();
  const auto fh = symmetric_coeffs(stat, limits, K);

  VarianceBreakdown out;
  out.series_K = K;
  out.per_k_terms.assign(K, 0.0);
  for (int k = 1; k <= K; ++k) {
    double t = 0.0;
    for (int m1 = 0; m1 < N; ++m1)
      for (int m2 = 0; m2 < N; ++m2)
        t += std::exp(-k * std::abs(limits[m1].tau - limits[m2].tau)) * fh[m1][k] * fh[m2][k];
    out.per_k_terms[k - 1] = k * t;
    out.sigma2 += k * t;
  }

  std::vector<LaurentSymbol> sym;
  for (int m = 0; m < N; ++m)
    sym.push_back(compose_layer(stat.layers[m], LaurentSymbol::tridiagonal(limits[m].a0, limits[m].a1, limits[m].tau))
                      .scaled(stat.weight(m)));
  out.sigma2_asymmetric = toeplitz_variance_limit(sym);
  const double scale = 1.0 + std::abs(out.sigma2);
  if (std::abs(out.sigma2 - out.sigma2_asymmetric) > 1e-9 * scale)
    throw std::logic_error("symmetric and asymmetric variance forms disagree");
  return out;
}

double toeplitz_variance_limit(const std::vector<LaurentSymbol>& symbols) {
  double v = 0.0;
  for (size_t m = 0; m < symbols.size(); ++m) {
    v += hankel_product_trace(symbols[m], symbols[m]);
    for (size_t m2 = m + 1; m2 < symbols.size(); ++m2)
      v += 2.0 * hankel_product_trace(symbols[m2], symbols[m]);
  }
  return v;
}

double hankel_product_trace(const LaurentSymbol& a, const LaurentSymbol& b) {
  double s = 0.0;
  for (int l = 1; l <= std::min(a.max_power(), -b.min_power()); ++l) s += l * a[l] * b[-l];
  return s;
}

double ehrhardt_log_det(const std::vector<LaurentSymbol>& symbols) {
  LaurentSymbol total;
  double scale = 0.0;
  for (const auto& s : symbols) {
    total = total + s;
    for (int j = s.min_power(); j <= s.max_power(); ++j) scale = std::max(scale, std::abs(s[j]));
  }
  for (int j = total.min_power(); j <= total.max_power(); ++j)
    if (std::abs(total[j]) > 1e-12 * std::max(1.0, scale))
      throw std::invalid_argument("ehrhardt_log_det: symbols must sum to zero");
  double v = 0.0;
  for (size_t i = 0; i < symbols.size(); ++i)
    for (size_t j = i + 1; j < symbols.size(); ++j)
      v += hankel_product_trace(symbols[j], symbols[i]) - hankel_product_trace(symbols[i], symbols[j]);
  return 0.5 * v;
}

GrowingVariance variance_growing(const std::function<std::vector<double>(double)>& gk,
                                 const std::function<double(double)>& tau,
                                 const GrowingQuadrature& quad) {
  GrowingVariance out;
  const int K = quad.K, Q = quad.order;
  out.per_k_terms.assign(K, 0.0);
  if (quad.breakpoints.size() < 2) throw std::invalid_argument("variance_growing: need an interval");
  if (quad.breakpoints.front() == quad.breakpoints.back()) return out;
  for (size_t i = 1; i < quad.breakpoints.size(); ++i)
    if (!(quad.breakpoints[i] > quad.breakpoints[i - 1]))
      throw std::invalid_argument("variance_growing: breakpoints must increase");

  std::vector<std::pair<double, double>> panels;
  for (size_t i = 0; i + 1 < quad.breakpoints.size(); ++i) {
    const double a = quad.breakpoints[i], b = quad.breakpoints[i + 1];
    for (int p = 0; p < quad.panels; ++p)
      panels.emplace_back(a + (b - a) * p / quad.panels, a + (b - a) * (p + 1) / quad.panels);
  }

  const QuadratureRule ref = gauss_legendre(Q);
  // barycentric weights for Lagrange interpolation on the reference nodes
  std::vector<double> bary(Q, 1.0);
  for (int i = 0; i < Q; ++i)
    for (int j = 0; j < Q; ++j)
      if (i != j) bary[i] /= (ref.nodes[i] - ref.nodes[j]);

  std::vector<double> F0(K, 0.0);  // running convolution at the panel start, per k
  double prev_tau = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : panels) {
    const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
    std::vector<double> t(Q), w(Q), ta(Q);
    Eigen::MatrixXd G(Q, K);
    for (int i = 0; i < Q; ++i) {
      t[i] = mid + h * ref.nodes[i];
      w[i] = h * ref.weights[i];
      ta[i] = tau(t[i]);
      if (!(ta[i] > prev_tau)) throw std::invalid_argument("variance_growing: tau must strictly increase");
      prev_tau = ta[i];
      auto g = gk(t[i]);
      if (static_cast<int>(g.size()) < K) throw std::invalid_argument("variance_growing: too few coefficients");
      for (int k = 0; k < K; ++k) G(i, k) = g[k];
    }
    const double tau_a = tau(a), tau_b = tau(b);

    for (int i = 0; i < Q; ++i) {
      // inner rule on [a, t_i], values of g_k interpolated from the panel nodes
      const double hi = 0.5 * (t[i] - a), mi = 0.5 * (t[i] + a);
      Eigen::MatrixXd L(Q, Q);
      std::vector<double> wi(Q), tai(Q);
      for (int j = 0; j < Q; ++j) {
        const double s = mi + hi * ref.nodes[j];
        wi[j] = hi * ref.weights[j];
        tai[j] = tau(s);
        const double u = (s - mid) / h;
        double den = 0.0;
        int hit = -1;
        for (int r = 0; r < Q; ++r) {
          if (u == ref.nodes[r]) { hit = r; break; }
          den += bary[r] / (u - ref.nodes[r]);
        }
        for (int r = 0; r < Q; ++r)
          L(j, r) = hit >= 0 ? (r == hit ? 1.0 : 0.0) : (bary[r] / (u - ref.nodes[r])) / den;
      }
      const Eigen::MatrixXd Gi = L * G;
      for (int k = 0; k < K; ++k) {
        const int kk = k + 1;
        double Fi = std::exp(-kk * (ta[i] - tau_a)) * F0[k];
        for (int j = 0; j < Q; ++j) Fi += wi[j] * std::exp(-kk * (ta[i] - tai[j])) * Gi(j, k);
        out.per_k_terms[k] += 2.0 * kk * w[i] * G(i, k) * Fi;
      }
    }
    for (int k = 0; k < K; ++k) {
      const int kk = k + 1;
      double Fb = std::exp(-kk * (tau_b - tau_a)) * F0[k];
      for (int i = 0; i < Q; ++i) Fb += w[i] * std::exp(-kk * (tau_b - ta[i])) * G(i, k);
      F0[k] = Fb;
    }
  }
  for (double x : out.per_k_terms) out.sigma2 += x;
  out.last_term = std::abs(out.per_k_terms.back());
  return out;
}

GrowingVariance variance_growing(const std::function<double(double, double)>& g,
                                 const GrowingLimits& limits, const GrowingQuadrature& quad,
                                 int cheb_order) {
  auto gk = [&](double t) {
    auto c = chebyshev_coeffs([&](double x) { return g(t, x); }, limits.a0(t), limits.a1(t), quad.K,
                              cheb_order);
    return std::vector<double>(c.begin() + 1, c.end());
  };
  return variance_growing(gk, limits.tau, quad);
}

double variance_fixed_N_frequency(const LayeredStatistic& stat, const std::vector<LayerLimit>& limits,
                                  int K) {
  check_limits(stat, limits);
  K = default_K(stat, K);
  const auto fh = symmetric_coeffs(stat, limits, K);
  const int N = stat.size();
  // e^{-k|d|} = (2/pi) int_0^inf k cos(w d) / (k^2 + w^2) dw, so each series term is
  // (2k/pi) int_0^inf k |F_k(w)|^2 / (k^2 + w^2) dw with F_k(w) = sum_m fhat_k^m e^{i w tau_m}.
  double total = 0.0;
  for (int k = 1; k <= K; ++k) {
    bool nonzero = false;
    for (int m = 0; m < N; ++m) nonzero |= fh[m][k] != 0.0;
    if (!nonzero) continue;
    const double W = 2000.0 * k;
    double dmax = 0.0;
    for (int m = 0; m < N; ++m) dmax = std::max(dmax, std::abs(limits[m].tau - limits[0].tau));
    const int panels = static_cast<int>(std::ceil(W * std::max(dmax, 1.0) / 2.0)) + 64;
    // geometric-free uniform panels are enough for a cross-check
    const QuadratureRule r = gauss_legendre(16);
    double integral = 0.0, diag = 0.0;
    for (int m = 0; m < N; ++m) diag += fh[m][k] * fh[m][k];
    for (int p = 0; p < panels; ++p) {
      const double lo = W * p / panels, hi = W * (p + 1) / panels;
      for (int i = 0; i < 16; ++i) {
        const double w = 0.5 * (lo + hi) + 0.5 * (hi - lo) * r.nodes[i];
        double re = 0.0, im = 0.0;
        for (int m = 0; m < N; ++m) {
          re += fh[m][k] * std::cos(w * limits[m].tau);
          im += fh[m][k] * std::sin(w * limits[m].tau);
        }
        integral += 0.5 * (hi - lo) * r.weights[i] * k * (re * re + im * im) / (k * k + w * w);
      }
    }
    // the non-oscillating part of the tail in closed form
    integral += diag * (std::numbers::pi / 2 - std::atan(W / k));
    total += 2.0 * k / std::numbers::pi * integral;
  }
  return total;
}

}  // namespace mtclt
