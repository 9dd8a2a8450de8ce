#include "mtclt/ensembles.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "mtclt/quadrature.hpp"
#include "mtclt/stieltjes.hpp"

namespace mtclt {

namespace {

const std::map<Family, std::string>& names() {
  static const std::map<Family, std::string> m = {
      {Family::HermiteOU, "HermiteOU"},
      {Family::LaguerreSquaredOU, "LaguerreSquaredOU"},
      {Family::JacobiDiffusion, "JacobiDiffusion"},
      {Family::Meixner, "Meixner"},
      {Family::CharlierEdge, "CharlierEdge"},
      {Family::CharlierBulk, "CharlierBulk"},
      {Family::Krawtchouk, "Krawtchouk"},
      {Family::Hahn, "Hahn"},
      {Family::NonStationaryHermite, "NonStationaryHermite"},
  };
  return m;
}

struct HahnParams {
  double alpha, beta;
  int M, a, b, c, r;
};

HahnParams hahn_params(const EnsembleSpec& s, double rho) {
  HahnParams h;
  h.a = s.n;
  h.b = static_cast<int>(std::floor(s.n * s.B));
  h.c = static_cast<int>(std::floor(s.n * s.C));
  h.r = static_cast<int>(std::floor(s.n * rho));
  if (!(rho > 0 && rho < s.B + s.C) || h.r < 1 || h.r >= h.b + h.c)
    throw std::invalid_argument("Hahn layer position rho must lie in (0, B+C)");
  h.alpha = std::abs(h.c - h.r);
  h.beta = std::abs(h.b - h.r);
  if (h.r <= h.b)
    h.M = h.r + h.a - 1;
  else if (h.r <= h.c)
    h.M = h.b + h.a - 1;
  else
    h.M = h.a + h.b + h.c - 1 - h.r;
  return h;
}

double jacobi_b(int k, double al, double be) {
  const double S = al + be;
  if (k == 0) return (be - al) / (S + 2.0);
  return (be * be - al * al) / ((2.0 * k + S) * (2.0 * k + S + 2.0));
}

double jacobi_a2(int k, double al, double be) {
  const double S = al + be;
  if (k == 1) return 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + S) * (2.0 + S) * (3.0 + S));
  const double d = 2.0 * k + S;
  return 4.0 * k * (k + al) * (k + be) * (k + S) / (d * d * (d + 1.0) * (d - 1.0));
}

// Recurrence of the orthonormal polynomials for e^{-n V(x)} dx, cached by (V, n, count).
const RecurrenceCoefficients& potential_recurrence(const Polynomial& V, int n, int count) {
  static std::mutex mu;
  static std::map<std::tuple<std::vector<double>, int, int>, RecurrenceCoefficients> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(V.coeffs(), n, count);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  // minimum of V to normalize the weight
  double vmin = V(0.0);
  for (double x = -20.0; x <= 20.0; x += 0.01) vmin = std::min(vmin, V(x));
  double L = 2.0;
  RecurrenceCoefficients rc;
  for (int attempt = 0; attempt < 40; ++attempt) {
    const int order = 32;
    const int panels = std::max(16, (4 * count + 400) / order);
    auto rule = gauss_legendre_panels({-L, L}, panels, order);
    std::vector<double> w(rule.nodes.size());
    for (size_t i = 0; i < w.size(); ++i)
      w[i] = rule.weights[i] * std::exp(-n * (V(rule.nodes[i]) - vmin));
    Eigen::MatrixXd vals;
    rc = stieltjes(rule.nodes, w, count, &vals);
    // mass of the highest polynomial squared at the outermost nodes
    const Eigen::Index last = vals.rows() - 1;
    const double edge = std::max(w[0] * vals(0, count - 1) * vals(0, count - 1),
                                 w[last] * vals(last, count - 1) * vals(last, count - 1));
    if (edge < 1e-18) break;
    L *= 1.25;
    if (attempt == 39) throw std::runtime_error("potential recurrence: tail did not converge");
  }
  return cache[key] = rc;
}

double coeff_a(const EnsembleSpec& s, int k, double t) {
  const double n = s.n;
  switch (s.family) {
    case Family::HermiteOU:
      return std::sqrt(k / n);
    case Family::LaguerreSquaredOU:
      return std::sqrt(k * (k + s.r)) / n;
    case Family::JacobiDiffusion:
      return 0.5 * std::sqrt(jacobi_a2(k, s.alpha, s.beta));
    case Family::Meixner:
      return std::sqrt(s.mu * k * (k + s.gamma - 1.0)) / (n * (1.0 - s.mu));
    case Family::CharlierEdge:
      return std::sqrt(s.mu * k / n);
    case Family::CharlierBulk:
      return std::sqrt(s.mu * k / n);
    case Family::Krawtchouk: {
      const int M = static_cast<int>(std::floor(s.gamma * s.n));
      if (k > M) throw std::invalid_argument("Krawtchouk truncation exceeds M+1");
      return std::sqrt(s.p * (1.0 - s.p) * k * (M - k + 1.0)) / n;
    }
    case Family::Hahn: {
      const auto h = hahn_params(s, t);
      if (k > h.M) throw std::invalid_argument("Hahn truncation exceeds M+1");
      return hahn_a(k, h.alpha, h.beta, h.M) / n;
    }
    case Family::NonStationaryHermite:
      break;
  }
  throw std::logic_error("coeff_a: unsupported family");
}

double coeff_b(const EnsembleSpec& s, int k, double t) {
  const double n = s.n;
  switch (s.family) {
    case Family::HermiteOU:
      return 0.0;
    case Family::LaguerreSquaredOU:
      return (2.0 * k + s.r + 1.0) / n;
    case Family::JacobiDiffusion:
      return 0.5 * (1.0 - jacobi_b(k, s.alpha, s.beta));
    case Family::Meixner:
      return (k * (1.0 + s.mu) + s.mu * s.gamma) / (n * (1.0 - s.mu));
    case Family::CharlierEdge:
      return (k - n + s.mu) / std::sqrt(n);
    case Family::CharlierBulk:
      return (k + s.mu * n) / n;
    case Family::Krawtchouk: {
      const int M = static_cast<int>(std::floor(s.gamma * s.n));
      if (k > M) throw std::invalid_argument("Krawtchouk truncation exceeds M+1");
      return (s.p * M - 2.0 * s.p * k + k) / n;
    }
    case Family::Hahn: {
      const auto h = hahn_params(s, t);
      if (k > h.M) throw std::invalid_argument("Hahn truncation exceeds M+1");
      return hahn_b(k, h.alpha, h.beta, h.M) / n;
    }
    case Family::NonStationaryHermite:
      break;
  }
  throw std::logic_error("coeff_b: unsupported family");
}

// log of c_{j} for 1-based index j (polynomial degree j-1)
double log_c(const EnsembleSpec& s, int j, double t) {
  const double deg = j - 1;
  switch (s.family) {
    case Family::JacobiDiffusion: {
      const double kappa = 1.0 / (s.n * (s.alpha + s.beta + 2.0));
      return -kappa * t * deg * (deg + s.alpha + s.beta + 1.0);
    }
    case Family::Hahn: {
      const auto h = hahn_params(s, t);
      const double top = h.a + h.b + h.c - h.r - 1 - deg;
      const double bot = h.a + h.r - 1 - deg;
      if (top < 0 || bot < 0) throw std::invalid_argument("Hahn c-weights undefined at this index");
      return 0.5 * (std::lgamma(top + 1.0) - std::lgamma(bot + 1.0));
    }
    default:
      return -t * deg;
  }
}

}  // namespace

std::string family_name(Family f) { return names().at(f); }

Family family_from_name(const std::string& name) {
  for (const auto& [f, s] : names())
    if (s == name) return f;
  throw std::invalid_argument("unknown ensemble family '" + name + "'");
}

void EnsembleSpec::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  switch (family) {
    case Family::HermiteOU:
      break;
    case Family::LaguerreSquaredOU:
      if (!(r > -1)) throw std::invalid_argument("Laguerre requires r > -1");
      break;
    case Family::JacobiDiffusion:
      if (!(alpha > -1) || !(beta > -1)) throw std::invalid_argument("Jacobi requires alpha > -1 and beta > -1");
      break;
    case Family::Meixner:
      if (!(mu > 0 && mu < 1)) throw std::invalid_argument("Meixner requires 0 < mu < 1");
      if (!(gamma > 0)) throw std::invalid_argument("Meixner requires gamma > 0");
      break;
    case Family::CharlierEdge:
    case Family::CharlierBulk:
      if (!(mu > 0)) throw std::invalid_argument("Charlier requires mu > 0");
      break;
    case Family::Krawtchouk:
      if (!(p > 0 && p < 1)) throw std::invalid_argument("Krawtchouk requires 0 < p < 1");
      if (!(gamma > 1)) throw std::invalid_argument("Krawtchouk requires gamma > 1");
      break;
    case Family::Hahn:
      if (!(B > 0 && C > 0)) throw std::invalid_argument("Hahn requires B > 0 and C > 0");
      if (!(B <= C)) throw std::invalid_argument("Hahn requires B <= C");
      break;
    case Family::NonStationaryHermite: {
      const int d = V.degree();
      if (d < 2 || d % 2 != 0 || !(V.coeff(d) > 0))
        throw std::invalid_argument("V must have even degree >= 2 and positive leading coefficient");
      break;
    }
  }
}

double hahn_a(int k, double al, double be, int M) {
  const double S = al + be;
  const double num = (M - k + 1.0) * k * (M - k + 1.0 + al) * (M - k + 1.0 + be) * (M - k + 1.0 + S) *
                     (2.0 * M - k + 2.0 + S);
  const double d = 2.0 * M - 2.0 * k + S;
  const double den = (1.0 + d) * (2.0 + d) * (2.0 + d) * (3.0 + d);
  return std::sqrt(num / den);
}

double hahn_b(int k, double al, double be, int M) {
  const double S = al + be;
  const double d = 2.0 * M - 2.0 * k + S;
  double v = (2.0 * M + S + 1.0 - k) * (M + be - k) * (M - k) / ((d + 1.0) * d);
  if (k > 0) v += k * (M + S + 1.0 - k) * (M + al + 1.0 - k) / ((d + 2.0) * (d + 1.0));
  return v;
}

BandedMatrix jacobi_matrix(const EnsembleSpec& spec, double layer_time, int S) {
  spec.validate();
  if (S < 1) throw std::invalid_argument("truncation size must be >= 1");
  BandedMatrix J(S, S > 1 ? 1 : 0);
  if (spec.family == Family::NonStationaryHermite) {
    const auto& rc = potential_recurrence(spec.V, spec.n, S);
    for (int k = 1; k <= S; ++k) {
      J.set(k, k, rc.b[k - 1]);
      if (k < S) {
        J.set(k, k + 1, rc.a[k]);
        J.set(k + 1, k, rc.a[k]);
      }
    }
    return J;
  }
  for (int k = 1; k <= S; ++k) {
    J.set(k, k, coeff_b(spec, k - 1, layer_time));
    if (k < S) {
      const double a = coeff_a(spec, k, layer_time);
      J.set(k, k + 1, a);
      J.set(k + 1, k, a);
    }
  }
  return J;
}

BandedMatrix nonstationary_J(const BandedMatrix& jacobi, const Polynomial& Vprime, double t) {
  const BandedMatrix Vp = poly_apply(jacobi, Vprime);
  const int bw = std::max(jacobi.bandwidth(), Vp.bandwidth());
  BandedMatrix out = jacobi.scaled(std::exp(-t)).widened(bw);
  const double s = 2.0 * std::sinh(t);
  for (int r = 1; r <= out.dim(); ++r)
    for (int c = r; c <= std::min(out.dim(), r + Vp.bandwidth()); ++c) out.add(r, c, s * Vp(r, c));
  return out;
}

BandedMatrix weighted_recurrence(const EnsembleSpec& spec, double layer_time, int S) {
  BandedMatrix J = jacobi_matrix(spec, layer_time, S);
  if (spec.family == Family::NonStationaryHermite) return nonstationary_J(J, spec.V.derivative(), layer_time);
  if (spec.family != Family::Hahn && layer_time == 0.0) return J;
  for (int k = 1; k < S; ++k) {
    // (c_{k+1}/c_k) on the sub-diagonal, the inverse on the super-diagonal
    const double lr = log_c(spec, k + 1, layer_time) - log_c(spec, k, layer_time);
    J.set(k + 1, k, J(k + 1, k) * std::exp(lr));
    J.set(k, k + 1, J(k, k + 1) * std::exp(-lr));
  }
  return J;
}

double bridge_tau(double t) {
  if (!(t > 0 && t < 1)) throw std::invalid_argument("bridge times must lie in (0, 1)");
  return 0.5 * std::log(t / (1.0 - t));
}

double tau_of_time(const EnsembleSpec& spec, double t) {
  switch (spec.family) {
    case Family::JacobiDiffusion:
      return 2.0 * t / (spec.alpha + spec.beta + 2.0);
    case Family::Hahn:
      return 0.5 * std::log((spec.B + spec.C - t) / t);
    default:
      return t;
  }
}

LimitData limit_symbol(const EnsembleSpec& spec, double t) {
  spec.validate();
  LimitData d;
  d.tau = tau_of_time(spec, t);
  d.kappa_desc = "1";
  switch (spec.family) {
    case Family::HermiteOU:
      d.a0 = 0.0; d.a1 = 1.0;
      break;
    case Family::LaguerreSquaredOU:
      d.a0 = 2.0; d.a1 = 1.0;
      break;
    case Family::JacobiDiffusion:
      d.a0 = 0.5; d.a1 = 0.25;
      d.kappa_n = 1.0 / (spec.n * (spec.alpha + spec.beta + 2.0));
      d.kappa_desc = "1/(n(alpha+beta+2))";
      break;
    case Family::Meixner:
      d.a0 = (1.0 + spec.mu) / (1.0 - spec.mu);
      d.a1 = std::sqrt(spec.mu) / (1.0 - spec.mu);
      break;
    case Family::CharlierEdge:
      d.a0 = 0.0; d.a1 = std::sqrt(spec.mu);
      break;
    case Family::CharlierBulk:
      d.a0 = 1.0 + spec.mu; d.a1 = std::sqrt(spec.mu);
      break;
    case Family::Krawtchouk:
      d.a0 = spec.p * spec.gamma - 2.0 * spec.p + 1.0;
      d.a1 = std::sqrt(spec.p * (1.0 - spec.p) * (spec.gamma - 1.0));
      break;
    case Family::Hahn: {
      const auto h = hahn_limits(spec.B, spec.C, t);
      d.a0 = h.b_inf; d.a1 = h.a_inf;
      d.kappa_desc = "layer coordinate is rho; tau decreases in rho";
      break;
    }
    case Family::NonStationaryHermite: {
      const auto& rc = potential_recurrence(spec.V, spec.n, spec.n + 2);
      d.a0 = rc.b[spec.n];
      d.a1 = rc.a[spec.n];
      const LaurentSymbol s = LaurentSymbol::tridiagonal(d.a0, d.a1);
      const LaurentSymbol vp = compose(spec.V.derivative(), s);
      std::vector<double> upper;
      for (int j = vp.min_power(); j <= 0; ++j) upper.push_back(vp[j]);
      d.symbol = s.scaled(std::exp(-t)) + LaurentSymbol(vp.min_power(), upper).scaled(2.0 * std::sinh(t));
      d.kappa_desc = "1; a0, a1 are the finite-n recurrence entries at index n";
      return d;
    }
  }
  d.symbol = LaurentSymbol::tridiagonal(d.a0, d.a1, d.tau);
  return d;
}

HahnLimits hahn_limits(double B, double C, double rho, int n) {
  if (!(rho > 0 && rho < B + C)) throw std::invalid_argument("hahn_limits: rho must lie in (0, B+C)");
  auto at = [&](int nn) {
    EnsembleSpec s;
    s.family = Family::Hahn;
    s.n = nn;
    s.B = B;
    s.C = C;
    return std::make_pair(coeff_a(s, nn, rho), coeff_b(s, nn, rho));
  };
  HahnLimits h;
  h.n = n;
  std::tie(h.a_n, h.b_n) = at(n);
  std::tie(h.a_2n, h.b_2n) = at(2 * n);
  h.a_inf = 2.0 * h.a_2n - h.a_n;
  h.b_inf = 2.0 * h.b_2n - h.b_n;
  h.tau = 0.5 * std::log((B + C - rho) / rho);
  h.tau_printed = 0.5 * std::log((1.0 + B + C - rho) / (1.0 + rho));
  return h;
}

RecurrenceProbe probe_recurrence(const EnsembleSpec& spec, double layer_time, int index) {
  spec.validate();
  if (spec.family == Family::NonStationaryHermite) {
    const auto& rc = potential_recurrence(spec.V, spec.n, index + 1);
    return {rc.a[index], rc.b[index]};
  }
  return {coeff_a(spec, index, layer_time), coeff_b(spec, index, layer_time)};
}

}  // namespace mtclt
