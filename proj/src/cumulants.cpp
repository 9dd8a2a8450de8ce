#include "mtclt/cumulants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtclt {

using cplx = std::complex<double>;
using CBanded = BasicBanded<cplx>;

std::string method_name(CumulantMethod m) {
  switch (m) {
    case CumulantMethod::contour_full: return "contour_full";
    case CumulantMethod::contour_windowed: return "contour_windowed";
    case CumulantMethod::composition_series: return "composition_series";
  }
  return "unknown";
}

namespace {

CBanded complexify(const BandedMatrix& A, cplx scale) {
  CBanded out(A.dim(), A.bandwidth());
  for (int r = 1; r <= A.dim(); ++r)
    for (int s = std::max(1, r - A.bandwidth()); s <= std::min(A.dim(), r + A.bandwidth()); ++s)
      out.set(r, s, scale * A(r, s));
  return out;
}

// e^{lam A} by a banded Taylor series after scaling so that |lam| ||A|| <= 1/2.
CBanded banded_exp(const BandedMatrix& A, cplx lam) {
  const double nrm = std::abs(lam) * A.inf_norm();
  int s = 0;
  if (nrm > 0.5) s = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const CBanded X = complexify(A, lam / std::ldexp(1.0, s));
  const int S = A.dim();
  CBanded sum = CBanded::identity(S), term = CBanded::identity(S);
  const double xn = nrm / std::ldexp(1.0, s);
  double bound = 1.0;
  for (int j = 1; j <= 60; ++j) {
    term = (term * X).scaled(cplx(1.0 / j, 0.0));
    sum = sum + term;
    bound *= xn / j;
    if (bound < 1e-18) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

bool row_dominant(const CBanded& M) {
  for (int r = 1; r <= M.dim(); ++r) {
    double off = 0.0;
    for (int c = std::max(1, r - M.bandwidth()); c <= std::min(M.dim(), r + M.bandwidth()); ++c)
      if (c != r) off += std::abs(M(r, c));
    if (!(std::abs(M(r, r)) > off)) return false;
  }
  return true;
}

// sum of principal logs of the LU pivots of the block
cplx log_det(const CBanded& block) {
  const int n = block.dim();
  if (row_dominant(block)) {
    // elimination without pivoting is stable for strictly diagonally dominant rows
    CBanded U = block;
    const int bw = U.bandwidth();
    cplx acc = 0.0;
    for (int k = 1; k <= n; ++k) {
      const cplx piv = U(k, k);
      if (piv == cplx(0.0)) throw std::runtime_error("contour touches zero set; shrink radius");
      acc += std::log(piv);
      for (int i = k + 1; i <= std::min(n, k + bw); ++i) {
        const cplx l = U(i, k) / piv;
        if (l == cplx(0.0)) continue;
        for (int j = k + 1; j <= std::min(n, k + bw); ++j) U.add(i, j, -l * U(k, j));
      }
    }
    return acc;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(block.to_dense());
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const cplx u = lu.matrixLU()(i, i);
    if (u == cplx(0.0)) throw std::runtime_error("contour touches zero set; shrink radius");
    acc += std::log(u);
  }
  if (lu.permutationP().determinant() < 0) acc += cplx(0.0, std::numbers::pi);
  return acc;
}

cplx log_det_at(const std::vector<BandedMatrix>& ops, int cut, cplx lam) {
  if (cut == 0) return 0.0;
  CBanded prod = banded_exp(ops[0], lam);
  for (size_t m = 1; m < ops.size(); ++m) prod = prod * banded_exp(ops[m], lam);
  return log_det(prod.principal_block(1, cut));
}

double diagonal_mean(const std::vector<BandedMatrix>& ops, int cut) {
  double s = 0.0;
  for (const auto& A : ops)
    for (int j = 1; j <= cut; ++j) s += A(j, j);
  return s;
}

double auto_radius(const std::vector<BandedMatrix>& ops) {
  double s = 0.0;
  for (const auto& A : ops) s += A.inf_norm();
  return s > 0 ? 0.5 / (2.0 * s) : 1.0;
}

void check_request(const CumulantRequest& req) {
  req.stat.validate();
  if (req.J_list.size() != req.stat.layers.size())
    throw std::invalid_argument("one recurrence matrix per layer required");
  if (req.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (req.k_max > 6) throw std::invalid_argument("cumulants beyond order 6 are not supported");
  if (req.quad_points < 8 * req.k_max) throw std::invalid_argument("quad_points must be >= 8 k_max");
  if (req.radius && !(*req.radius > 0)) throw std::invalid_argument("radius must be positive");
  if (req.n < 0) throw std::invalid_argument("cut index must be >= 0");
  for (const auto& J : req.J_list)
    if (J.dim() != req.J_list[0].dim()) throw std::invalid_argument("recurrence matrices must share a truncation");
}

CumulantReport run_contour(const std::vector<BandedMatrix>& ops, int cut, double mean,
                           const CumulantRequest& req, CumulantMethod method) {
  CumulantReport rep;
  rep.method = method;
  rep.radius = req.radius ? *req.radius : auto_radius(ops);
  if (req.radius && *req.radius >= 2.0 * auto_radius(ops))
    throw std::invalid_argument("radius exceeds the convergence bound (2 sum ||A||)^-1");
  rep.truncation = ops[0].dim();
  int points = req.quad_points;
  detail::ContourResult res;
  double scale = 1.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    res = detail::contour_coefficients(ops, cut, mean, req.k_max, rep.radius, points);
    scale = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= req.k_max; ++k) {
      fact *= k;
      scale = std::max(scale, std::abs(fact * res.coeffs[k].real()));
    }
    if (res.residual <= 1e-8 * scale) break;
    if (attempt == 0) points *= 2;
  }
  rep.quad_points = points;
  rep.residual = res.residual;
  double fact = 1.0;
  for (int k = 1; k <= req.k_max; ++k) {
    fact *= k;
    rep.values[k] = fact * res.coeffs[k].real();
  }
  rep.values[1] += mean;
  return rep;
}

}  // namespace

namespace detail {

ContourResult contour_coefficients(const std::vector<BandedMatrix>& ops, int cut, double mean,
                                   int k_max, double radius, int points) {
  std::vector<cplx> L(points);
  for (int j = 0; j < points; ++j) {
    const cplx lam = std::polar(radius, 2.0 * std::numbers::pi * j / points);
    L[j] = log_det_at(ops, cut, lam) - lam * mean;
  }
  // continuous branch along the contour, anchored on the real axis
  L[0] = cplx(L[0].real(), std::remainder(L[0].imag(), 2.0 * std::numbers::pi));
  for (int j = 1; j < points; ++j) {
    const double d = L[j].imag() - L[j - 1].imag();
    L[j] -= cplx(0.0, 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi)));
  }
  if (std::abs(L[points - 1].imag() - L[0].imag()) > std::numbers::pi)
    throw std::runtime_error("contour touches zero set; shrink radius");

  ContourResult out;
  out.coeffs.assign(k_max + 1, 0.0);
  double fact = 1.0;
  for (int k = 0; k <= k_max; ++k) {
    if (k > 0) fact *= k;
    cplx s = 0.0;
    for (int j = 0; j < points; ++j) s += L[j] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / points);
    out.coeffs[k] = s / (points * std::pow(radius, k));
    if (k > 0) out.residual = std::max(out.residual, fact * std::abs(out.coeffs[k].imag()));
  }
  return out;
}

}  // namespace detail

std::vector<BandedMatrix> layer_operators(const std::vector<BandedMatrix>& J_list,
                                          const LayeredStatistic& stat) {
  if (J_list.size() != stat.layers.size()) throw std::invalid_argument("one recurrence matrix per layer required");
  std::vector<BandedMatrix> ops;
  ops.reserve(J_list.size());
  for (size_t m = 0; m < J_list.size(); ++m) {
    BandedMatrix A = std::visit([&](const auto& f) { return poly_apply(J_list[m], f); }, stat.layers[m]);
    if (stat.weight(m) != 1.0) A = A.scaled(stat.weight(m));
    ops.push_back(std::move(A));
  }
  return ops;
}

int required_truncation(int n, int k_max, const LayeredStatistic& stat, int bandwidth) {
  const int rho_f = std::max(1, stat.max_degree() * bandwidth);
  return n + (k_max + 2) * stat.size() * rho_f + 64;
}

int comparison_window(const std::vector<BandedMatrix>& ops, int k) {
  int a = 0;
  for (const auto& A : ops) a = std::max(a, A.bandwidth());
  return 2 * std::max(a, 1) * (k + 1);
}

BlockDet moment_generating_det(const CumulantRequest& req, double lambda) {
  check_request(req);
  const auto ops = layer_operators(req.J_list, req.stat);
  if (req.n > ops[0].dim()) throw std::length_error("cut index exceeds the truncation");
  if (req.n == 0) return {};
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(ops[0].dim(), ops[0].dim());
  for (const auto& A : ops) prod = prod * expm(Eigen::MatrixXd(lambda * A.to_dense()));
  return principal_block_det(prod, req.n);
}

CumulantReport cumulants_contour(const CumulantRequest& req) {
  check_request(req);
  const auto ops = layer_operators(req.J_list, req.stat);
  if (req.n > ops[0].dim()) throw std::length_error("cut index exceeds the truncation");
  return run_contour(ops, req.n, diagonal_mean(ops, req.n), req, CumulantMethod::contour_full);
}

namespace {

struct WindowedOps {
  std::vector<BandedMatrix> blocks;
  int cut = 0;
  int ell = 0;
};

WindowedOps windowed_ops(const CumulantRequest& req, int k) {
  const auto ops = layer_operators(req.J_list, req.stat);
  WindowedOps w;
  w.ell = comparison_window(ops, k);
  if (req.n + w.ell > ops[0].dim()) throw std::length_error("truncation too small for the comparison window");
  int first = 1;
  for (const auto& A : ops) w.blocks.push_back(window_block(A, {req.n, w.ell}, &first));
  w.cut = req.n - first + 1;
  return w;
}

}  // namespace

CumulantReport cumulants_windowed_report(const CumulantRequest& req) {
  check_request(req);
  if (req.k_max < 2) throw std::invalid_argument("window principle applies to k >= 2 only");
  const auto w = windowed_ops(req, req.k_max);
  CumulantReport rep = run_contour(w.blocks, w.cut, diagonal_mean(w.blocks, w.cut), req,
                                   CumulantMethod::contour_windowed);
  rep.values.erase(1);
  rep.window = w.ell;
  rep.truncation = req.J_list[0].dim();
  return rep;
}

double cumulants_windowed(const CumulantRequest& req, int k) {
  if (k < 2) throw std::invalid_argument("window principle applies to k >= 2 only");
  CumulantRequest r = req;
  r.k_max = k;
  r.quad_points = std::max(req.quad_points, 8 * k);
  return cumulants_windowed_report(r).values.at(k);
}

double composition_series_C2(const std::vector<BandedMatrix>& J_list, const LayeredStatistic& stat, int n) {
  CumulantRequest req;
  req.J_list = J_list;
  req.stat = stat;
  req.n = n;
  req.k_max = 2;
  check_request(req);
  const auto w = windowed_ops(req, 2);
  const int d = w.blocks[0].dim(), c = w.cut;
  // K(lambda) = P (prod e^{lambda A_m} - I) P = lambda K1 + lambda^2 K2 + ...
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d), k2 = Eigen::MatrixXd::Zero(d, d);
  for (const auto& B : w.blocks) {
    const Eigen::MatrixXd A = B.to_dense();
    k2 += sum * A + 0.5 * A * A;
    sum += A;
  }
  const Eigen::MatrixXd K1 = sum.topLeftCorner(c, c);
  return 2.0 * k2.topLeftCorner(c, c).trace() - (K1 * K1).trace();
}

std::vector<double> moments_by_finite_difference(const CumulantRequest& req, int k_max,
                                                 std::vector<double>* errors) {
  check_request(req);
  if (k_max < 1 || k_max > 6) throw std::invalid_argument("finite-difference moments support orders 1..6");
  const auto ops = layer_operators(req.J_list, req.stat);
  const double mean = diagonal_mean(ops, req.n);
  double spread = 0.0;
  for (const auto& A : ops) spread += A.inf_norm();
  // centred moment generating function E e^{lambda (X - C1)}
  auto g = [&](double lam) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(ops[0].dim(), ops[0].dim());
    for (const auto& A : ops) prod = prod * expm(Eigen::MatrixXd(lam * A.to_dense()));
    const BlockDet d = principal_block_det(prod, req.n);
    return d.sign * std::exp(d.log_abs - lam * mean);
  };
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // central difference of order k with O(h^2) error expansion in even powers
  auto diff = [&](int k, double h) {
    double s = 0.0;
    if (k % 2 == 0) {
      for (int j = 0; j <= k; ++j) s += ((j % 2) ? -1.0 : 1.0) * binom(k, j) * g((k / 2.0 - j) * h);
    } else {
      for (int j = 0; j <= k; ++j) {
        const double c = ((j % 2) ? -1.0 : 1.0) * binom(k, j);
        s += 0.5 * c * (g((k / 2.0 - j + 0.5) * h) + g((k / 2.0 - j - 0.5) * h));
      }
    }
    return s / std::pow(h, k);
  };

  std::vector<double> centred(k_max + 1, 0.0), err(k_max + 1, 0.0);
  centred[0] = 1.0;
  const double h0 = spread > 0 ? 1.0 / spread : 1.0;
  for (int k = 1; k <= k_max; ++k) {
    // Neville tableau in h^2 with step halving; stop when the error estimate grows
    const int levels = 8;
    std::vector<std::vector<double>> T(levels, std::vector<double>(levels));
    double best = 0.0, best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i < levels; ++i) {
      T[i][0] = diff(k, h0 / std::ldexp(1.0, i));
      double fac = 1.0;
      for (int j = 1; j <= i; ++j) {
        fac *= 4.0;
        T[i][j] = (fac * T[i][j - 1] - T[i - 1][j - 1]) / (fac - 1.0);
        const double e = std::max(std::abs(T[i][j] - T[i][j - 1]), std::abs(T[i][j] - T[i - 1][j - 1]));
        if (e <= best_err) {
          best_err = e;
          best = T[i][j];
        }
      }
      if (i >= 2 && std::abs(T[i][i] - T[i - 1][i - 1]) >= 2.0 * best_err) break;
    }
    centred[k] = best;
    err[k] = best_err;
  }
  std::vector<double> raw(k_max, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += binom(k, j) * std::pow(mean, k - j) * centred[j];
    raw[k - 1] = s;
  }
  if (errors) errors->assign(err.begin() + 1, err.end());
  return raw;
}

}  // namespace mtclt
