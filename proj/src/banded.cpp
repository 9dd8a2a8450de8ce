#include "mtclt/banded.hpp"

namespace mtclt {

namespace {

void check_margin(const BandedMatrix& J, int degree) {
  if (static_cast<long>(degree) * J.bandwidth() >= J.dim())
    throw std::length_error("truncation too small");
}

}  // namespace

BandedMatrix poly_apply(const BandedMatrix& J, const Polynomial& p) {
  const int d = p.degree();
  check_margin(J, d);
  BandedMatrix r = BandedMatrix::identity(J.dim(), p.coeff(d));
  for (int k = d - 1; k >= 0; --k) r = r * J + BandedMatrix::identity(J.dim(), p.coeff(k));
  return r.widened(d * J.bandwidth());
}

BandedMatrix poly_apply(const BandedMatrix& J, const ChebyshevSeries& p) {
  const int d = p.degree();
  check_margin(J, d);
  const int S = J.dim();
  const double scale = 2.0 / (p.hi() - p.lo());
  const BandedMatrix U = J.scaled(scale) - BandedMatrix::identity(S, (p.lo() + p.hi()) / (p.hi() - p.lo()));
  const auto& c = p.coeffs();
  BandedMatrix b1(S, 0), b2(S, 0);
  for (int k = d; k >= 1; --k) {
    BandedMatrix b0 = (U * b1).scaled(2.0) - b2 + BandedMatrix::identity(S, c[k]);
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  BandedMatrix r = U * b1 - b2 + BandedMatrix::identity(S, c[0]);
  return r.widened(d * J.bandwidth());
}

BandedMatrix window(const BandedMatrix& A, const WindowSpec& w) {
  if (w.half_width < 0) throw std::invalid_argument("window half width must be >= 0");
  const long lo = static_cast<long>(w.center) - w.half_width;  // exclusive
  const long hi = static_cast<long>(w.center) + w.half_width;  // inclusive
  BandedMatrix out(A.dim(), A.bandwidth());
  for (int r = 1; r <= A.dim(); ++r) {
    if (r <= lo || r > hi) continue;
    for (int s = std::max(1, r - A.bandwidth()); s <= std::min(A.dim(), r + A.bandwidth()); ++s)
      if (s > lo && s <= hi) out.set(r, s, A(r, s));
  }
  return out;
}

BandedMatrix window_block(const BandedMatrix& A, const WindowSpec& w, int* first_index) {
  if (w.half_width < 1) throw std::invalid_argument("window block needs half width >= 1");
  const int first = static_cast<int>(std::max<long>(1, static_cast<long>(w.center) - w.half_width + 1));
  const int last = static_cast<int>(std::min<long>(A.dim(), static_cast<long>(w.center) + w.half_width));
  if (first_index) *first_index = first;
  return A.principal_block(first, last);
}

BlockDet principal_block_det(const Eigen::MatrixXd& A, int n) {
  if (n < 0 || n > A.rows() || A.rows() != A.cols())
    throw std::invalid_argument("principal_block_det: need n <= dim of a square matrix");
  BlockDet d;
  if (n == 0) return d;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A.topLeftCorner(n, n));
  const Eigen::MatrixXd& m = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  double la = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = m(i, i);
    if (u == 0.0) return {0, -std::numeric_limits<double>::infinity()};
    if (u < 0) sign = -sign;
    la += std::log(std::abs(u));
  }
  d.sign = sign;
  d.log_abs = la;
  return d;
}

double hs_commutator_norm(const BandedMatrix& J, int n) {
  if (n < 0 || n > J.dim() - J.bandwidth())
    throw std::invalid_argument("hs_commutator_norm: cut too close to the truncation edge");
  double s = 0.0;
  const int bw = J.bandwidth();
  for (int r = std::max(1, n - bw + 1); r <= std::min(J.dim(), n + bw); ++r)
    for (int c = std::max(1, r - bw); c <= std::min(J.dim(), r + bw); ++c)
      if ((r <= n) != (c <= n)) s += J(r, c) * J(r, c);
  return std::sqrt(s);
}

}  // namespace mtclt
