#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtclt/polynomial.hpp"

namespace mtclt {

// Finite truncation of a semi-infinite banded operator. Indices are 1-based.
// Storage is one contiguous run per diagonal offset d = s - r in [-bw, bw].
template <typename T>
class BasicBanded {
 public:
  using Dense = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  BasicBanded() : BasicBanded(1, 0) {}
  BasicBanded(int dim, int bandwidth) : dim_(dim), bw_(bandwidth) {
    if (dim < 1) throw std::invalid_argument("banded matrix needs dim >= 1");
    if (bandwidth < 0 || bandwidth >= dim)
      throw std::invalid_argument("bandwidth must satisfy 0 <= bandwidth < dim");
    data_.assign(static_cast<size_t>(2 * bw_ + 1) * dim_, T(0));
  }

  static BasicBanded identity(int dim, T c = T(1)) {
    BasicBanded m(dim, 0);
    for (int r = 1; r <= dim; ++r) m.set(r, r, c);
    return m;
  }

  // Entries outside the band must vanish exactly.
  static BasicBanded from_dense(const Dense& a, int bandwidth) {
    if (a.rows() != a.cols()) throw std::invalid_argument("from_dense needs a square matrix");
    BasicBanded m(static_cast<int>(a.rows()), bandwidth);
    for (int r = 1; r <= m.dim_; ++r)
      for (int s = 1; s <= m.dim_; ++s) {
        if (m.in_band(r, s))
          m.set(r, s, a(r - 1, s - 1));
        else if (a(r - 1, s - 1) != T(0))
          throw std::invalid_argument("dense matrix has entries outside the declared band");
      }
    return m;
  }

  int dim() const { return dim_; }
  int bandwidth() const { return bw_; }

  bool in_band(int r, int s) const {
    return r >= 1 && s >= 1 && r <= dim_ && s <= dim_ && std::abs(r - s) <= bw_;
  }

  T operator()(int r, int s) const {
    if (r < 1 || s < 1 || r > dim_ || s > dim_)
      throw std::out_of_range("banded index out of range");
    if (std::abs(r - s) > bw_) return T(0);
    return data_[slot(r, s)];
  }

  void set(int r, int s, T v) {
    if (!in_band(r, s)) throw std::out_of_range("set outside the band");
    data_[slot(r, s)] = v;
  }
  void add(int r, int s, T v) {
    if (!in_band(r, s)) throw std::out_of_range("add outside the band");
    data_[slot(r, s)] += v;
  }

  Dense to_dense() const {
    Dense a = Dense::Zero(dim_, dim_);
    for (int r = 1; r <= dim_; ++r)
      for (int s = std::max(1, r - bw_); s <= std::min(dim_, r + bw_); ++s)
        a(r - 1, s - 1) = data_[slot(r, s)];
    return a;
  }

  // Same entries viewed with a larger (capped) bandwidth.
  BasicBanded widened(int bw) const {
    bw = std::min(std::max(bw, bw_), dim_ - 1);
    BasicBanded m(dim_, bw);
    for (int r = 1; r <= dim_; ++r)
      for (int s = std::max(1, r - bw_); s <= std::min(dim_, r + bw_); ++s)
        m.set(r, s, data_[slot(r, s)]);
    return m;
  }

  // Principal sub-block on indices first..last (1-based, inclusive).
  BasicBanded principal_block(int first, int last) const {
    if (first < 1 || last > dim_ || first > last)
      throw std::out_of_range("principal block out of range");
    int d = last - first + 1;
    BasicBanded m(d, std::min(bw_, d - 1));
    for (int r = 1; r <= d; ++r)
      for (int s = std::max(1, r - m.bw_); s <= std::min(d, r + m.bw_); ++s)
        m.set(r, s, (*this)(r + first - 1, s + first - 1));
    return m;
  }

  BasicBanded scaled(T c) const {
    BasicBanded m = *this;
    for (auto& x : m.data_) x *= c;
    return m;
  }

  BasicBanded operator+(const BasicBanded& o) const {
    check_dim(o);
    BasicBanded m = widened(std::max(bw_, o.bw_));
    for (int r = 1; r <= dim_; ++r)
      for (int s = std::max(1, r - o.bw_); s <= std::min(dim_, r + o.bw_); ++s)
        m.add(r, s, o.data_[o.slot(r, s)]);
    return m;
  }
  BasicBanded operator-(const BasicBanded& o) const { return *this + o.scaled(T(-1)); }

  BasicBanded operator*(const BasicBanded& o) const {
    check_dim(o);
    BasicBanded m(dim_, std::min(bw_ + o.bw_, dim_ - 1));
    for (int r = 1; r <= dim_; ++r)
      for (int k = std::max(1, r - bw_); k <= std::min(dim_, r + bw_); ++k) {
        const T a = data_[slot(r, k)];
        if (a == T(0)) continue;
        for (int s = std::max(1, k - o.bw_); s <= std::min(dim_, k + o.bw_); ++s)
          m.data_[m.slot(r, s)] += a * o.data_[o.slot(k, s)];
      }
    return m;
  }

  // Maximum absolute row sum; a Gershgorin bound on the spectrum and on the operator norm.
  double inf_norm() const {
    double best = 0.0;
    for (int r = 1; r <= dim_; ++r) {
      double s = 0.0;
      for (int c = std::max(1, r - bw_); c <= std::min(dim_, r + bw_); ++c)
        s += std::abs(data_[slot(r, c)]);
      best = std::max(best, s);
    }
    return best;
  }

  bool all_finite() const {
    for (const auto& x : data_)
      if (!std::isfinite(std::abs(x))) return false;
    return true;
  }

  friend bool operator==(const BasicBanded& a, const BasicBanded& b) {
    return a.dim_ == b.dim_ && a.bw_ == b.bw_ && a.data_ == b.data_;
  }

 private:
  size_t slot(int r, int s) const {
    return static_cast<size_t>(s - r + bw_) * dim_ + static_cast<size_t>(r - 1);
  }
  void check_dim(const BasicBanded& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("banded dimension mismatch");
  }

  int dim_, bw_;
  std::vector<T> data_;
};

using BandedMatrix = BasicBanded<double>;

struct WindowSpec {
  int center = 1;      // cut index n
  int half_width = 0;  // ell
};

struct BlockDet {
  int sign = 1;
  double log_abs = 0.0;
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

// Horner evaluation of p(J) on the truncation.
BandedMatrix poly_apply(const BandedMatrix& J, const Polynomial& p);
// Clenshaw evaluation of a Chebyshev series at J.
BandedMatrix poly_apply(const BandedMatrix& J, const ChebyshevSeries& p);

// R A R with R the projector onto indices (n - ell, n + ell].
BandedMatrix window(const BandedMatrix& A, const WindowSpec& w);
// The same active indices, clipped to [1, dim], returned as a standalone block.
// first_index receives the global index of the block's first row.
BandedMatrix window_block(const BandedMatrix& A, const WindowSpec& w, int* first_index = nullptr);

BlockDet principal_block_det(const Eigen::MatrixXd& A, int n);

double hs_commutator_norm(const BandedMatrix& J, int n);

// exp(A) by scaling and squaring with the degree-13 diagonal Pade approximant.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> expm(
    const Eigen::MatrixBase<Derived>& A_in) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat A = A_in;
  if (A.rows() != A.cols()) throw std::invalid_argument("expm needs a square matrix");
  if (!A.allFinite()) throw std::invalid_argument("expm: non-finite entries");
  const Eigen::Index n = A.rows();
  if (n == 0) return A;
  if (A.isZero(0.0)) return Mat::Identity(n, n);

  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  if (s > 0) A /= std::ldexp(1.0, s);

  const Mat I = Mat::Identity(n, n);
  const Mat A2 = A * A, A4 = A2 * A2, A6 = A4 * A2;
  Mat U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 +
               b[1] * I);
  Mat V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 +
          b[0] * I;
  Mat R = (V - U).partialPivLu().solve(V + U);
  for (int k = 0; k < s; ++k) R = R * R;
  return R;
}

}  // namespace mtclt
