#include "mtclt/stieltjes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtclt/quadrature.hpp"

namespace mtclt {

namespace {

double cdot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  CompensatedSum s;
  for (Eigen::Index i = 0; i < u.size(); ++i) s.add(u[i] * v[i]);
  return s.value();
}

}  // namespace

RecurrenceCoefficients stieltjes(const std::vector<double>& x, const std::vector<double>& w,
                                 int count, Eigen::MatrixXd* values) {
  const Eigen::Index m = static_cast<Eigen::Index>(x.size());
  if (w.size() != x.size()) throw std::invalid_argument("stieltjes: nodes/weights size mismatch");
  if (count < 1 || count > m) throw std::invalid_argument("stieltjes: need 1 <= count <= nodes");

  Eigen::VectorXd sw(m), xv(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(w[i] >= 0.0)) throw std::invalid_argument("stieltjes: weights must be non-negative");
    sw[i] = std::sqrt(w[i]);
    xv[i] = x[i];
  }
  Eigen::MatrixXd Q(m, count);
  RecurrenceCoefficients rc;
  rc.a.assign(count, 0.0);
  rc.b.assign(count, 0.0);
  double nrm = std::sqrt(cdot(sw, sw));
  if (nrm == 0.0) throw std::invalid_argument("stieltjes: zero measure");
  rc.min_norm = nrm;
  Q.col(0) = sw / nrm;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd v = xv.cwiseProduct(Q.col(k));
    rc.b[k] = cdot(Q.col(k), v);
    if (k + 1 == count) break;
    v -= rc.b[k] * Q.col(k);
    if (k > 0) v -= rc.a[k] * Q.col(k - 1);
    for (int j = 0; j <= k; ++j) v -= cdot(Q.col(j), v) * Q.col(j);
    double a = std::sqrt(cdot(v, v));
    rc.min_norm = std::min(rc.min_norm, a);
    if (!(a > 0.0)) throw std::runtime_error("stieltjes: measure support exhausted");
    rc.a[k + 1] = a;
    Q.col(k + 1) = v / a;
  }
  if (values) {
    values->resize(m, count);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (sw[i] == 0.0) throw std::invalid_argument("stieltjes: zero weight node");
      values->row(i) = Q.row(i) / sw[i];
    }
  }
  return rc;
}

}  // namespace mtclt
