#include "kbm/linalg.hpp"

#include <Eigen/SVD>
#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace kbm {

namespace {

void fix_column_signs(Matrix& u, Matrix* paired) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index imax = 0;
    u.col(j).cwiseAbs().maxCoeff(&imax);
    if (u(imax, j) < 0.0) {
      u.col(j) = -u.col(j);
      if (paired) paired->col(j) = -paired->col(j);
    }
  }
}

Index rank_from_singulars(const Vector& sv, const RankPolicy& policy) {
  if (sv.size() == 0) return 0;
  if (policy.mode == RankPolicy::Mode::FixedRank) {
    if (!policy.fixed_rank) throw std::invalid_argument("RankPolicy: fixed mode without fixed_rank");
    Index r = std::min<Index>(*policy.fixed_rank, sv.size());
    // never keep exact zeros even in fixed mode
    while (r > 0 && sv(r - 1) <= 0.0) --r;
    return r;
  }
  const double cut = policy.rel_tol * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut && sv(r) > 0.0) ++r;
  return r;
}

}  // namespace

Matrix hankel(const Matrix& w, Index depth) {
  const Index q = w.rows();
  const Index t = w.cols();
  if (depth < 1 || depth > t)
    throw std::invalid_argument("hankel: depth must satisfy 1 <= L <= T");
  if (!w.allFinite()) throw std::invalid_argument("hankel: non-finite entries");
  const Index ncols = t - depth + 1;
  Matrix h(depth * q, ncols);
  for (Index i = 0; i < depth; ++i)
    for (Index j = 0; j < ncols; ++j)
      h.block(i * q, j, q, 1) = w.col(i + j);
  return h;
}

Matrix hankel(const std::vector<Vector>& w, Index depth) {
  if (w.empty()) throw std::invalid_argument("hankel: empty sequence");
  const Index q = w.front().size();
  Matrix m(q, static_cast<Index>(w.size()));
  for (Index j = 0; j < m.cols(); ++j) {
    if (w[j].size() != q) throw std::invalid_argument("hankel: ragged vector sequence");
    m.col(j) = w[j];
  }
  return hankel(m, depth);
}

Index numerical_rank(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  return rank_from_singulars(svd.singularValues(), policy);
}

bool is_pe(const Matrix& w, Index order, const RankPolicy& policy) {
  const Matrix h = hankel(w, order);
  return numerical_rank(h, policy) == h.rows();
}

Matrix pinv(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  if (!m.allFinite()) throw std::invalid_argument("pinv: non-finite entries");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const Index r = rank_from_singulars(sv, policy);
  if (r == 0) return Matrix::Zero(m.cols(), m.rows());
  return svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(r).transpose();
}

Matrix oblique_project(const Matrix& a, const Matrix& b, const Matrix& c,
                       const RankPolicy& policy) {
  const Index k = a.cols();
  if (b.cols() != k || c.cols() != k)
    throw std::invalid_argument("oblique_project: column counts differ");
  const Index r = c.rows();
  const Index q = b.rows();
  Matrix gram(r + q, r + q);
  gram.topLeftCorner(r, r) = c * c.transpose();
  gram.topRightCorner(r, q) = c * b.transpose();
  gram.bottomLeftCorner(q, r) = b * c.transpose();
  gram.bottomRightCorner(q, q) = b * b.transpose();
  Matrix stacked(k, r + q);
  stacked.leftCols(r) = c.transpose();
  stacked.rightCols(q) = b.transpose();
  return a * stacked * pinv(gram, policy).leftCols(r) * c;
}

EigSym eig_sym(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_sym: matrix not square");
  if (m.size() == 0) return {};
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-8 * scale)
    throw std::invalid_argument("eig_sym: input asymmetric beyond tolerance");
  Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_sym: solver failed");
  // SelfAdjointEigenSolver sorts ascending; reverse to descending.
  const Index n = m.rows();
  EigSym out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    out.values(j) = es.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  fix_column_signs(out.vectors, nullptr);
  return out;
}

TruncatedSvd svd_trunc(const Matrix& m, const RankPolicy& policy) {
  if (m.size() == 0) return {};
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index r = rank_from_singulars(svd.singularValues(), policy);
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.sigma = svd.singularValues().head(r);
  out.v = svd.matrixV().leftCols(r);
  fix_column_signs(out.u, &out.v);
  return out;
}

}  // namespace kbm
