#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace kbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Controls how numerical rank is decided when truncating an SVD or
/// forming a pseudoinverse. Relative mode zeroes singular values below
/// rel_tol * sigma_max; fixed mode keeps exactly fixed_rank of them.
struct RankPolicy {
  enum class Mode { RelativeThreshold, FixedRank };
  Mode mode = Mode::RelativeThreshold;
  double rel_tol = 1e-10;
  std::optional<Index> fixed_rank;

  static RankPolicy relative(double tol) { return {Mode::RelativeThreshold, tol, {}}; }
  static RankPolicy fixed(Index r) { return {Mode::FixedRank, 1e-10, r}; }
};

/// Block Hankel matrix of depth L built from the columns of w (one column
/// per time step). Result is (L*q) x (T-L+1) with block (i,j) = w_{i+j}.
Matrix hankel(const Matrix& w, Index depth);

/// Convenience overload for a sequence of vectors.
Matrix hankel(const std::vector<Vector>& w, Index depth);

/// Persistent excitation of order L: the depth-L Hankel matrix of w has
/// full row rank under the given policy.
bool is_pe(const Matrix& w, Index order, const RankPolicy& policy = {});

Index numerical_rank(const Matrix& m, const RankPolicy& policy = {});

/// Moore-Penrose pseudoinverse with singular values below the policy cut
/// treated as zero.
Matrix pinv(const Matrix& m, const RankPolicy& policy = {});

/// Oblique projection of the rowspace of A onto the rowspace of C along
/// the rowspace of B. All three must share the column count.
Matrix oblique_project(const Matrix& a, const Matrix& b, const Matrix& c,
                       const RankPolicy& policy = {});

struct EigSym {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, sign-fixed
};

/// Symmetric eigendecomposition. Inputs are symmetrized when the asymmetry
/// is below 1e-8 * max|M| and rejected otherwise. Eigenvector signs are
/// fixed by making the component of largest magnitude positive.
EigSym eig_sym(const Matrix& m);

struct TruncatedSvd {
  Matrix u;
  Vector sigma;  // strictly positive, descending
  Matrix v;

  Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
  Index rank() const { return sigma.size(); }
};

/// Rank-truncated SVD under the given policy. Factors are empty for the
/// zero matrix. Left singular vector signs follow the eig_sym convention.
TruncatedSvd svd_trunc(const Matrix& m, const RankPolicy& policy = {});

}  // namespace kbm
