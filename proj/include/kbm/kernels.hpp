#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kbm/linalg.hpp"

namespace kbm {

/// Positive-type scalar kernels on R^d.
struct ScalarKernel {
  enum class Kind { Linear, Gaussian, Fock, Polynomial };

  Kind kind = Kind::Linear;
  double bandwidth = 1.0;        // gaussian
  std::vector<double> rho;       // fock weights rho_0..rho_K
  int degree = 2;                // polynomial

  double operator()(const Vector& x, const Vector& y) const;

  static ScalarKernel linear();
  static ScalarKernel gaussian(double sigma);
  /// Truncated Fock-weighted kernel sum_{k<=K} <x,y>^k / (k! rho_k),
  /// K = rho.size() - 1.
  static ScalarKernel fock(std::vector<double> rho);
  static ScalarKernel polynomial(int degree);
};

/// Deterministic feature maps R^m -> R^q from a small built-in catalog.
/// Table maps a finite input alphabet to stored values; evaluation on a
/// point not in the table is a contract error.
struct FeatureMap {
  enum class Kind { Identity, Tanh, Polynomial, Table };

  Kind kind = Kind::Identity;
  int input_dim = 1;
  int degree = 1;  // polynomial: stacks u, u^2, ..., u^degree componentwise
  std::vector<std::pair<Vector, Vector>> table;

  int output_dim() const;
  Vector operator()(const Vector& u) const;

  static FeatureMap identity(int m);
  static FeatureMap tanh(int m);
  static FeatureMap polynomial(int m, int degree);
  static FeatureMap tabulated(std::vector<std::pair<Vector, Vector>> entries);
};

/// Operator-valued positive-type kernel, evaluable pairwise to a p x p
/// real matrix. Three variants:
///   scalar-lift   kappa_s(z,z') * I_p
///   direct-sum    kappa_U(u-part) + kappa_Y(y-part), split at a fixed index
///   rank-one      phi(u) phi(u')^T for a catalog feature map phi
class OperatorKernel {
 public:
  enum class Kind { ScalarLift, DirectSum, RankOneFeature };

  /// Defaults to the linear scalar lift with p = 1.
  OperatorKernel() = default;

  static OperatorKernel scalar_lift(ScalarKernel k, int p);
  static OperatorKernel direct_sum(OperatorKernel ku, OperatorKernel ky, Index split);
  static OperatorKernel rank_one(FeatureMap phi);

  Matrix operator()(const Vector& z1, const Vector& z2) const;

  Kind kind() const { return kind_; }
  int output_dim() const { return p_; }
  bool is_rank_one() const { return kind_ == Kind::RankOneFeature; }
  const FeatureMap& feature() const;
  const ScalarKernel& scalar() const;
  Index split() const { return split_; }
  const OperatorKernel& u_part() const { return *ku_; }
  const OperatorKernel& y_part() const { return *ky_; }

 private:
  Kind kind_ = Kind::ScalarLift;
  int p_ = 1;
  ScalarKernel scalar_;
  FeatureMap phi_;
  Index split_ = 0;  // direct-sum: length of the u-part of z
  std::shared_ptr<const OperatorKernel> ku_, ky_;
};

/// Block Gram matrix: block (i,j) = kappa(z_i, z_j), size pN x pN.
Matrix gram_block(const OperatorKernel& k, const std::vector<Vector>& centers);

/// Block row vector k_N(z), size p x pN with j-th block kappa(z, z_j).
Matrix kernel_row(const OperatorKernel& k, const Vector& z,
                  const std::vector<Vector>& centers);

/// Tr kappa(u,u') = <phi(u), phi(u')> for rank-one-feature kernels.
double trace_inner(const OperatorKernel& k, const Vector& u, const Vector& v);

}  // namespace kbm
