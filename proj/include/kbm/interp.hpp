#pragma once

#include <optional>
#include <vector>

#include "kbm/kernels.hpp"
#include "kbm/systems.hpp"

namespace kbm {

/// Stacked regression window z_t = (u_t..u_{t+L}, y_t..y_{t+L-1}) with
/// target y_plus = y_{t+L}.
struct RegressionSample {
  Vector z;
  Vector y_plus;
  Index t = 0;
};

std::vector<RegressionSample> build_regressors(const Trajectory& traj, Index lag);

/// Minimum-norm kernel interpolator f_N = sum_j kappa(., z_j) v_j.
struct Interpolator {
  OperatorKernel kernel;
  std::vector<Vector> centers;
  std::vector<Vector> coeffs;  // v_j in R^p
  Matrix gram;                 // K_N
  double norm_sq = 0.0;        // vbar^T K_N vbar, clamped at 0
  double fit_residual = 0.0;   // ||K_N vbar - Y_N|| / (1 + ||Y_N||)
  bool feasible = true;        // residual within the feasibility tolerance

  Vector predict(const Vector& z) const;
};

inline constexpr double kFeasibilityTol = 1e-8;

Interpolator fit_min_norm(const std::vector<RegressionSample>& samples,
                          const OperatorKernel& kernel, const RankPolicy& policy = {});

/// Variant taking raw center/target pairs (used when the data are not
/// regression windows, e.g. explicitly constructed kernel expansions).
Interpolator fit_min_norm(const std::vector<Vector>& centers,
                          const std::vector<Vector>& targets,
                          const OperatorKernel& kernel, const RankPolicy& policy = {});

double interp_norm_sq(const Interpolator& interp);

enum class SigmaClass { Zero, PositiveDefinite, SingularNonzero };

/// Sigma_N(z) = kappa(z,z) - k_N(z) K_N^+ k_N(z)^*, classified by its
/// eigenvalues under the eps_sigma thresholds.
struct SigmaCertificate {
  Matrix sigma;
  SigmaClass classification = SigmaClass::Zero;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

SigmaCertificate sigma_certificate(const std::vector<Vector>& centers,
                                   const OperatorKernel& kernel, const Vector& z,
                                   const RankPolicy& policy = {},
                                   double eps_sigma = 1e-8);

/// Per-query report for the recursive interpolation check: prediction,
/// weighted error, norm increment, the identity residual between the two,
/// and the slack of the norm bound when the ground-truth norm is known.
struct RepresenterReport {
  Vector predicted;
  std::optional<Vector> actual;
  double weighted_error_sq = 0.0;
  double norm_increment = 0.0;
  double identity_residual = 0.0;
  SigmaClass classification = SigmaClass::Zero;
  std::optional<double> bound_slack;  // ||f*||^2 - ||f_{T+1}||^2
  bool feasible = true;
  double null_component = 0.0;  // part of (y - yhat) in ker(Sigma), singular case only
};

RepresenterReport representer_check(const std::vector<RegressionSample>& offline,
                                    const RegressionSample& online,
                                    const OperatorKernel& kernel,
                                    std::optional<double> fstar_norm_sq = {},
                                    const RankPolicy& policy = {},
                                    double eps_sigma = 1e-8);

}  // namespace kbm
