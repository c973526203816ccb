#pragma once

#include <optional>
#include <utility>

#include "kbm/kernels.hpp"
#include "kbm/systems.hpp"

namespace kbm {

/// Past/future output Hankel blocks and the input/output Gram matrices
/// built from trace-kernel evaluations. All column blocks have
/// N_c = T - 2L + 1 columns.
struct PastFutureData {
  Matrix y_past, y_future;        // pL x Nc
  Matrix k_past_u, k_future_u;    // Nc x Nc, trace-kernel input Grams
  Matrix k_past_y, k_future_y;    // Nc x Nc, output Grams
  Matrix k_bar_p;                 // K_p^u + K_p^y
  Matrix k_bar_pf;                // K_p^u + K_p^y + K_f^u
  Index lag = 1;
  Index n_cols = 0;
  OperatorKernel kernel;          // rank-one-feature
  Matrix inputs;                  // source inputs, m x T (for kernel vectors)
};

PastFutureData build_past_future(const Trajectory& traj, Index lag,
                                 const OperatorKernel& kernel);

/// Numerical rank of the depth-(2L+n) input Gram built from trace
/// kernels, and whether it equals (2L+n)q.
std::pair<Index, bool> input_rank_check(const Trajectory& traj, Index lag, Index order,
                                        const OperatorKernel& kernel,
                                        const RankPolicy& policy = {});

/// Oblique projection Pi = Y_f (Kbar_pf)^+ Kbar_p.
Matrix oblique_pi(const PastFutureData& data, const RankPolicy& policy = {});

struct SubspaceResult {
  Matrix pi;                 // pL x Nc
  Index order = 0;           // n-hat
  Matrix observability;      // pL x n-hat
  Matrix states;             // n-hat x Nc (X_f, up to similarity)
  Vector singular_values;    // full spectrum of Pi
  bool via_eigen_route = false;
};

/// Factors Pi = O_L X_f. The default route truncates the SVD of Pi; the
/// eigen route goes through the Gram-matrix eigenproblems (Pi^T Pi and
/// Pi Pi^T assembled from kernel matrices alone).
SubspaceResult recover_states(const PastFutureData& data,
                              std::optional<Index> order = {},
                              bool eigen_route = false,
                              const RankPolicy& policy = {});

/// Fundamental-lemma style membership test for a length-2L candidate.
struct MembershipVerdict {
  bool feasible = false;
  Vector xi;
  double past_residual = 0.0;    // stacked past/future-input system, relative
  double future_residual = 0.0;  // ||k_f^y - K_f^y xi||, relative
  Matrix predicted_future;       // p x L
};

MembershipVerdict membership_test(const PastFutureData& data, const Trajectory& candidate,
                                  double threshold = 1e-6, const RankPolicy& policy = {});

/// Subspace predictor yhat_{L:2L-1} = (Y_f^T)^+ K_f^y xi. The stacked
/// system residual is reported through *residual when non-null.
Matrix subspace_predict(const PastFutureData& data, const Trajectory& past,
                        const Matrix& future_inputs, double* residual = nullptr,
                        const RankPolicy& policy = {});

}  // namespace kbm
