#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "kbm/kernels.hpp"
#include "kbm/linalg.hpp"

namespace kbm {

/// Paired input/output sequences over a discrete time window; one column
/// per time step.
struct Trajectory {
  Matrix inputs;   // m x T
  Matrix outputs;  // p x T
  int t0 = 0;

  Index length() const { return inputs.cols(); }
  Index input_dim() const { return inputs.rows(); }
  Index output_dim() const { return outputs.rows(); }
  void validate() const;
};

/// Nonlinear autoregressive model y_{t+L} + sum_k A_k y_{t+L-k} = g(u_{t:t+L}).
struct ARModel {
  Index lag = 1;                             // L
  Index m = 1, p = 1;
  std::vector<Matrix> a;                     // A_1..A_L, each p x p
  std::function<Vector(const Vector&)> g;    // on stacked u_{0:L}, length m(L+1)
  std::optional<OperatorKernel> input_kernel;  // metadata for the forcing term
};

/// Forcing term given as a kernel expansion sum_j kappa(., c_j) w_j.
std::function<Vector(const Vector&)> kernel_expansion(
    const OperatorKernel& kernel, std::vector<Vector> centers,
    std::vector<Vector> coeffs);

Trajectory simulate_ar(const ARModel& model, const Matrix& u, const Matrix& y_init);

/// Hammerstein state-space model x_{t+1} = A x_t + B psi1(u_t),
/// y_t = C x_t + D psi2(u_t). The single-phi variant uses psi1 == psi2.
struct StateSpaceModel {
  Matrix a, b, c, d;
  FeatureMap psi1, psi2;
  Vector x0;

  Index state_dim() const { return a.rows(); }
  Index input_dim() const { return psi1.input_dim; }
  Index output_dim() const { return c.rows(); }
  void validate() const;
};

/// Simulates and also returns the state sequence x_0..x_{T-1} (n x T).
std::pair<Trajectory, Matrix> simulate_ss(const StateSpaceModel& model, const Matrix& u);

struct RealizationMatrices {
  Matrix controllability;           // C_L, n x qL
  Matrix observability;             // O_L, pL x n
  Matrix reversed_controllability;  // Delta_L, n x qL
  Matrix toeplitz_strict;           // T~_L, pL x qL
  Matrix toeplitz;                  // T_L = T~_L + I_L (x) D
  std::vector<Matrix> markov;       // M_0..M_{L-1}, each p x q
  Index observability_rank = 0;
};

RealizationMatrices realization(const StateSpaceModel& model, Index depth,
                                const RankPolicy& policy = {});

/// Exact conversion of an observable Hammerstein model to AR form:
/// A_k from the blocks of Q = C A^L O_L^+ and g = S psi over stacked
/// features (E_t, F_t, psi2(u_t)). Requires rank(O_L) = n.
ARModel ss_to_ar(const StateSpaceModel& model, Index lag, const RankPolicy& policy = {});

/// Linear AR model with forcing g(u_{0:L}) = sum_l B_l u_{L-l}.
ARModel make_lti_ar(std::vector<Matrix> a, std::vector<Matrix> b);

/// Truncated Volterra functional on scalar input windows of length L+1.
/// h_k is stored dense as a flat tensor over indices in {0..L}^k.
struct VolterraFunction {
  double h0 = 0.0;
  Index lag = 1;                       // L
  std::vector<std::vector<double>> h;  // h[k-1] has (L+1)^k entries, k = 1..K

  Index order() const { return static_cast<Index>(h.size()); }
};

double eval_volterra(const VolterraFunction& v, const Vector& u_window);

/// Seeded i.i.d. uniform [-1,1] excitation, m x T.
Matrix random_inputs(Index m, Index t, std::uint64_t seed);

}  // namespace kbm
