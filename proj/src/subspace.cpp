#include "kbm/subspace.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kbm {

namespace {

// Feature images of all input columns, q x T.
Matrix feature_images(const OperatorKernel& kernel, const Matrix& u) {
  const FeatureMap& phi = kernel.feature();
  Matrix out(phi.output_dim(), u.cols());
  for (Index t = 0; t < u.cols(); ++t) out.col(t) = phi(u.col(t));
  return out;
}

// [K]_{ij} = sum_{k=0}^{L-1} <phi(u_{i+off+k}), phi(u_{j+off+k})>
Matrix windowed_gram(const Matrix& g0, Index n_cols, Index lag, Index offset) {
  Matrix k = Matrix::Zero(n_cols, n_cols);
  for (Index i = 0; i < n_cols; ++i)
    for (Index j = 0; j < n_cols; ++j)
      for (Index r = 0; r < lag; ++r) k(i, j) += g0(i + offset + r, j + offset + r);
  return k;
}

Matrix output_block(const Matrix& y, Index n_cols, Index lag, Index offset) {
  const Index p = y.rows();
  Matrix block(p * lag, n_cols);
  for (Index k = 0; k < lag; ++k)
    for (Index j = 0; j < n_cols; ++j) block.block(k * p, j, p, 1) = y.col(offset + j + k);
  return block;
}

}  // namespace

PastFutureData build_past_future(const Trajectory& traj, Index lag,
                                 const OperatorKernel& kernel) {
  traj.validate();
  if (lag < 1) throw std::invalid_argument("build_past_future: lag must be >= 1");
  const Index t_total = traj.length();
  if (t_total < 2 * lag + 1)
    throw std::invalid_argument("build_past_future: trajectory shorter than 2L+1");
  if (!kernel.is_rank_one())
    throw std::invalid_argument("build_past_future: kernel must be rank-one-feature");

  PastFutureData data;
  data.lag = lag;
  data.n_cols = t_total - 2 * lag + 1;
  data.kernel = kernel;
  data.inputs = traj.inputs;

  data.y_past = output_block(traj.outputs, data.n_cols, lag, 0);
  data.y_future = output_block(traj.outputs, data.n_cols, lag, lag);

  const Matrix phi = feature_images(kernel, traj.inputs);
  const Matrix g0 = phi.transpose() * phi;
  data.k_past_u = windowed_gram(g0, data.n_cols, lag, 0);
  data.k_future_u = windowed_gram(g0, data.n_cols, lag, lag);
  data.k_past_y = data.y_past.transpose() * data.y_past;
  data.k_future_y = data.y_future.transpose() * data.y_future;
  data.k_bar_p = data.k_past_u + data.k_past_y;
  data.k_bar_pf = data.k_bar_p + data.k_future_u;
  return data;
}

std::pair<Index, bool> input_rank_check(const Trajectory& traj, Index lag, Index order,
                                        const OperatorKernel& kernel,
                                        const RankPolicy& policy) {
  const Index depth = 2 * lag + order;
  if (traj.length() < depth)
    throw std::invalid_argument("input_rank_check: trajectory shorter than 2L+n");
  const Matrix phi = feature_images(kernel, traj.inputs);
  const Index q = phi.rows();
  const Matrix h = hankel(phi, depth);
  const Matrix gram = h.transpose() * h;
  // Gram ranks match Hankel ranks; go through the Gram to stay kernel-only.
  Eigen::BDCSVD<Matrix> svd(gram);
  const Vector& sv = svd.singularValues();
  Index rank = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    // Gram singular values are squared Hankel ones, and the Gram's numerical
    // noise floor sits at ~eps * sv(0); keep the cut above both.
    const double eps_floor = 1e4 * std::numeric_limits<double>::epsilon();
    const double cut = std::max(policy.rel_tol * policy.rel_tol, eps_floor) * sv(0);
    while (rank < sv.size() && sv(rank) > cut) ++rank;
  }
  if (policy.mode == RankPolicy::Mode::FixedRank && policy.fixed_rank)
    rank = std::min(rank, *policy.fixed_rank);
  return {rank, rank == depth * q};
}

Matrix oblique_pi(const PastFutureData& data, const RankPolicy& policy) {
  return data.y_future * pinv(data.k_bar_pf, policy) * data.k_bar_p;
}

namespace {

Index estimate_order(const Vector& sv) {
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  Index best = sv.size();
  double best_ratio = 1.0;
  for (Index k = 0; k + 1 < sv.size(); ++k) {
    const double ratio = sv(k + 1) > 0.0 ? sv(k + 1) / sv(k) : 0.0;
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = k + 1;
    }
  }
  if (best_ratio >= 1e-4) return sv.size();  // no clear gap; keep everything
  return best;
}

}  // namespace

SubspaceResult recover_states(const PastFutureData& data, std::optional<Index> order,
                              bool eigen_route, const RankPolicy& policy) {
  SubspaceResult result;
  result.pi = oblique_pi(data, policy);
  result.via_eigen_route = eigen_route;

  {
    Eigen::BDCSVD<Matrix> svd(result.pi);
    result.singular_values = svd.singularValues();
  }
  const Index n = order ? *order : estimate_order(result.singular_values);
  if (n <= 0 || result.singular_values.size() == 0 || result.singular_values(0) <= 0.0)
    throw std::runtime_error("recover_states: degenerate data, estimated order 0");
  result.order = n;

  if (!eigen_route) {
    const TruncatedSvd svd = svd_trunc(result.pi, RankPolicy::fixed(n));
    const Vector half = svd.sigma.array().sqrt();
    result.observability = svd.u * half.asDiagonal();
    result.states = half.asDiagonal() * svd.v.transpose();
    return result;
  }

  // Gram-matrix eigen route: Pi^T Pi and Pi Pi^T assembled from kernel
  // matrices only.
  const Matrix kpf_pinv = pinv(data.k_bar_pf, policy);
  const Matrix pi_t_pi =
      data.k_bar_p.transpose() * kpf_pinv * data.k_future_y * kpf_pinv * data.k_bar_p;
  const Matrix gamma = kpf_pinv * data.k_bar_p * data.k_bar_p.transpose() * kpf_pinv;
  const Matrix pi_pi_t = data.y_future * gamma * data.y_future.transpose();

  const EigSym ev = eig_sym(0.5 * (pi_t_pi + pi_t_pi.transpose()));
  const EigSym eu = eig_sym(0.5 * (pi_pi_t + pi_pi_t.transpose()));

  Vector sigma(n);
  Matrix u(pi_pi_t.rows(), n), v(pi_t_pi.rows(), n);
  for (Index i = 0; i < n; ++i) {
    sigma(i) = std::sqrt(std::max(0.0, ev.values(i)));
    v.col(i) = ev.vectors.col(i);
    u.col(i) = eu.vectors.col(i);
    // eigenvector signs are independent; align u_i with Pi v_i
    if (u.col(i).dot(result.pi * v.col(i)) < 0.0) u.col(i) = -u.col(i);
  }
  const Vector half = sigma.array().sqrt();
  result.observability = u * half.asDiagonal();
  result.states = half.asDiagonal() * v.transpose();
  return result;
}

namespace {

// [k]_j = sum_{r=0}^{L-1} <phi(u^d_{j+off+r}), phi_cand_{coff+r}>
Vector windowed_kernel_vector(const Matrix& phi_data, const Matrix& phi_cand,
                              Index n_cols, Index lag, Index offset, Index cand_offset) {
  Vector k = Vector::Zero(n_cols);
  for (Index j = 0; j < n_cols; ++j)
    for (Index r = 0; r < lag; ++r)
      k(j) += phi_data.col(j + offset + r).dot(phi_cand.col(cand_offset + r));
  return k;
}

Vector stack_outputs(const Matrix& y, Index lag, Index offset) {
  const Index p = y.rows();
  Vector out(p * lag);
  for (Index k = 0; k < lag; ++k) out.segment(k * p, p) = y.col(offset + k);
  return out;
}

struct StackedSolve {
  Vector xi;
  double residual;
};

StackedSolve solve_stacked(const PastFutureData& data, const Matrix& cand_inputs,
                           const Matrix& past_outputs, const RankPolicy& policy) {
  const Index lag = data.lag;
  const Index nc = data.n_cols;
  const Matrix phi_data = feature_images(data.kernel, data.inputs);
  const Matrix phi_cand = feature_images(data.kernel, cand_inputs);

  const Vector kpu = windowed_kernel_vector(phi_data, phi_cand, nc, lag, 0, 0);
  const Vector kfu = windowed_kernel_vector(phi_data, phi_cand, nc, lag, lag, lag);
  const Vector kpy = data.y_past.transpose() * stack_outputs(past_outputs, lag, 0);

  // stacked system [k_p^u; k_p^y; k_f^u] = [K_p^u; K_p^y; K_f^u] xi
  Matrix sys(3 * nc, nc);
  sys.topRows(nc) = data.k_past_u;
  sys.middleRows(nc, nc) = data.k_past_y;
  sys.bottomRows(nc) = data.k_future_u;
  Vector rhs(3 * nc);
  rhs.head(nc) = kpu;
  rhs.segment(nc, nc) = kpy;
  rhs.tail(nc) = kfu;

  StackedSolve out;
  out.xi = pinv(sys, policy) * rhs;
  out.residual = (sys * out.xi - rhs).norm() / (1.0 + rhs.norm());
  return out;
}

}  // namespace

MembershipVerdict membership_test(const PastFutureData& data, const Trajectory& candidate,
                                  double threshold, const RankPolicy& policy) {
  candidate.validate();
  const Index lag = data.lag;
  if (candidate.length() != 2 * lag)
    throw std::invalid_argument("membership_test: candidate must have length 2L");
  if (candidate.input_dim() != data.inputs.rows())
    throw std::invalid_argument("membership_test: input dimension mismatch");
  const Index p = candidate.output_dim();
  if (data.y_past.rows() != p * lag)
    throw std::invalid_argument("membership_test: output dimension mismatch");

  const StackedSolve solve =
      solve_stacked(data, candidate.inputs, candidate.outputs, policy);

  const Vector kfy = data.y_future.transpose() * stack_outputs(candidate.outputs, lag, lag);
  const double future_res =
      (data.k_future_y * solve.xi - kfy).norm() / (1.0 + kfy.norm());

  MembershipVerdict verdict;
  verdict.xi = solve.xi;
  verdict.past_residual = solve.residual;
  verdict.future_residual = future_res;
  verdict.feasible = solve.residual <= threshold && future_res <= threshold;

  const Vector yhat = pinv(data.y_future.transpose(), policy) * (data.k_future_y * solve.xi);
  verdict.predicted_future.resize(p, lag);
  for (Index k = 0; k < lag; ++k) verdict.predicted_future.col(k) = yhat.segment(k * p, p);
  return verdict;
}

Matrix subspace_predict(const PastFutureData& data, const Trajectory& past,
                        const Matrix& future_inputs, double* residual,
                        const RankPolicy& policy) {
  past.validate();
  const Index lag = data.lag;
  if (past.length() != lag)
    throw std::invalid_argument("subspace_predict: past window must have length L");
  if (future_inputs.cols() != lag || future_inputs.rows() != data.inputs.rows())
    throw std::invalid_argument("subspace_predict: future inputs must be m x L");

  Matrix cand_inputs(data.inputs.rows(), 2 * lag);
  cand_inputs.leftCols(lag) = past.inputs;
  cand_inputs.rightCols(lag) = future_inputs;

  const StackedSolve solve = solve_stacked(data, cand_inputs, past.outputs, policy);
  if (residual) *residual = solve.residual;

  const Vector yhat = pinv(data.y_future.transpose(), policy) * (data.k_future_y * solve.xi);
  const Index p = past.output_dim();
  Matrix out(p, lag);
  for (Index k = 0; k < lag; ++k) out.col(k) = yhat.segment(k * p, p);
  return out;
}

}  // namespace kbm
