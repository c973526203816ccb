#include "kbm/systems.hpp"

#include <random>
#include <stdexcept>

namespace kbm {

void Trajectory::validate() const {
  if (inputs.cols() != outputs.cols())
    throw std::invalid_argument("Trajectory: input/output lengths differ");
  if (!inputs.allFinite() || !outputs.allFinite())
    throw std::invalid_argument("Trajectory: non-finite entries");
}

std::function<Vector(const Vector&)> kernel_expansion(
    const OperatorKernel& kernel, std::vector<Vector> centers,
    std::vector<Vector> coeffs) {
  if (centers.size() != coeffs.size())
    throw std::invalid_argument("kernel_expansion: center/coefficient counts differ");
  return [kernel, centers = std::move(centers), coeffs = std::move(coeffs)](const Vector& z) {
    Vector out = Vector::Zero(kernel.output_dim());
    for (std::size_t j = 0; j < centers.size(); ++j) out += kernel(z, centers[j]) * coeffs[j];
    return out;
  };
}

Trajectory simulate_ar(const ARModel& model, const Matrix& u, const Matrix& y_init) {
  const Index lag = model.lag;
  const Index t_total = u.cols();
  if (lag < 1) throw std::invalid_argument("simulate_ar: lag must be >= 1");
  if (static_cast<Index>(model.a.size()) != lag)
    throw std::invalid_argument("simulate_ar: need exactly L output matrices");
  if (u.rows() != model.m) throw std::invalid_argument("simulate_ar: input dimension mismatch");
  if (t_total < lag + 1) throw std::invalid_argument("simulate_ar: input too short");
  if (y_init.rows() != model.p || y_init.cols() != lag)
    throw std::invalid_argument("simulate_ar: warm-up must supply y_0..y_{L-1}");

  Trajectory traj;
  traj.inputs = u;
  traj.outputs.resize(model.p, t_total);
  traj.outputs.leftCols(lag) = y_init;
  const Index win = model.m * (lag + 1);
  for (Index t = 0; t + lag < t_total; ++t) {
    Vector window(win);
    for (Index i = 0; i <= lag; ++i) window.segment(i * model.m, model.m) = u.col(t + i);
    Vector y = model.g ? model.g(window) : Vector::Zero(model.p);
    for (Index k = 1; k <= lag; ++k) y -= model.a[k - 1] * traj.outputs.col(t + lag - k);
    traj.outputs.col(t + lag) = y;
  }
  return traj;
}

void StateSpaceModel::validate() const {
  const Index n = a.rows();
  const Index q = b.cols();
  if (n < 1 || a.cols() != n) throw std::invalid_argument("StateSpaceModel: A must be square");
  if (b.rows() != n) throw std::invalid_argument("StateSpaceModel: B row count");
  if (c.cols() != n) throw std::invalid_argument("StateSpaceModel: C column count");
  if (d.rows() != c.rows() || d.cols() != q)
    throw std::invalid_argument("StateSpaceModel: D shape");
  if (psi1.output_dim() != q || psi2.output_dim() != q)
    throw std::invalid_argument("StateSpaceModel: nonlinearity output dimension");
  if (psi1.input_dim != psi2.input_dim)
    throw std::invalid_argument("StateSpaceModel: nonlinearity input dimensions differ");
  if (x0.size() != n) throw std::invalid_argument("StateSpaceModel: x0 dimension");
}

std::pair<Trajectory, Matrix> simulate_ss(const StateSpaceModel& model, const Matrix& u) {
  model.validate();
  if (u.rows() != model.input_dim())
    throw std::invalid_argument("simulate_ss: input dimension mismatch");
  const Index t_total = u.cols();
  const Index n = model.state_dim();
  Matrix states(n, t_total);
  Trajectory traj;
  traj.inputs = u;
  traj.outputs.resize(model.output_dim(), t_total);
  Vector x = model.x0;
  for (Index t = 0; t < t_total; ++t) {
    states.col(t) = x;
    traj.outputs.col(t) = model.c * x + model.d * model.psi2(u.col(t));
    x = model.a * x + model.b * model.psi1(u.col(t));
  }
  return {std::move(traj), std::move(states)};
}

RealizationMatrices realization(const StateSpaceModel& model, Index depth,
                                const RankPolicy& policy) {
  model.validate();
  if (depth < 1) throw std::invalid_argument("realization: depth must be >= 1");
  const Index n = model.state_dim();
  const Index q = model.b.cols();
  const Index p = model.output_dim();

  RealizationMatrices r;
  r.markov.reserve(depth);
  Matrix apow = Matrix::Identity(n, n);
  std::vector<Matrix> apows;  // A^0..A^{L-1}
  for (Index j = 0; j < depth; ++j) {
    apows.push_back(apow);
    r.markov.push_back(model.c * apow * model.b);
    apow = model.a * apow;
  }

  r.controllability.resize(n, q * depth);
  r.reversed_controllability.resize(n, q * depth);
  r.observability.resize(p * depth, n);
  for (Index j = 0; j < depth; ++j) {
    r.controllability.middleCols(j * q, q) = apows[j] * model.b;
    r.reversed_controllability.middleCols(j * q, q) = apows[depth - 1 - j] * model.b;
    r.observability.middleRows(j * p, p) = model.c * apows[j];
  }

  r.toeplitz_strict = Matrix::Zero(p * depth, q * depth);
  for (Index i = 0; i < depth; ++i)
    for (Index j = 0; j < i; ++j)
      r.toeplitz_strict.block(i * p, j * q, p, q) = r.markov[i - j - 1];
  r.toeplitz = r.toeplitz_strict;
  for (Index i = 0; i < depth; ++i) r.toeplitz.block(i * p, i * q, p, q) += model.d;

  r.observability_rank = numerical_rank(r.observability, policy);
  return r;
}

ARModel ss_to_ar(const StateSpaceModel& model, Index lag, const RankPolicy& policy) {
  const Index n = model.state_dim();
  if (lag < n) throw std::invalid_argument("ss_to_ar: lag must be >= state dimension");
  const RealizationMatrices r = realization(model, lag, policy);
  if (r.observability_rank != n)
    throw std::runtime_error("ss_to_ar: observability matrix is rank deficient");

  const Index p = model.output_dim();
  const Index q = model.b.cols();
  Matrix al = Matrix::Identity(n, n);
  for (Index j = 0; j < lag; ++j) al = model.a * al;
  const Matrix quot = model.c * al * pinv(r.observability, policy);  // Q, p x pL

  // Q = [Q_{L-1}, ..., Q_0]; the coefficient of y_{t-k} is Q_{k-1}.
  ARModel ar;
  ar.lag = lag;
  ar.m = model.input_dim();
  ar.p = p;
  ar.a.reserve(lag);
  for (Index k = 1; k <= lag; ++k)
    ar.a.push_back(-quot.middleCols((lag - k) * p, p));

  Matrix mrow(p, q * lag);  // M = [M_{L-1}, ..., M_0]
  for (Index j = 0; j < lag; ++j) mrow.middleCols(j * q, q) = r.markov[lag - 1 - j];

  Matrix s(p, q * (2 * lag + 1));
  s.leftCols(q * lag) = mrow - quot * r.toeplitz_strict;
  Matrix qd(p, q * lag);
  for (Index j = 0; j < lag; ++j)
    qd.middleCols(j * q, q) = quot.middleCols(j * p, p) * model.d;
  s.middleCols(q * lag, q * lag) = -qd;
  s.rightCols(q) = model.d;

  const FeatureMap psi1 = model.psi1;
  const FeatureMap psi2 = model.psi2;
  const Index m = model.input_dim();
  ar.g = [s, psi1, psi2, lag, m, q](const Vector& window) {
    Vector features(q * (2 * lag + 1));
    for (Index i = 0; i < lag; ++i) {
      const Vector u = window.segment(i * m, m);
      features.segment(i * q, q) = psi1(u);
      features.segment((lag + i) * q, q) = psi2(u);
    }
    features.tail(q) = psi2(window.tail(m));
    return Vector(s * features);
  };
  return ar;
}

ARModel make_lti_ar(std::vector<Matrix> a, std::vector<Matrix> b) {
  if (a.empty()) throw std::invalid_argument("make_lti_ar: lag must be >= 1");
  if (b.size() != a.size() + 1)
    throw std::invalid_argument("make_lti_ar: need B_0..B_L for lag L");
  const Index lag = static_cast<Index>(a.size());
  const Index p = a.front().rows();
  const Index m = b.front().cols();
  for (const auto& ak : a)
    if (ak.rows() != p || ak.cols() != p)
      throw std::invalid_argument("make_lti_ar: A_k must be p x p");
  for (const auto& bl : b)
    if (bl.rows() != p || bl.cols() != m)
      throw std::invalid_argument("make_lti_ar: B_l must be p x m");

  ARModel ar;
  ar.lag = lag;
  ar.m = m;
  ar.p = p;
  ar.a = std::move(a);
  ar.g = [bs = std::move(b), lag, m](const Vector& window) {
    Vector out = Vector::Zero(bs.front().rows());
    // g(u_{0:L}) = sum_{l=0}^{L} B_l u_{L-l}
    for (Index l = 0; l <= lag; ++l) out += bs[l] * window.segment((lag - l) * m, m);
    return out;
  };
  ar.input_kernel = OperatorKernel::scalar_lift(ScalarKernel::linear(), static_cast<int>(p));
  return ar;
}

double eval_volterra(const VolterraFunction& v, const Vector& u_window) {
  const Index width = v.lag + 1;
  if (u_window.size() != width)
    throw std::invalid_argument("eval_volterra: window length must be L+1");
  double out = v.h0;
  for (Index k = 1; k <= v.order(); ++k) {
    const auto& tensor = v.h[k - 1];
    std::size_t expected = 1;
    for (Index j = 0; j < k; ++j) expected *= static_cast<std::size_t>(width);
    if (tensor.size() != expected)
      throw std::invalid_argument("eval_volterra: tensor size mismatch");
    // iterate multi-indices (i_1..i_k) in row-major order
    std::vector<Index> idx(k, 0);
    for (std::size_t flat = 0; flat < expected; ++flat) {
      std::size_t rem = flat;
      double prod = 1.0;
      for (Index j = k - 1; j >= 0; --j) {
        idx[j] = static_cast<Index>(rem % width);
        rem /= width;
        prod *= u_window(idx[j]);
      }
      out += tensor[flat] * prod;
    }
  }
  return out;
}

Matrix random_inputs(Index m, Index t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix u(m, t);
  for (Index j = 0; j < t; ++j)
    for (Index i = 0; i < m; ++i) u(i, j) = dist(rng);
  return u;
}

}  // namespace kbm
