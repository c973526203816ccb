#include "kbm/interp.hpp"

#include <cmath>
#include <stdexcept>

namespace kbm {

std::vector<RegressionSample> build_regressors(const Trajectory& traj, Index lag) {
  traj.validate();
  if (lag < 1) throw std::invalid_argument("build_regressors: lag must be >= 1");
  const Index t_total = traj.length();
  if (t_total < lag + 1)
    throw std::invalid_argument("build_regressors: trajectory shorter than L+1");
  const Index m = traj.input_dim();
  const Index p = traj.output_dim();
  const Index zdim = m * (lag + 1) + p * lag;

  std::vector<RegressionSample> samples;
  samples.reserve(t_total - lag);
  for (Index t = 0; t + lag < t_total; ++t) {
    RegressionSample s;
    s.t = t;
    s.z.resize(zdim);
    for (Index i = 0; i <= lag; ++i)
      s.z.segment(i * m, m) = traj.inputs.col(t + i);
    for (Index i = 0; i < lag; ++i)
      s.z.segment(m * (lag + 1) + i * p, p) = traj.outputs.col(t + i);
    s.y_plus = traj.outputs.col(t + lag);
    samples.push_back(std::move(s));
  }
  return samples;
}

Vector Interpolator::predict(const Vector& z) const {
  Vector out = Vector::Zero(kernel.output_dim());
  for (std::size_t j = 0; j < centers.size(); ++j) out += kernel(z, centers[j]) * coeffs[j];
  return out;
}

Interpolator fit_min_norm(const std::vector<Vector>& centers,
                          const std::vector<Vector>& targets,
                          const OperatorKernel& kernel, const RankPolicy& policy) {
  if (centers.empty()) throw std::invalid_argument("fit_min_norm: no samples");
  if (centers.size() != targets.size())
    throw std::invalid_argument("fit_min_norm: center/target counts differ");
  const Index p = kernel.output_dim();
  const Index n = static_cast<Index>(centers.size());

  Interpolator interp;
  interp.kernel = kernel;
  interp.centers = centers;
  interp.gram = gram_block(kernel, centers);

  Vector y(p * n);
  for (Index j = 0; j < n; ++j) {
    if (targets[j].size() != p)
      throw std::invalid_argument("fit_min_norm: target dimension mismatch");
    y.segment(j * p, p) = targets[j];
  }

  const Vector vbar = pinv(interp.gram, policy) * y;
  interp.coeffs.reserve(n);
  for (Index j = 0; j < n; ++j) interp.coeffs.push_back(vbar.segment(j * p, p));
  interp.norm_sq = std::max(0.0, vbar.dot(interp.gram * vbar));
  interp.fit_residual = (interp.gram * vbar - y).norm() / (1.0 + y.norm());
  interp.feasible = interp.fit_residual <= kFeasibilityTol;
  return interp;
}

Interpolator fit_min_norm(const std::vector<RegressionSample>& samples,
                          const OperatorKernel& kernel, const RankPolicy& policy) {
  std::vector<Vector> centers, targets;
  centers.reserve(samples.size());
  targets.reserve(samples.size());
  for (const auto& s : samples) {
    centers.push_back(s.z);
    targets.push_back(s.y_plus);
  }
  return fit_min_norm(centers, targets, kernel, policy);
}

double interp_norm_sq(const Interpolator& interp) { return interp.norm_sq; }

SigmaCertificate sigma_certificate(const std::vector<Vector>& centers,
                                   const OperatorKernel& kernel, const Vector& z,
                                   const RankPolicy& policy, double eps_sigma) {
  const Matrix gram = gram_block(kernel, centers);
  const Matrix row = kernel_row(kernel, z, centers);
  Matrix sigma = kernel(z, z) - row * pinv(gram, policy) * row.transpose();
  sigma = 0.5 * (sigma + sigma.transpose());

  SigmaCertificate cert;
  cert.sigma = sigma;
  const EigSym es = eig_sym(sigma);
  cert.lambda_max = es.values(0);
  cert.lambda_min = es.values(es.values.size() - 1);

  const double scale = std::max(kernel(z, z).cwiseAbs().maxCoeff(), 1e-300);
  if (cert.lambda_max <= eps_sigma * scale)
    cert.classification = SigmaClass::Zero;
  else if (cert.lambda_min > eps_sigma * cert.lambda_max)
    cert.classification = SigmaClass::PositiveDefinite;
  else
    cert.classification = SigmaClass::SingularNonzero;
  return cert;
}

RepresenterReport representer_check(const std::vector<RegressionSample>& offline,
                                    const RegressionSample& online,
                                    const OperatorKernel& kernel,
                                    std::optional<double> fstar_norm_sq,
                                    const RankPolicy& policy, double eps_sigma) {
  if (offline.empty()) throw std::invalid_argument("representer_check: empty offline data");

  const Interpolator f_n = fit_min_norm(offline, kernel, policy);
  std::vector<RegressionSample> augmented = offline;
  augmented.push_back(online);
  const Interpolator f_n1 = fit_min_norm(augmented, kernel, policy);

  std::vector<Vector> centers;
  centers.reserve(offline.size());
  for (const auto& s : offline) centers.push_back(s.z);
  const SigmaCertificate cert = sigma_certificate(centers, kernel, online.z, policy, eps_sigma);

  RepresenterReport report;
  report.predicted = f_n.predict(online.z);
  report.actual = online.y_plus;
  report.classification = cert.classification;
  report.feasible = f_n1.feasible;
  report.norm_increment = f_n1.norm_sq - f_n.norm_sq;

  const Vector err = online.y_plus - report.predicted;
  switch (cert.classification) {
    case SigmaClass::Zero:
      report.weighted_error_sq = 0.0;
      break;
    case SigmaClass::PositiveDefinite: {
      const EigSym es = eig_sym(cert.sigma);
      const Vector w = es.vectors.transpose() * err;
      report.weighted_error_sq = (w.array().square() / es.values.array()).sum();
      break;
    }
    case SigmaClass::SingularNonzero: {
      // Neither cleanly zero nor invertible: report the pseudoinverse-weighted
      // error plus the component of the error in ker(Sigma).
      const EigSym es = eig_sym(cert.sigma);
      const Vector w = es.vectors.transpose() * err;
      const double cut = eps_sigma * cert.lambda_max;
      double wsq = 0.0, nullsq = 0.0;
      for (Index i = 0; i < w.size(); ++i) {
        if (es.values(i) > cut)
          wsq += w(i) * w(i) / es.values(i);
        else
          nullsq += w(i) * w(i);
      }
      report.weighted_error_sq = wsq;
      report.null_component = std::sqrt(nullsq);
      break;
    }
  }
  report.identity_residual = std::abs(report.norm_increment - report.weighted_error_sq);
  if (fstar_norm_sq) report.bound_slack = *fstar_norm_sq - f_n1.norm_sq;
  return report;
}

}  // namespace kbm
