#include "kbm/check.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "kbm/catalog.hpp"
#include "kbm/interp.hpp"
#include "kbm/subspace.hpp"
#include "kbm/systems.hpp"
#include "kbm/trajectory_io.hpp"

namespace kbm {

bool CheckSummary::all_passed() const {
  for (const auto& c : checks)
    if (c.passed != c.total) return false;
  return true;
}

namespace {

Vector random_vector(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

std::vector<OperatorKernel> kernel_zoo(int p) {
  return {
      OperatorKernel::scalar_lift(ScalarKernel::linear(), p),
      OperatorKernel::scalar_lift(ScalarKernel::gaussian(1.5), p),
      OperatorKernel::scalar_lift(ScalarKernel::polynomial(2), p),
      OperatorKernel::scalar_lift(ScalarKernel::fock(std::vector<double>(7, 1.0)), p),
  };
}

CheckResult check_gram_psd(std::uint64_t seed) {
  CheckResult r{"gram-psd"};
  std::mt19937_64 rng(seed);
  for (const auto& kernel : kernel_zoo(2)) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<Vector> centers;
      for (int j = 0; j < 8; ++j) centers.push_back(random_vector(3, rng));
      const Matrix gram = gram_block(kernel, centers);
      const EigSym es = eig_sym(gram);
      ++r.total;
      if (es.values(es.values.size() - 1) >= -1e-10 * std::max(1.0, es.values(0))) ++r.passed;
    }
  }
  return r;
}

CheckResult check_scalar_lift_kronecker(std::uint64_t seed) {
  CheckResult r{"scalar-lift-kronecker"};
  std::mt19937_64 rng(seed);
  const int p = 2;
  for (const auto& kernel : kernel_zoo(p)) {
    std::vector<Vector> centers;
    for (int j = 0; j < 6; ++j) centers.push_back(random_vector(3, rng));
    const Matrix gram = gram_block(kernel, centers);
    Matrix expected(gram.rows(), gram.cols());
    for (std::size_t i = 0; i < centers.size(); ++i)
      for (std::size_t j = 0; j < centers.size(); ++j)
        expected.block(i * p, j * p, p, p) =
            kernel.scalar()(centers[i], centers[j]) * Matrix::Identity(p, p);
    ++r.total;
    if ((gram - expected).cwiseAbs().maxCoeff() < 1e-14 * (1.0 + gram.cwiseAbs().maxCoeff()))
      ++r.passed;
  }
  return r;
}

OperatorKernel lti_regression_kernel(Index m, Index p, Index lag) {
  return OperatorKernel::direct_sum(
      OperatorKernel::scalar_lift(ScalarKernel::linear(), static_cast<int>(p)),
      OperatorKernel::scalar_lift(ScalarKernel::linear(), static_cast<int>(p)),
      m * (lag + 1));
}

CheckResult check_representer(std::uint64_t seed) {
  CheckResult r{"representer-identity"};
  for (int rep = 0; rep < 5; ++rep) {
    const StateSpaceModel model = random_lti(2, 1, 1, seed + rep);
    const Index lag = 2;
    const Matrix u = random_inputs(1, 40, seed + 100 + rep);
    const Trajectory traj = simulate_ss(model, u).first;
    auto samples = build_regressors(traj, lag);
    const RegressionSample online = samples.back();
    samples.pop_back();
    const OperatorKernel kernel = lti_regression_kernel(1, 1, lag);
    const RepresenterReport report = representer_check(samples, online, kernel);

    ++r.total;
    bool ok = false;
    if (report.classification == SigmaClass::Zero)
      ok = (*report.actual - report.predicted).norm() <= 1e-6 * (1.0 + report.actual->norm());
    else if (report.classification == SigmaClass::PositiveDefinite)
      ok = report.identity_residual <= 1e-7 * (1.0 + std::abs(report.norm_increment));
    else
      ok = report.null_component <= 1e-6;
    if (ok && report.norm_increment >= -1e-10) ++r.passed;
  }
  return r;
}

CheckResult check_ss_to_ar(std::uint64_t seed) {
  CheckResult r{"ss-to-ar-exactness"};
  for (int rep = 0; rep < 5; ++rep) {
    const StateSpaceModel model =
        random_hammerstein(2, 1, seed + rep, FeatureMap::tanh(1), FeatureMap::identity(1));
    const Index lag = 2;
    const ARModel ar = ss_to_ar(model, lag);
    const Matrix u = random_inputs(1, 120, seed + 500 + rep);
    const Trajectory ss_traj = simulate_ss(model, u).first;
    const Trajectory ar_traj = simulate_ar(ar, u, ss_traj.outputs.leftCols(lag));
    ++r.total;
    if ((ar_traj.outputs - ss_traj.outputs).cwiseAbs().maxCoeff() < 1e-8) ++r.passed;
  }
  return r;
}

CheckResult check_trace_identity(std::uint64_t seed) {
  CheckResult r{"trace-kernel-identity"};
  std::mt19937_64 rng(seed);
  const std::vector<FeatureMap> maps = {FeatureMap::identity(2), FeatureMap::tanh(2),
                                        FeatureMap::polynomial(2, 3)};
  for (const auto& phi : maps) {
    const OperatorKernel kernel = OperatorKernel::rank_one(phi);
    ++r.total;
    bool ok = true;
    for (int rep = 0; rep < 20; ++rep) {
      const Vector a = random_vector(2, rng);
      const Vector b = random_vector(2, rng);
      if (std::abs(trace_inner(kernel, a, b) - phi(a).dot(phi(b))) > 1e-12) ok = false;
      if (std::abs(kernel(a, b).trace() - phi(a).dot(phi(b))) > 1e-12) ok = false;
    }
    if (ok) ++r.passed;
  }
  return r;
}

CheckResult check_membership(std::uint64_t seed) {
  CheckResult r{"membership"};
  const StateSpaceModel model = random_lti(2, 1, 1, seed);
  const Index lag = 2;
  const Matrix u = random_inputs(1, 80, seed + 1);
  const Trajectory traj = simulate_ss(model, u).first;
  const OperatorKernel kernel = OperatorKernel::rank_one(FeatureMap::identity(1));
  const PastFutureData data = build_past_future(traj, lag, kernel);

  std::mt19937_64 rng(seed + 2);
  for (int rep = 0; rep < 5; ++rep) {
    StateSpaceModel fresh = model;
    fresh.x0 = random_vector(2, rng);
    const Matrix u2 = random_inputs(1, 2 * lag, seed + 10 + rep);
    Trajectory cand = simulate_ss(fresh, u2).first;

    ++r.total;
    if (membership_test(data, cand).feasible) ++r.passed;

    Trajectory bad = cand;
    bad.outputs(0, 2 * lag - 1) += 1.0;
    ++r.total;
    if (!membership_test(data, bad).feasible) ++r.passed;
  }
  return r;
}

CheckResult check_pe(std::uint64_t seed) {
  CheckResult r{"persistent-excitation"};
  const Matrix u = random_inputs(1, 30, seed);
  ++r.total;
  if (is_pe(u, 3)) ++r.passed;
  ++r.total;
  if (!is_pe(Matrix::Zero(1, 30), 2)) ++r.passed;
  return r;
}

}  // namespace

CheckSummary run_checks(std::uint64_t seed) {
  CheckSummary summary;
  summary.seed = seed;
  summary.checks.push_back(check_gram_psd(seed));
  summary.checks.push_back(check_scalar_lift_kronecker(seed + 1));
  summary.checks.push_back(check_representer(seed + 2));
  summary.checks.push_back(check_ss_to_ar(seed + 3));
  summary.checks.push_back(check_trace_identity(seed + 4));
  summary.checks.push_back(check_membership(seed + 5));
  summary.checks.push_back(check_pe(seed + 6));
  return summary;
}

std::string summary_to_json_string(const CheckSummary& summary) {
  nlohmann::json j;
  j["seed"] = summary.seed;
  j["all_passed"] = summary.all_passed();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : summary.checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["passed"] = c.passed;
    jc["total"] = c.total;
    checks.push_back(std::move(jc));
  }
  j["checks"] = std::move(checks);
  return j.dump(2) + "\n";
}

}  // namespace kbm
