#include "kbm/catalog.hpp"

#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kbm {

namespace {

Matrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

// Scale A so its spectral radius is at most target.
Matrix stabilize(Matrix a, double target) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(a).eigenvalues();
  const double radius = ev.cwiseAbs().maxCoeff();
  if (radius > target) a *= target / radius;
  return a;
}

bool observable_and_controllable(const StateSpaceModel& model) {
  const Index n = model.state_dim();
  const RealizationMatrices r = realization(model, n);
  return r.observability_rank == n &&
         numerical_rank(r.controllability, RankPolicy::relative(1e-8)) == n;
}

}  // namespace

StateSpaceModel random_lti(Index n, Index m, Index p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    StateSpaceModel model;
    model.a = stabilize(random_matrix(n, n, rng), 0.85);
    model.b = random_matrix(n, m, rng);
    model.c = random_matrix(p, n, rng);
    model.d = random_matrix(p, m, rng);
    model.psi1 = FeatureMap::identity(static_cast<int>(m));
    model.psi2 = model.psi1;
    model.x0 = Vector::Zero(n);
    if (observable_and_controllable(model)) return model;
  }
  throw std::runtime_error("random_lti: could not draw an observable/controllable model");
}

StateSpaceModel random_hammerstein(Index n, Index m, std::uint64_t seed,
                                   FeatureMap psi1, FeatureMap psi2) {
  std::mt19937_64 rng(seed);
  const Index q = psi1.output_dim();
  for (int attempt = 0; attempt < 100; ++attempt) {
    StateSpaceModel model;
    model.a = stabilize(random_matrix(n, n, rng), 0.85);
    model.b = random_matrix(n, q, rng);
    model.c = random_matrix(1, n, rng);
    model.d = random_matrix(1, q, rng);
    model.psi1 = psi1;
    model.psi2 = psi2;
    model.x0 = Vector::Zero(n);
    if (observable_and_controllable(model)) return model;
  }
  throw std::runtime_error("random_hammerstein: could not draw an observable model");
}

StateSpaceModel catalog_model(const std::string& name) {
  if (name == "lti-n1") return random_lti(1, 1, 1, 11);
  if (name == "lti-n2") return random_lti(2, 1, 1, 22);
  if (name == "lti-n3") return random_lti(3, 2, 2, 33);
  if (name == "hammerstein-tanh") {
    StateSpaceModel model = random_lti(2, 1, 1, 44);
    model.psi1 = FeatureMap::tanh(1);
    model.psi2 = FeatureMap::tanh(1);
    return model;
  }
  throw std::runtime_error("unknown catalog model: " + name);
}

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& spec, Index rows, Index cols) {
  const auto flat = spec.get<std::vector<double>>();
  if (static_cast<Index>(flat.size()) != rows * cols)
    throw std::runtime_error("model spec: matrix entry count mismatch");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = flat[i * cols + j];
  return m;
}

FeatureMap nonlinearity_from_name(const std::string& name, int m, const json& spec) {
  if (name == "identity") return FeatureMap::identity(m);
  if (name == "tanh") return FeatureMap::tanh(m);
  if (name == "polynomial")
    return FeatureMap::polynomial(m, spec.value("degree", 2));
  throw std::runtime_error("unknown nonlinearity: " + name);
}

}  // namespace

StateSpaceModel parse_model_spec(const nlohmann::json& spec) {
  if (spec.is_string()) return catalog_model(spec.get<std::string>());
  if (spec.contains("catalog")) return catalog_model(spec.at("catalog").get<std::string>());

  const Index n = spec.at("n").get<Index>();
  const int m = spec.at("m").get<int>();
  const Index p = spec.at("p").get<Index>();

  StateSpaceModel model;
  model.psi1 = nonlinearity_from_name(spec.value("psi1", "identity"), m, spec);
  model.psi2 = nonlinearity_from_name(spec.value("psi2", spec.value("psi1", "identity")), m, spec);
  const Index q = model.psi1.output_dim();
  model.a = matrix_from_json(spec.at("A"), n, n);
  model.b = matrix_from_json(spec.at("B"), n, q);
  model.c = matrix_from_json(spec.at("C"), p, n);
  model.d = matrix_from_json(spec.at("D"), p, q);
  model.x0 = Vector::Zero(n);
  if (spec.contains("x0")) {
    const auto x0 = spec.at("x0").get<std::vector<double>>();
    if (static_cast<Index>(x0.size()) != n) throw std::runtime_error("model spec: x0 size");
    for (Index i = 0; i < n; ++i) model.x0(i) = x0[i];
  }
  model.validate();
  return model;
}

}  // namespace kbm
