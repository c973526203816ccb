#include "kbm/trajectory_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kbm {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  traj.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  const Index m = traj.input_dim();
  const Index p = traj.output_dim();
  for (Index i = 0; i < m; ++i) out << (i ? "," : "") << "u" << i;
  for (Index i = 0; i < p; ++i) out << (m + i ? "," : "") << "y" << i;
  out << "\n";
  for (Index t = 0; t < traj.length(); ++t) {
    for (Index i = 0; i < m; ++i) out << (i ? "," : "") << format_double(traj.inputs(i, t));
    for (Index i = 0; i < p; ++i)
      out << (m + i ? "," : "") << format_double(traj.outputs(i, t));
    out << "\n";
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  Index m = 0, p = 0;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) {
      if (field.rfind("u", 0) == 0)
        ++m;
      else if (field.rfind("y", 0) == 0)
        ++p;
      else
        throw std::runtime_error("bad trajectory header field: " + field);
    }
  }
  if (p == 0) throw std::runtime_error("trajectory header has no output columns");

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("parse error at row " + std::to_string(lineno) + ": " + field);
      }
    }
    if (static_cast<Index>(row.size()) != m + p)
      throw std::runtime_error("wrong field count at row " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }

  Trajectory traj;
  traj.inputs.resize(m, static_cast<Index>(rows.size()));
  traj.outputs.resize(p, static_cast<Index>(rows.size()));
  for (Index t = 0; t < traj.length(); ++t) {
    for (Index i = 0; i < m; ++i) traj.inputs(i, t) = rows[t][i];
    for (Index i = 0; i < p; ++i) traj.outputs(i, t) = rows[t][m + i];
  }
  return traj;
}

namespace {

FeatureMap parse_feature_map(const json& spec) {
  const std::string name = spec.at("phi").get<std::string>();
  const int m = spec.at("m").get<int>();
  if (name == "identity") return FeatureMap::identity(m);
  if (name == "tanh") return FeatureMap::tanh(m);
  if (name == "polynomial") return FeatureMap::polynomial(m, spec.at("degree").get<int>());
  throw std::runtime_error("unknown feature map: " + name);
}

}  // namespace

OperatorKernel parse_kernel_spec(const json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "linear")
    return OperatorKernel::scalar_lift(ScalarKernel::linear(), spec.at("p").get<int>());
  if (kind == "gaussian")
    return OperatorKernel::scalar_lift(ScalarKernel::gaussian(spec.at("sigma").get<double>()),
                                       spec.at("p").get<int>());
  if (kind == "polynomial")
    return OperatorKernel::scalar_lift(ScalarKernel::polynomial(spec.at("degree").get<int>()),
                                       spec.at("p").get<int>());
  if (kind == "fock") {
    std::vector<double> rho = spec.at("rho").get<std::vector<double>>();
    if (spec.contains("K")) rho.resize(static_cast<std::size_t>(spec.at("K").get<int>()) + 1, 1.0);
    return OperatorKernel::scalar_lift(ScalarKernel::fock(std::move(rho)), spec.at("p").get<int>());
  }
  if (kind == "direct-sum")
    return OperatorKernel::direct_sum(parse_kernel_spec(spec.at("u")),
                                      parse_kernel_spec(spec.at("y")),
                                      spec.at("split").get<Index>());
  if (kind == "rank-one") return OperatorKernel::rank_one(parse_feature_map(spec));
  throw std::runtime_error("unknown kernel kind: " + kind);
}

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string class_name(SigmaClass c) {
  switch (c) {
    case SigmaClass::Zero: return "zero";
    case SigmaClass::PositiveDefinite: return "positive-definite";
    case SigmaClass::SingularNonzero: return "singular-nonzero";
  }
  return "?";
}

}  // namespace

json report_to_json(const RepresenterReport& report) {
  json j;
  j["predicted"] = vector_to_json(report.predicted);
  if (report.actual) j["actual"] = vector_to_json(*report.actual);
  j["weighted_error_sq"] = report.weighted_error_sq;
  j["norm_increment"] = report.norm_increment;
  j["identity_residual"] = report.identity_residual;
  j["classification"] = class_name(report.classification);
  if (report.bound_slack) j["bound_slack"] = *report.bound_slack;
  j["feasible"] = report.feasible;
  return j;
}

json subspace_result_to_json(const SubspaceResult& result) {
  json j;
  j["order"] = result.order;
  j["singular_values"] = vector_to_json(result.singular_values);
  j["observability"] = matrix_to_json(result.observability);
  j["states"] = matrix_to_json(result.states);
  j["via_eigen_route"] = result.via_eigen_route;
  return j;
}

json membership_to_json(const MembershipVerdict& verdict) {
  json j;
  j["feasible"] = verdict.feasible;
  j["past_residual"] = verdict.past_residual;
  j["future_residual"] = verdict.future_residual;
  j["predicted_future"] = matrix_to_json(verdict.predicted_future);
  return j;
}

}  // namespace kbm
