#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kbm/catalog.hpp"
#include "kbm/check.hpp"
#include "kbm/interp.hpp"
#include "kbm/subspace.hpp"
#include "kbm/trajectory_io.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfigError = 2;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  in >> j;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

struct CommonOpts {
  std::string config_path;
  std::optional<std::string> kernel_json;
  kbm::Index lag = 1;
  double rel_tol = 1e-10;
  double eps_sigma = 1e-8;
  double membership_tol = 1e-6;
  json config;  // merged config document

  void load() {
    if (!config_path.empty()) config = load_json(config_path);
    if (config.contains("L")) lag = config.at("L").get<kbm::Index>();
    if (config.contains("rel_tol")) rel_tol = config.at("rel_tol").get<double>();
    if (config.contains("eps_sigma")) eps_sigma = config.at("eps_sigma").get<double>();
    if (config.contains("membership_tol"))
      membership_tol = config.at("membership_tol").get<double>();
  }

  kbm::RankPolicy policy() const { return kbm::RankPolicy::relative(rel_tol); }

  std::optional<kbm::OperatorKernel> kernel() const {
    if (kernel_json) return kbm::parse_kernel_spec(json::parse(*kernel_json));
    if (config.contains("kernel")) return kbm::parse_kernel_spec(config.at("kernel"));
    return {};
  }
};

kbm::OperatorKernel default_regression_kernel(kbm::Index m, kbm::Index p, kbm::Index lag) {
  return kbm::OperatorKernel::direct_sum(
      kbm::OperatorKernel::scalar_lift(kbm::ScalarKernel::linear(), static_cast<int>(p)),
      kbm::OperatorKernel::scalar_lift(kbm::ScalarKernel::linear(), static_cast<int>(p)),
      m * (lag + 1));
}

int cmd_simulate(const CommonOpts& opts, const std::string& model_name,
                 kbm::Index horizon, std::uint64_t seed, const std::string& out_path) {
  if (horizon <= opts.lag) throw std::runtime_error("config error: T must exceed L");
  kbm::StateSpaceModel model = opts.config.contains("model")
                                   ? kbm::parse_model_spec(opts.config.at("model"))
                                   : kbm::catalog_model(model_name);
  const kbm::Matrix u = kbm::random_inputs(model.input_dim(), horizon, seed);
  const kbm::Trajectory traj = kbm::simulate_ss(model, u).first;
  kbm::write_trajectory_csv(traj, out_path);

  json sidecar;
  sidecar["command"] = "simulate";
  sidecar["model"] = opts.config.contains("model") ? opts.config.at("model") : json(model_name);
  sidecar["T"] = horizon;
  sidecar["seed"] = seed;
  sidecar["output"] = out_path;
  write_text(out_path + ".json", sidecar.dump(2) + "\n");
  return kExitOk;
}

int cmd_predict_interp(const CommonOpts& opts, const std::string& offline_path,
                       const std::string& online_path, const std::string& out_path) {
  const kbm::Trajectory offline = kbm::read_trajectory_csv(offline_path);
  const kbm::Trajectory online = kbm::read_trajectory_csv(online_path);
  if (offline.output_dim() != online.output_dim() ||
      offline.input_dim() != online.input_dim())
    throw std::runtime_error("config error: offline/online dimensions differ");

  const auto samples = kbm::build_regressors(offline, opts.lag);
  const kbm::OperatorKernel kernel = opts.kernel().value_or(
      default_regression_kernel(offline.input_dim(), offline.output_dim(), opts.lag));

  json reports = json::array();
  if (online.length() > opts.lag) {
    for (const auto& window : kbm::build_regressors(online, opts.lag)) {
      const kbm::RepresenterReport report =
          kbm::representer_check(samples, window, kernel, {}, opts.policy(), opts.eps_sigma);
      reports.push_back(kbm::report_to_json(report));
    }
  }
  write_text(out_path, reports.dump(2) + "\n");
  return kExitOk;
}

int cmd_identify_subspace(const CommonOpts& opts, const std::string& offline_path,
                          std::optional<kbm::Index> order, const std::string& out_path) {
  const kbm::Trajectory offline = kbm::read_trajectory_csv(offline_path);
  const kbm::OperatorKernel kernel = opts.kernel().value_or(
      kbm::OperatorKernel::rank_one(kbm::FeatureMap::identity(offline.input_dim())));
  const kbm::PastFutureData data = kbm::build_past_future(offline, opts.lag, kernel);
  const kbm::SubspaceResult result =
      kbm::recover_states(data, order, /*eigen_route=*/false, opts.policy());
  write_text(out_path, kbm::subspace_result_to_json(result).dump(2) + "\n");
  return kExitOk;
}

int cmd_validate(const CommonOpts& opts, const std::string& offline_path,
                 const std::string& candidate_path, const std::string& out_path) {
  const kbm::Trajectory offline = kbm::read_trajectory_csv(offline_path);
  const kbm::Trajectory candidate = kbm::read_trajectory_csv(candidate_path);
  const kbm::OperatorKernel kernel = opts.kernel().value_or(
      kbm::OperatorKernel::rank_one(kbm::FeatureMap::identity(offline.input_dim())));
  const kbm::PastFutureData data = kbm::build_past_future(offline, opts.lag, kernel);
  const kbm::MembershipVerdict verdict =
      kbm::membership_test(data, candidate, opts.membership_tol, opts.policy());
  write_text(out_path, kbm::membership_to_json(verdict).dump(2) + "\n");
  return verdict.feasible ? kExitOk : kExitFailure;
}

int cmd_check(std::uint64_t seed, const std::string& out_path) {
  const kbm::CheckSummary summary = kbm::run_checks(seed);
  const std::string text = kbm::summary_to_json_string(summary);
  if (!out_path.empty())
    write_text(out_path, text);
  else
    std::cout << text;
  for (const auto& c : summary.checks)
    std::cerr << (c.passed == c.total ? "PASS " : "FAIL ") << c.name << " (" << c.passed
              << "/" << c.total << ")\n";
  return summary.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven behavioral modeling in vector-valued RKHS"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string model_name = "lti-n2";
  std::string offline_path, online_path, candidate_path, out_path = "out.json";
  kbm::Index horizon = 100;
  std::uint64_t seed = 0;
  std::optional<kbm::Index> order;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--kernel", opts.kernel_json, "inline kernel spec (JSON)");
    sub->add_option("--L", opts.lag, "lag / window depth");
    sub->add_option("--rel-tol", opts.rel_tol, "rank policy relative tolerance");
    sub->add_option("--eps-sigma", opts.eps_sigma, "Sigma zero-classification threshold");
    sub->add_option("--membership-tol", opts.membership_tol, "membership residual threshold");
  };

  auto* sim = app.add_subcommand("simulate", "simulate a catalog or inline model");
  add_common(sim);
  sim->add_option("--model", model_name, "catalog model name");
  sim->add_option("--T", horizon, "horizon")->required();
  sim->add_option("--seed", seed, "input excitation seed")->required();
  sim->add_option("--out", out_path, "output CSV path")->required();

  auto* pred = app.add_subcommand("predict-interp", "minimum-norm interpolation reports");
  add_common(pred);
  pred->add_option("--offline", offline_path)->required();
  pred->add_option("--online", online_path)->required();
  pred->add_option("--out", out_path)->required();

  auto* ident = app.add_subcommand("identify-subspace", "kernelized subspace identification");
  add_common(ident);
  ident->add_option("--offline", offline_path)->required();
  ident->add_option("--n", order, "state order override");
  ident->add_option("--out", out_path)->required();

  auto* val = app.add_subcommand("validate", "trajectory membership test");
  add_common(val);
  val->add_option("--offline", offline_path)->required();
  val->add_option("--candidate", candidate_path)->required();
  val->add_option("--out", out_path)->required();

  auto* chk = app.add_subcommand("check", "run the seeded invariant suite");
  std::string check_out;
  chk->add_option("--seed", seed, "suite seed")->required();
  chk->add_option("--out", check_out, "summary JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    opts.load();
    if (sim->parsed()) return cmd_simulate(opts, model_name, horizon, seed, out_path);
    if (pred->parsed()) return cmd_predict_interp(opts, offline_path, online_path, out_path);
    if (ident->parsed()) return cmd_identify_subspace(opts, offline_path, order, out_path);
    if (val->parsed()) return cmd_validate(opts, offline_path, candidate_path, out_path);
    if (chk->parsed()) return cmd_check(seed, check_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
