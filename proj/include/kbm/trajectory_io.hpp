#pragma once

#include <filesystem>
#include <string>

#include "kbm/interp.hpp"
#include "kbm/subspace.hpp"
#include "kbm/systems.hpp"

// Forward declaration keeps nlohmann out of most translation units.
#include <nlohmann/json_fwd.hpp>

namespace kbm {

/// CSV trajectory format: header u0..u{m-1},y0..y{p-1}, one row per time
/// step, LF line endings, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
Trajectory read_trajectory_csv(const std::filesystem::path& path);

std::string format_double(double x);  // 17 significant digits

/// Kernel specification grammar: {"kind": ..., parameter map}.
/// Kinds: linear, gaussian, polynomial, fock (scalar lifts with "p");
/// direct-sum with "u", "y", "split"; rank-one with "phi", "m", "degree".
OperatorKernel parse_kernel_spec(const nlohmann::json& spec);

nlohmann::json report_to_json(const RepresenterReport& report);
nlohmann::json subspace_result_to_json(const SubspaceResult& result);
nlohmann::json membership_to_json(const MembershipVerdict& verdict);

}  // namespace kbm
