#pragma once

#include <cstdint>
#include <string>

#include "kbm/systems.hpp"

#include <nlohmann/json_fwd.hpp>

namespace kbm {

/// Named reference models. Currently: "lti-n1", "lti-n2", "lti-n3",
/// "hammerstein-tanh".
StateSpaceModel catalog_model(const std::string& name);

/// Inline model from a config document: matrices as row-major arrays plus
/// nonlinearity names ("identity" / "tanh" / "polynomial").
StateSpaceModel parse_model_spec(const nlohmann::json& spec);

/// Seeded random stable model with identity nonlinearities (LTI when
/// q = m). Observability and controllability are enforced by rejection.
StateSpaceModel random_lti(Index n, Index m, Index p, std::uint64_t seed);

/// Seeded random stable observable Hammerstein model with the given
/// input nonlinearities.
StateSpaceModel random_hammerstein(Index n, Index m, std::uint64_t seed,
                                   FeatureMap psi1, FeatureMap psi2);

}  // namespace kbm
