#pragma once

#include "bmclab/criterion.hpp"
#include "bmclab/environment.hpp"

#include <json.hpp>

#include <string>

namespace bmclab {

/// Environment spec schema:
/// {
///   "dimension": 1,
///   "steps": [[1], [-1]],
///   "gen_subset": [[1], [-1]],        // members of steps
///   "epsilon": 0.01,
///   "palette": [
///     {"atoms": [{"counts": [1, 0], "prob": 0.5},
///                {"counts": [0, 1], "prob": 0.5}]}
///   ],
///   "weights": [1.0]
/// }
/// counts[i] is the offspring count at steps[i].
EnvironmentSpec spec_from_json(const nlohmann::json& doc);
EnvironmentSpec load_spec_file(const std::string& path);

nlohmann::json spec_to_json(const EnvironmentSpec& spec);

nlohmann::json report_to_json(const CriterionReport& report);

} // namespace bmclab
