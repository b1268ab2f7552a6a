#pragma once

#include <json.hpp>

namespace ieikit::cli {

/// Executes a resolved RunConfig and returns a summary with an "outputs" list.
/// Throws ieikit::Error or CommandError.
nlohmann::json run_command(const nlohmann::json& config);

} // namespace ieikit::cli
