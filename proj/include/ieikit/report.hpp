#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "ieikit/iei.hpp"
#include "ieikit/ood_split.hpp"
#include "ieikit/probe.hpp"
#include "ieikit/selection.hpp"

namespace ieikit {

inline constexpr std::string_view kToolkitVersion = "ieikit 1.0.0";

nlohmann::json to_json(const ProbeConfig& config);
ProbeConfig probe_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScoreTable& scores);
nlohmann::json to_json(const ClassStats& stats);
nlohmann::json to_json(const SelectionPlan& plan);
SelectionPlan selection_plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CurveRecord& curve);
nlohmann::json to_json(const MigrationSplit& split);
MigrationSplit migration_split_from_json(const nlohmann::json& j);

/// "round,size,accuracy" rows; an optional leading "# ..." comment line.
std::string curve_to_csv(const CurveRecord& curve, std::string_view comment = {});

} // namespace ieikit
