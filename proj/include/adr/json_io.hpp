#pragma once

#include <json.hpp>

#include "adr/hierarchy.hpp"
#include "adr/lipschitz.hpp"
#include "adr/lp_solver.hpp"
#include "adr/pca.hpp"
#include "adr/rounding.hpp"

namespace adr::io {

using nlohmann::ordered_json;

ordered_json hierarchy_json(const NetHierarchy& h, const MetricSample& sample);

/// Parses `{t, levels, c}` against the sample's ids.
NetHierarchy hierarchy_from_json(const ordered_json& j, const MetricSample& sample);

ordered_json rounded_json(const RoundedSolution& sol, const MetricSample& prepared);

ordered_json stats_json(const SolverStats& stats);

ordered_json cutoff_json(const pca::CutoffReport& rep);

ordered_json model_json(const ModelSelection& ms);

LipschitzClassifier classifier_from_json(const ordered_json& j);

/// Fixed-format rendering so equal inputs give equal bytes.
std::string dump(const ordered_json& j);

}  // namespace adr::io
