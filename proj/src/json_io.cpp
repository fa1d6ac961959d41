#include "adr/json_io.hpp"

#include <unordered_map>

#include "adr/error.hpp"

namespace adr::io {

namespace {

ordered_json id_list(const MetricSample& s, const std::vector<Index>& pts) {
  ordered_json a = ordered_json::array();
  for (Index p : pts) a.push_back(s.ids[p]);
  return a;
}

template <typename T>
T get_field(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorKind::kInput, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::kInput, std::string("bad field '") + key + "'");
  }
}

}  // namespace

ordered_json hierarchy_json(const NetHierarchy& h, const MetricSample& sample) {
  ordered_json j;
  j["t"] = h.t;
  ordered_json levels = ordered_json::array();
  for (const auto& l : h.levels) levels.push_back(id_list(sample, l));
  j["levels"] = std::move(levels);
  j["c"] = h.c;
  return j;
}

NetHierarchy hierarchy_from_json(const ordered_json& j, const MetricSample& sample) {
  std::unordered_map<std::string, Index> index;
  for (Index p = 0; p < sample.size(); ++p) index.emplace(sample.ids[p], p);
  const auto names = get_field<std::vector<std::vector<std::string>>>(j, "levels");
  std::vector<std::vector<Index>> levels;
  for (const auto& l : names) {
    std::vector<Index> lv;
    for (const auto& id : l) {
      const auto it = index.find(id);
      if (it == index.end()) fail(ErrorKind::kInput, "unknown point id '" + id + "'");
      lv.push_back(it->second);
    }
    levels.push_back(std::move(lv));
  }
  NetHierarchy h = make_hierarchy(std::move(levels), sample, get_field<double>(j, "c"));
  if (h.t != get_field<int>(j, "t")) fail(ErrorKind::kInput, "t does not match the levels");
  return h;
}

ordered_json rounded_json(const RoundedSolution& sol, const MetricSample& prepared) {
  ordered_json j;
  j["T"] = id_list(prepared, sol.T);
  j["mapping_cost"] = sol.mapping_cost;
  j["ddim_estimate"] = sol.ddim.value;
  j["lp_objective"] = sol.lp_objective;
  ordered_json levels = ordered_json::array();
  for (const auto& l : sol.levels) levels.push_back(id_list(prepared, l));
  j["levels"] = std::move(levels);
  return j;
}

ordered_json stats_json(const SolverStats& stats) {
  ordered_json j;
  j["steps"] = stats.steps;
  j["solves"] = stats.solves;
  j["final_overshoot"] = stats.final_overshoot;
  j["beta"] = stats.beta;
  ordered_json trace = ordered_json::array();
  for (const auto& [budget, status] : stats.budget_trace)
    trace.push_back({{"budget", budget}, {"status", status}});
  j["budget_trace"] = std::move(trace);
  return j;
}

ordered_json cutoff_json(const pca::CutoffReport& rep) {
  ordered_json j;
  j["chosen_k"] = rep.chosen_k;
  j["n"] = rep.profile.n;
  j["N"] = rep.profile.ambient_dim;
  j["delta"] = rep.delta;
  j["centered"] = rep.profile.centered;
  ordered_json rows = ordered_json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"k", r.k},
                    {"eta", r.eta},
                    {"rademacher", r.rademacher},
                    {"empirical_loss", r.empirical_loss},
                    {"hinge_bound", r.hinge_bound}});
  j["rows"] = std::move(rows);
  j["warnings"] = rep.warnings;
  return j;
}

ordered_json model_json(const ModelSelection& ms) {
  const LipschitzClassifier& c = ms.classifier;
  ordered_json j;
  j["L"] = c.L;
  j["gamma"] = c.gamma;
  j["D"] = c.D;
  j["eta_total"] = ms.perturbation.eta_total;
  j["eta_normalized"] = ms.perturbation.eta_normalized;
  j["sample_margin_loss"] = c.sample_margin_loss;
  j["scale_factor"] = c.scale_factor;
  j["n"] = ms.n;
  j["delta"] = ms.delta;
  j["anchors"] = c.anchor_ids;
  j["targets"] = c.targets;
  if (c.anchor_coordinates) {
    ordered_json coords = ordered_json::array();
    for (Index r = 0; r < c.anchor_coordinates->rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Index k = 0; k < c.anchor_coordinates->cols(); ++k)
        row.push_back((*c.anchor_coordinates)(r, k));
      coords.push_back(std::move(row));
    }
    j["coordinates"] = std::move(coords);
  } else {
    j["coordinates"] = nullptr;
  }
  ordered_json table = ordered_json::array();
  for (const auto& r : ms.rows)
    table.push_back({{"D", r.D},
                     {"T_size", r.t_size},
                     {"ddim_estimate", r.ddim_estimate},
                     {"eta_total", r.eta_total},
                     {"eta_normalized", r.eta_normalized},
                     {"mapping_cost", r.mapping_cost},
                     {"target_scale", r.target_scale},
                     {"gamma", r.fit.gamma},
                     {"margin_loss", r.fit.loss},
                     {"bound", r.fit.bound}});
  j["bound_table"] = std::move(table);
  return j;
}

LipschitzClassifier classifier_from_json(const ordered_json& j) {
  LipschitzClassifier c;
  c.L = get_field<double>(j, "L");
  c.gamma = get_field<double>(j, "gamma");
  c.D = get_field<double>(j, "D");
  c.sample_margin_loss = get_field<double>(j, "sample_margin_loss");
  c.scale_factor = get_field<double>(j, "scale_factor");
  c.anchor_ids = get_field<std::vector<std::string>>(j, "anchors");
  c.targets = get_field<std::vector<double>>(j, "targets");
  if (c.anchor_ids.size() != c.targets.size() || c.targets.empty())
    fail(ErrorKind::kInput, "anchors and targets must be nonempty and of equal length");
  if (!(c.L > 0.0) || !(c.scale_factor > 0.0)) fail(ErrorKind::kInput, "bad model constants");
  if (j.contains("coordinates") && !j["coordinates"].is_null()) {
    const auto rows = get_field<std::vector<std::vector<double>>>(j, "coordinates");
    if (rows.size() != c.targets.size()) fail(ErrorKind::kInput, "one coordinate row per anchor");
    const std::size_t dim = rows.front().size();
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(dim));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != dim) fail(ErrorKind::kInput, "ragged coordinates");
      for (std::size_t k = 0; k < dim; ++k) m(r, k) = rows[r][k];
    }
    c.anchor_coordinates = std::move(m);
  }
  return c;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace adr::io
