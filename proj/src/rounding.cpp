#include "adr/rounding.hpp"

#include <algorithm>
#include <cmath>

#include "adr/hierarchy.hpp"

namespace adr {

namespace {

constexpr double kStepOne = 0.5;
constexpr double kStepTwo = 0.25;

double var_sum(const Eigen::VectorXd& z, const std::vector<Index>& vars) {
  double s = 0.0;
  for (Index v : vars) s += z(v);
  return s;
}

bool disjoint(const std::vector<Index>& a, const std::vector<char>& used) {
  for (Index v : a)
    if (used[v]) return false;
  return true;
}

}  // namespace

bool RoundedSolution::selected(int level, Index point) const {
  const auto& l = levels[level];
  return std::binary_search(l.begin(), l.end(), point);
}

RoundedSolution round_values(const Eigen::VectorXd& z, const LdmProgram& prog,
                             const LdmInstance& inst) {
  const int t = prog.t;
  const Index n = prog.n;
  const auto& nb = prog.neighborhoods;
  std::vector<char> up(prog.num_z(), 0);

  // Step 1.
  for (Index j = 0; j < n; ++j)
    if (z(prog.z(t, j)) >= kStepOne) up[prog.z(t, j)] = 1;

  // Step 2. best[i][j] = max over k >= i of the fractional F^k_j sum.
  std::vector<std::vector<double>> best(t + 1, std::vector<double>(n, 0.0));
  for (int i = t; i >= 0; --i)
    for (Index j = 0; j < n; ++j) {
      best[i][j] = var_sum(z, nb.F[i][j]);
      if (i < t) best[i][j] = std::max(best[i][j], best[i + 1][j]);
    }
  for (int i = 0; i <= t; ++i) {
    std::vector<char> used(prog.num_z(), 0);
    for (Index j = 0; j < n; ++j) {
      if (best[i][j] < kStepTwo) continue;
      const auto& fam = nb.F[i][j];
      if (!disjoint(fam, used)) continue;
      for (Index v : fam) used[v] = 1;
      const Index center = nb.center[i][j];
      for (int k = i; k <= t; ++k) up[prog.z(k, center)] = 1;
    }
  }

  // Step 3 is implicit: everything not raised stays 0.
  RoundedSolution sol;
  sol.t = t;
  sol.levels.assign(t + 1, {});
  for (Index v = 0; v < prog.num_z(); ++v)
    if (up[v]) sol.levels[prog.z_vars[v].first].push_back(prog.z_vars[v].second);
  for (auto& l : sol.levels) std::sort(l.begin(), l.end());

  const MetricSample& sample = *inst.sample;
  if (sol.levels[t].empty()) {
    const Index root = inst.hierarchy.levels[0].front();
    for (auto& l : sol.levels) l.push_back(root);
    sol.notes.push_back("rounding selected nothing; kept the root point");
  }
  sol.T = sol.levels[t];
  sol.mapping_cost = mapping_cost(sample, sol.T) * sample.scale_factor;
  sol.ddim = estimate_ddim(subset(sample, sol.T));
  return sol;
}

RoundedSolution round_solution(const FractionalSolution& frac,
                               const LdmProgram& prog, const LdmInstance& inst) {
  RoundedSolution sol = round_values(frac.z, prog, inst);
  sol.lp_objective = frac.objective * inst.sample->scale_factor;
  return sol;
}

Eigen::VectorXd indicator(const RoundedSolution& sol, const LdmProgram& prog) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(prog.num_z());
  for (int i = 0; i <= sol.t; ++i)
    for (Index p : sol.levels[i])
      if (prog.z(i, p) >= 0) z(prog.z(i, p)) = 1.0;
  return z;
}

AuditReport audit(const RoundedSolution& sol, const LdmInstance& inst) {
  const MetricSample& sample = *inst.sample;
  const NetHierarchy& h = inst.hierarchy;
  const int t = sol.t;
  AuditReport rep;
  rep.packing_cap = std::pow(2.0 * NeighborhoodRadii::h, 4.0 * inst.packing_dim);
  auto failure = [&](const char* clause, int level, Index p, Index q, std::string msg) {
    if (!rep.ok) return;
    rep.ok = false;
    rep.clause = clause;
    rep.level = level;
    rep.point = p;
    rep.other = q;
    rep.message = std::move(msg);
  };

  for (int i = 0; i < t; ++i)
    for (Index p : sol.levels[i])
      if (!sol.selected(i + 1, p))
        failure("nested", i, p, -1,
                "point " + sample.ids[p] + " selected at level " + std::to_string(i) +
                    " but not at level " + std::to_string(i + 1));

  for (int i = 0; i <= t; ++i) {
    const double radius = NeighborhoodRadii::g * NetHierarchy::scale(i);
    for (Index j = 0; j < sample.size(); ++j) {
      const Index c = h.contains(i, j) ? j : nearest_in_level(h, sample, j, i);
      Index count = 0;
      for (Index p : sol.levels[i])
        if (sample(c, p) <= radius) ++count;
      rep.max_packing = std::max(rep.max_packing, count);
      if (static_cast<double>(count) > rep.packing_cap)
        failure("packing", i, c, -1,
                std::to_string(count) + " selected points in a level-" + std::to_string(i) +
                    " G ball");
    }
  }

  const double slack = 3.0 * NeighborhoodRadii::f + 2.0;
  for (int i = 1; i <= t; ++i)
    for (Index p : sol.levels[i])
      for (int k = 0; k < i; ++k) {
        const double d = distance_to_set(sample, p, sol.levels[k]);
        const double ratio = d / NetHierarchy::scale(k);
        if (std::isfinite(ratio)) rep.max_cover_ratio = std::max(rep.max_cover_ratio, ratio);
        if (!(ratio < slack))
          failure("covering", i, p, k,
                  "point " + sample.ids[p] + " at level " + std::to_string(i) +
                      " is not covered by level " + std::to_string(k));
      }
  return rep;
}

Reduction reduce(const MetricSample& sample, double target_dim,
                 std::optional<double> beta) {
  Reduction r;
  r.prepared = prepare(sample);
  const LdmInstance inst = LdmInstance::create(r.prepared.sample, target_dim);
  const LdmProgram prog = build_program(inst);
  r.warnings = prog.warnings;
  r.beta = beta.value_or(default_beta(prog.t, prog.n));
  const FractionalSolution frac = minimize_cost(prog, r.beta, &r.stats);
  r.solution = round_solution(frac, prog, inst);
  return r;
}

}  // namespace adr
