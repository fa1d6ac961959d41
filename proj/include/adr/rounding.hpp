#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adr/ldm_program.hpp"
#include "adr/lp_solver.hpp"
#include "adr/metric.hpp"

namespace adr {

/// Integral hierarchy S''_0 ⊆ ... ⊆ S''_t obtained from a fractional
/// solution. Point indices refer to the prepared sample.
struct RoundedSolution {
  int t = 0;
  std::vector<std::vector<Index>> levels;
  std::vector<Index> T;  // = levels[t]
  /// sum_j m_j d(v_j, T) in input units.
  double mapping_cost = 0.0;
  DdimEstimate ddim;
  /// Fractional objective in input units.
  double lp_objective = 0.0;
  std::vector<std::string> notes;

  bool selected(int level, Index point) const;
};

/// Rounds program z values (indexed by program variable) in three passes:
/// top-level values >= 1/2 go to 1; per level, a greedy disjoint family of
/// F-neighborhoods with some fractional F-sum >= 1/4 at that level or above
/// lifts its centers; everything else goes to 0.
RoundedSolution round_values(const Eigen::VectorXd& z, const LdmProgram& prog,
                             const LdmInstance& inst);

RoundedSolution round_solution(const FractionalSolution& frac,
                               const LdmProgram& prog, const LdmInstance& inst);

/// Integral z vector of a rounded solution.
Eigen::VectorXd indicator(const RoundedSolution& sol, const LdmProgram& prog);

struct AuditReport {
  bool ok = true;
  std::string clause;  // "nested", "packing", "covering"
  int level = -1;
  Index point = -1;
  Index other = -1;
  std::string message;
  /// Largest selected count seen in any level-i G ball.
  Index max_packing = 0;
  /// Packing cap (2h)^{4 D'}.
  double packing_cap = 0.0;
  /// Largest distance to the nearest lower-level selected point, divided
  /// by 2^-k.
  double max_cover_ratio = 0.0;
};

/// Checks nestedness, the G-ball packing cap and (3f + 2) 2^-k covering of
/// every selected point by every lower level.
AuditReport audit(const RoundedSolution& sol, const LdmInstance& inst);

/// Full pipeline: collapse and normalize, hierarchy, program, solve, round.
struct Reduction {
  CollapsedSample prepared;
  RoundedSolution solution;
  SolverStats stats;
  double beta = 0.0;
  std::vector<std::string> warnings;
};

/// Throws adr::Error(kNumeric) when the solver cannot certify any budget.
Reduction reduce(const MetricSample& sample, double target_dim,
                 std::optional<double> beta = std::nullopt);

}  // namespace adr
