#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "adr/ldm_program.hpp"
#include "adr/simplex.hpp"

namespace adr {

/// Nonnegative-coefficient rows over x = (z, c, zbar), where zbar is the
/// complement of z (z + zbar = 1). Every program row becomes exactly one
/// packing or covering row; box rows, the cost cap c <= 1 and the budget
/// row sum m_j c_j <= B are appended.
struct PackingCoveringForm {
  struct FormRow {
    std::vector<Term> terms;
    double rhs = 0.0;
    /// Index of the program row this came from, or -1 for box/cap/budget.
    long source = -1;
  };

  Index num_program_vars = 0;
  Index num_vars = 0;
  std::vector<Index> complement;  // program z var -> zbar var
  std::vector<FormRow> packing;
  std::vector<FormRow> covering;
  std::size_t budget_row = 0;  // index into packing
  double beta = 0.25;

  void set_budget(double budget) { packing[budget_row].rhs = budget; }
  double budget() const { return packing[budget_row].rhs; }
};

PackingCoveringForm to_packing_covering(const LdmProgram& prog, double beta);

/// Default precision min(1/4, 1 / (t log2 max(n, 2))).
double default_beta(int t, Index n);

enum class MwuStatus { kFeasible, kInfeasible, kNoCertificate };

struct MwuOptions {
  /// Initial step precision, halved until the packing overshoot is within
  /// 1 + beta.
  double initial_epsilon = 0.5;
  long max_steps = 200'000'000;
  int max_refinements = 10;
};

struct MwuResult {
  MwuStatus status = MwuStatus::kNoCertificate;
  Eigen::VectorXd x;  // form variables
  long steps = 0;
  double overshoot = 0.0;      // max_i (P x)_i / p_i
  double min_cover = 0.0;      // min_i (C x)_i / c_i
  std::string message;
};

/// Multiplicative-weights feasibility search. On kFeasible: Cx >= c holds
/// exactly and Px <= (1 + beta) p. kInfeasible means the current weights
/// certify that no x satisfies Px <= p, Cx >= c.
MwuResult solve_mwu(const PackingCoveringForm& form, const MwuOptions& opts = {});

struct FractionalSolution {
  Eigen::VectorXd z;  // per program z var, clamped to [0, 1]
  Eigen::VectorXd c;  // per point
  double objective = 0.0;  // sum_j m_j c_j
  double overshoot = 0.0;
  double budget = 0.0;
  Eigen::VectorXd form_x;

  /// Program-variable vector (z then c).
  Eigen::VectorXd program_vector() const;
};

struct SolverStats {
  long steps = 0;
  int solves = 0;
  double final_overshoot = 0.0;
  double beta = 0.0;
  std::vector<std::pair<double, std::string>> budget_trace;
};

/// Budget bisection over [0, sum_j m_j] down to relative precision beta
/// (at most 40 probes), returning the solution at the smallest budget the
/// solver found feasible. Throws adr::Error(kNumeric) when not even the full
/// budget yields a certificate.
FractionalSolution minimize_cost(const LdmProgram& prog, double beta,
                                 SolverStats* stats = nullptr,
                                 const MwuOptions& opts = {});

/// Exact optimum of the relaxed program by simplex (<= 200 variables;
/// throws kScaleExceeded beyond). Rows implied by the bounds are skipped.
simplex::Result solve_exact(const LdmProgram& prog,
                            simplex::PivotRule rule = simplex::PivotRule::kDantzig);

const char* status_name(MwuStatus s);

}  // namespace adr
