#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace adr::simplex {

using Index = Eigen::Index;

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

struct Constraint {
  std::vector<std::pair<Index, double>> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

/// minimize cost^T x  subject to constraints, 0 <= x <= upper.
struct LinearProgram {
  Eigen::VectorXd cost;
  Eigen::VectorXd upper;  // +inf where unbounded; empty means all unbounded
  std::vector<Constraint> constraints;

  Index num_vars() const { return cost.size(); }
};

enum class PivotRule {
  kBland,    // smallest-index entering column
  kDantzig,  // most negative reduced cost, falling back to Bland on stalls
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Result {
  Status status = Status::kInfeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;
  int pivots = 0;
};

/// Dense two-phase tableau simplex. Throws adr::Error(kNumeric) when the
/// pivot cap is reached.
Result solve(const LinearProgram& lp, PivotRule rule = PivotRule::kDantzig,
             int max_pivots = 200000);

}  // namespace adr::simplex
