#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "adr/hierarchy.hpp"
#include "adr/metric.hpp"

namespace adr {

/// Neighborhood radii, in units of 2^-i. h = f + g.
struct NeighborhoodRadii {
  static constexpr double e = 7.0;
  static constexpr double f = 12.0;
  static constexpr double g = 114.0;
  static constexpr double h = 126.0;
};

/// log2(2^{3D} + 1): the dimension the packing rows are calibrated for.
double packing_dimension(double target_dim);

/// Everything the program is built from. `sample` must be prepared
/// (collapsed and normalized) and outlive the instance.
struct LdmInstance {
  const MetricSample* sample = nullptr;
  NetHierarchy hierarchy;
  double target_dim = 1.0;
  double packing_dim = 0.0;
  /// Minimum working distance; 1 for a one-point sample.
  double delta = 1.0;

  static LdmInstance create(const MetricSample& prepared, double target_dim);
  int t() const { return hierarchy.t; }
  Index n() const { return sample->size(); }
};

/// Level-i neighborhoods of every point, as lists of level-i z variables
/// around the point's level-i center.
struct Neighborhoods {
  std::vector<std::vector<Index>> center;  // [level][point]
  std::vector<std::vector<std::vector<Index>>> E, F, G, H;  // [level][point]
};

enum class RowFamily : int {
  kNesting = 2,
  kCover = 3,
  kPackF = 4,
  kPackG = 5,
  kPackH = 6,
  kCostFloor = 7,
  kCostLevel = 8,
  kMonotone = 9,
};

enum class Sense { kLessEqual, kGreaterEqual };

struct Term {
  Index var;
  double coeff;
};

struct Row {
  RowFamily family;
  int level = 0;
  Index point = 0;
  int other_level = -1;  // k for the monotone-support family
  std::vector<Term> terms;
  Sense sense = Sense::kGreaterEqual;
  double rhs = 0.0;
};

/// The relaxed LDM program. Variables: one z per (level, point of that
/// level), then one cost variable per point. Implicit bounds: 0 <= z <= 1,
/// c >= 0. Objective: minimize sum_j multiplicity_j * c_j.
struct LdmProgram {
  int t = 0;
  Index n = 0;
  double delta = 1.0;
  std::vector<std::vector<Index>> z_index;  // [level][point] -> var or -1
  std::vector<std::pair<int, Index>> z_vars;  // var -> (level, point)
  std::vector<Index> c_index;                 // point -> var
  Neighborhoods neighborhoods;
  std::vector<Row> rows;
  Eigen::VectorXd objective;
  std::vector<std::string> warnings;

  Index num_vars() const { return objective.size(); }
  Index num_z() const { return static_cast<Index>(z_vars.size()); }
  bool is_z(Index var) const { return var < num_z(); }
  Index z(int level, Index point) const { return z_index[level][point]; }
};

Neighborhoods build_neighborhoods(const LdmInstance& inst);

/// Emits the nesting, covering, packing, cost and monotone-support rows in
/// (family, level, point, other level) order. Throws if target_dim < 1.
LdmProgram build_program(const LdmInstance& inst);

/// Row counts per family predicted from the hierarchy alone.
struct RowCensus {
  Index nesting = 0, cover = 0, pack = 0, cost_floor = 0, cost_level = 0,
        monotone = 0;
  Index total() const {
    return nesting + cover + 3 * pack + cost_floor + cost_level + monotone;
  }
};
RowCensus expected_census(const NetHierarchy& h, Index n);

double row_activity(const Row& row, const Eigen::VectorXd& x);

struct AssignmentCheck {
  bool ok = true;
  std::size_t row = 0;
  double violation = 0.0;
  std::string message;
};
/// Checks every row plus the variable bounds, to absolute tolerance `tol`.
AssignmentCheck check_assignment(const LdmProgram& prog,
                                 const Eigen::VectorXd& x, double tol = 1e-9);

/// Smallest cost values compatible with the z part of x (rows 7 and 8).
void fill_min_costs(const LdmProgram& prog, Eigen::VectorXd& x);

/// Integral assignment induced by a subset T of the sample: T is extended to
/// a sub-hierarchy of the instance hierarchy (every net point of T moved to
/// its nearest net point unless one is already within 2 * 2^-i), T itself
/// is kept at the top level, and costs are set to their floors.
Eigen::VectorXd witness_assignment(const LdmInstance& inst,
                                   const LdmProgram& prog,
                                   std::span<const Index> subset);

/// Plain-text listing: one row per line, e.g.
/// `r12 cover[3] i=1 j=4: 1 z1_0 + 1 zb3_4 >= 1`.
std::string dump_program(const LdmProgram& prog, const MetricSample& sample);

const char* family_name(RowFamily family);

}  // namespace adr
