#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "adr/metric.hpp"

namespace adr {

/// Nested nets S_0 ⊆ ... ⊆ S_t over a normalized sample. Level i is a
/// 2^-i packing, and every point of level i+1 lies within c * 2^-i of level i.
struct NetHierarchy {
  int t = 0;
  double c = 1.0;
  /// Point indices of each level, ascending.
  std::vector<std::vector<Index>> levels;
  /// parent[i][p]: covering point in level i-1 for p in level i (i >= 1),
  /// -1 when p is not in level i.
  std::vector<std::vector<Index>> parent;

  int num_levels() const { return t + 1; }
  bool contains(int level, Index point) const;
  static double scale(int level) { return std::ldexp(1.0, -level); }

  std::vector<std::vector<char>> membership;  // [level][point]
};

/// Number of levels below the root: max(1, ceil(log2(1 / delta))) for n >= 2,
/// 0 for a single point.
int hierarchy_depth(double min_distance, Index n);

/// Greedy construction: S_0 is the first point; each later level starts from
/// the previous one and admits points in index order that are >= 2^-i away
/// from everything already admitted. The result is 1-covering.
NetHierarchy build_hierarchy(const MetricSample& sample, double c = 1.0);

/// Assembles a hierarchy from explicit levels (membership and parents are
/// derived). Used for deserialized or hand-built hierarchies.
NetHierarchy make_hierarchy(std::vector<std::vector<Index>> levels,
                            const MetricSample& sample, double c = 1.0);

struct HierarchyReport {
  bool ok = true;
  std::string clause;  // "nested", "packing", "covering", "root", "top"
  int level = -1;
  Index first = -1;
  Index second = -1;
  std::string message;
};

HierarchyReport validate_hierarchy(const NetHierarchy& h,
                                   const MetricSample& sample);

/// argmin over S_level of the distance to v; ties go to the smaller index.
Index nearest_in_level(const NetHierarchy& h, const MetricSample& sample,
                       Index v, int level);

}  // namespace adr
