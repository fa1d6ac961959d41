#include "adr/hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace adr {

namespace {

// Slack for comparing distances against powers of two that came out of a
// division by the diameter.
constexpr double kRelTol = 1e-12;

void derive_links(NetHierarchy& h, const MetricSample& sample) {
  const Index n = sample.size();
  h.membership.assign(h.levels.size(), std::vector<char>(n, 0));
  for (std::size_t i = 0; i < h.levels.size(); ++i)
    for (Index p : h.levels[i]) h.membership[i][p] = 1;
  h.parent.assign(h.levels.size(), std::vector<Index>(n, -1));
  for (std::size_t i = 1; i < h.levels.size(); ++i)
    for (Index p : h.levels[i])
      h.parent[i][p] = nearest_in_level(h, sample, p, static_cast<int>(i) - 1);
}

}  // namespace

bool NetHierarchy::contains(int level, Index point) const {
  return membership[level][point] != 0;
}

int hierarchy_depth(double min_distance, Index n) {
  if (n <= 1) return 0;
  const int depth =
      static_cast<int>(std::ceil(std::log2(1.0 / min_distance) - kRelTol));
  return std::max(1, depth);
}

NetHierarchy build_hierarchy(const MetricSample& sample, double c) {
  const Index n = sample.size();
  if (n == 0) fail(ErrorKind::kInput, "empty sample");
  const double delta = min_distance(sample);
  if (n > 1 && delta <= 0.0) fail(ErrorKind::kInput, "duplicates not collapsed");
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (sample(i, j) == 0.0) fail(ErrorKind::kInput, "duplicates not collapsed");

  NetHierarchy h;
  h.c = c;
  h.t = hierarchy_depth(delta, n);
  h.levels.resize(h.t + 1);
  h.levels[0] = {0};
  std::vector<char> in(n, 0);
  in[0] = 1;
  for (int i = 1; i <= h.t; ++i) {
    std::vector<Index> level = h.levels[i - 1];
    const double r = NetHierarchy::scale(i) * (1.0 - kRelTol);
    for (Index p = 0; p < n; ++p) {
      if (in[p]) continue;
      bool far = i == h.t;
      if (!far) {
        far = true;
        for (Index q : level) {
          if (sample(p, q) < r) {
            far = false;
            break;
          }
        }
      }
      if (far) {
        level.push_back(p);
        in[p] = 1;
      }
    }
    std::sort(level.begin(), level.end());
    h.levels[i] = std::move(level);
  }
  derive_links(h, sample);
  return h;
}

NetHierarchy make_hierarchy(std::vector<std::vector<Index>> levels,
                            const MetricSample& sample, double c) {
  NetHierarchy h;
  h.c = c;
  h.t = static_cast<int>(levels.size()) - 1;
  for (auto& level : levels) std::sort(level.begin(), level.end());
  h.levels = std::move(levels);
  for (const auto& level : h.levels)
    for (Index p : level)
      if (p < 0 || p >= sample.size())
        fail(ErrorKind::kInput, "hierarchy indexes a point outside the sample");
  derive_links(h, sample);
  return h;
}

HierarchyReport validate_hierarchy(const NetHierarchy& h,
                                   const MetricSample& sample) {
  HierarchyReport rep;
  auto fail_with = [&](std::string clause, int level, Index a, Index b,
                       std::string message) {
    rep.ok = false;
    rep.clause = std::move(clause);
    rep.level = level;
    rep.first = a;
    rep.second = b;
    rep.message = std::move(message);
    return rep;
  };
  if (h.levels.empty() || h.levels[0].size() != 1)
    return fail_with("root", 0, -1, -1, "level 0 must hold exactly one point");
  if (static_cast<Index>(h.levels.back().size()) != sample.size())
    return fail_with("top", h.t, -1, -1, "top level must hold every point");

  for (int i = 0; i + 1 <= h.t; ++i)
    for (Index p : h.levels[i])
      if (!h.contains(i + 1, p))
        return fail_with("nested", i, p, -1,
                         "level " + std::to_string(i) + " point " +
                             sample.ids[p] + " missing from level " +
                             std::to_string(i + 1));

  for (int i = 0; i <= h.t; ++i) {
    const double r = NetHierarchy::scale(i) * (1.0 - kRelTol);
    const auto& level = h.levels[i];
    for (std::size_t a = 0; a < level.size(); ++a)
      for (std::size_t b = a + 1; b < level.size(); ++b)
        if (sample(level[a], level[b]) < r)
          return fail_with("packing", i, level[a], level[b],
                           "points " + sample.ids[level[a]] + " and " +
                               sample.ids[level[b]] + " closer than 2^-" +
                               std::to_string(i));
  }

  // Covering balls are closed: at level 0 the radius equals the diameter.
  for (int i = 0; i < h.t; ++i) {
    const double r = h.c * NetHierarchy::scale(i) * (1.0 + kRelTol);
    for (Index v : h.levels[i + 1]) {
      bool covered = false;
      for (Index w : h.levels[i]) {
        if (sample(v, w) <= r) {
          covered = true;
          break;
        }
      }
      if (!covered)
        return fail_with("covering", i, v, -1,
                         "point " + sample.ids[v] + " of level " +
                             std::to_string(i + 1) + " not covered by level " +
                             std::to_string(i));
    }
  }
  rep.message = "ok";
  return rep;
}

Index nearest_in_level(const NetHierarchy& h, const MetricSample& sample,
                       Index v, int level) {
  Index best = -1;
  double best_d = 0.0;
  for (Index w : h.levels[level]) {
    const double d = sample(v, w);
    if (best < 0 || d < best_d) {
      best = w;
      best_d = d;
    }
  }
  return best;
}

}  // namespace adr
