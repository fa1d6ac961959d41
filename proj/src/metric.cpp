#include "adr/metric.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace adr {

namespace {

constexpr Index kExhaustiveTriangleLimit = 200;
constexpr Index kFullRadiusScanLimit = 512;
constexpr int kRadiusGridSize = 64;

void check_labels(const std::vector<int>& labels, Index n) {
  if (labels.empty()) return;
  if (static_cast<Index>(labels.size()) != n)
    fail(ErrorKind::kInput, "label count does not match point count");
  for (int y : labels)
    if (y != -1 && y != 1) fail(ErrorKind::kInput, "labels must be -1 or +1");
}

void check_distance_matrix(const Eigen::MatrixXd& d) {
  if (d.rows() != d.cols()) fail(ErrorKind::kInput, "malformed distances");
  for (Index i = 0; i < d.rows(); ++i) {
    if (d(i, i) != 0.0) fail(ErrorKind::kInput, "malformed distances");
    for (Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0 || d(i, j) != d(j, i))
        fail(ErrorKind::kInput, "malformed distances");
    }
  }
}

}  // namespace

double MetricSample::total_multiplicity() const {
  return std::accumulate(multiplicity.begin(), multiplicity.end(), 0.0);
}

Eigen::MatrixXd euclidean_distances(const Eigen::MatrixXd& points) {
  const Index n = points.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double v = (points.row(i) - points.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

MetricSample from_points(std::vector<std::string> ids, Eigen::MatrixXd points,
                         std::vector<int> labels) {
  if (points.rows() == 0) fail(ErrorKind::kInput, "empty sample");
  if (static_cast<Index>(ids.size()) != points.rows())
    fail(ErrorKind::kInput, "id count does not match point count");
  if (!points.allFinite()) fail(ErrorKind::kInput, "non-finite coordinate");
  check_labels(labels, points.rows());
  MetricSample s;
  s.ids = std::move(ids);
  s.distances = euclidean_distances(points);
  s.coordinates = std::move(points);
  s.labels = std::move(labels);
  s.multiplicity.assign(s.ids.size(), 1.0);
  return s;
}

MetricSample from_distances(std::vector<std::string> ids,
                            Eigen::MatrixXd distances,
                            std::vector<int> labels) {
  if (distances.size() == 0) fail(ErrorKind::kInput, "empty sample");
  check_distance_matrix(distances);
  if (static_cast<Index>(ids.size()) != distances.rows())
    fail(ErrorKind::kInput, "malformed distances");
  check_labels(labels, distances.rows());
  MetricSample s;
  s.ids = std::move(ids);
  s.distances = std::move(distances);
  s.labels = std::move(labels);
  s.multiplicity.assign(s.ids.size(), 1.0);
  return s;
}

double diameter(const MetricSample& sample) {
  return sample.size() == 0 ? 0.0 : sample.distances.maxCoeff();
}

double min_distance(const MetricSample& sample) {
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < sample.size(); ++i)
    for (Index j = i + 1; j < sample.size(); ++j)
      if (sample(i, j) > 0.0) best = std::min(best, sample(i, j));
  return std::isfinite(best) ? best : 0.0;
}

MetricSample subset(const MetricSample& sample, std::span<const Index> points) {
  const Index m = static_cast<Index>(points.size());
  MetricSample out;
  out.scale_factor = sample.scale_factor;
  out.distances.resize(m, m);
  for (Index a = 0; a < m; ++a) {
    out.ids.push_back(sample.ids[points[a]]);
    out.multiplicity.push_back(sample.multiplicity[points[a]]);
    if (sample.has_labels()) out.labels.push_back(sample.labels[points[a]]);
    for (Index b = 0; b < m; ++b)
      out.distances(a, b) = sample(points[a], points[b]);
  }
  if (sample.coordinates) {
    Eigen::MatrixXd c(m, sample.coordinates->cols());
    for (Index a = 0; a < m; ++a) c.row(a) = sample.coordinates->row(points[a]);
    out.coordinates = std::move(c);
  }
  return out;
}

CollapsedSample collapse_duplicates(const MetricSample& sample) {
  const Index n = sample.size();
  std::vector<Index> kept;
  std::vector<Index> representative(n, -1);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < static_cast<Index>(kept.size()); ++k) {
      if (sample(i, kept[k]) == 0.0) {
        representative[i] = k;
        break;
      }
    }
    if (representative[i] < 0) {
      representative[i] = static_cast<Index>(kept.size());
      kept.push_back(i);
    }
  }
  CollapsedSample out{subset(sample, kept), std::move(representative)};
  std::fill(out.sample.multiplicity.begin(), out.sample.multiplicity.end(), 0.0);
  for (Index i = 0; i < n; ++i)
    out.sample.multiplicity[out.representative[i]] += sample.multiplicity[i];
  return out;
}

MetricSample normalized(const MetricSample& sample) {
  MetricSample out = sample;
  const double diam = diameter(sample);
  if (diam <= 0.0) return out;
  out.distances /= diam;
  if (out.coordinates) *out.coordinates /= diam;
  out.scale_factor = sample.scale_factor * diam;
  return out;
}

MetricSample denormalized(const MetricSample& sample) {
  MetricSample out = sample;
  out.distances *= sample.scale_factor;
  if (out.coordinates) *out.coordinates *= sample.scale_factor;
  out.scale_factor = 1.0;
  return out;
}

CollapsedSample prepare(const MetricSample& sample) {
  CollapsedSample c = collapse_duplicates(sample);
  c.sample = normalized(c.sample);
  return c;
}

ValidationReport validate_metric(const MetricSample& sample, std::uint64_t seed) {
  const Index n = sample.size();
  if (n == 0) fail(ErrorKind::kInput, "empty sample");
  check_distance_matrix(sample.distances);
  const double tol = 1e-9 * diameter(sample);

  ValidationReport report;
  auto check = [&](Index x, Index y, Index z) {
    if (sample(x, y) > sample(x, z) + sample(z, y) + tol) {
      report.ok = false;
      report.violation = std::array<Index, 3>{x, y, z};
      report.message = "triangle inequality violated: d(" + sample.ids[x] +
                       "," + sample.ids[y] + ") > d(" + sample.ids[x] + "," +
                       sample.ids[z] + ") + d(" + sample.ids[z] + "," +
                       sample.ids[y] + ")";
      return true;
    }
    return false;
  };

  if (n <= kExhaustiveTriangleLimit) {
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y)
        for (Index z = 0; z < n; ++z)
          if (check(x, y, z)) return report;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    const Index trials = 10 * n * n;
    for (Index k = 0; k < trials; ++k) {
      const Index x = pick(rng), y = pick(rng), z = pick(rng);
      if (check(x, y, z)) return report;
    }
  }
  report.message = "ok";
  return report;
}

DdimEstimate estimate_ddim(const MetricSample& sample) {
  const Index n = sample.size();
  DdimEstimate best;
  if (n <= 1) return best;

  std::vector<double> grid;
  if (n > kFullRadiusScanLimit) {
    const double lo = min_distance(sample);
    const double hi = 2.0 * diameter(sample);
    for (int k = 0; k < kRadiusGridSize; ++k)
      grid.push_back(lo * std::pow(hi / lo, double(k) / (kRadiusGridSize - 1)));
  }

  std::vector<Index> order(n);
  std::vector<Index> packing;
  std::vector<double> radii;
  for (Index x = 0; x < n; ++x) {
    // Ball contents are prefixes of this order; it only depends on distances
    // to the center, so the estimate does not depend on input order beyond
    // exact ties.
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
      return sample(x, a) < sample(x, b);
    });
    if (grid.empty()) {
      radii.clear();
      for (Index y = 0; y < n; ++y) {
        if (y == x) continue;
        radii.push_back(sample(x, y));
        radii.push_back(2.0 * sample(x, y));
      }
      std::sort(radii.begin(), radii.end());
      radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    } else {
      radii = grid;
    }
    for (double r : radii) {
      packing.clear();
      for (Index y : order) {
        if (sample(x, y) > r) break;
        bool separated = true;
        for (Index p : packing) {
          if (sample(y, p) <= r / 2.0) {
            separated = false;
            break;
          }
        }
        if (separated) packing.push_back(y);
      }
      if (static_cast<Index>(packing.size()) > best.packing_size) {
        best.packing_size = static_cast<Index>(packing.size());
        best.center = x;
        best.radius = r;
      }
    }
  }
  best.value = std::log2(static_cast<double>(best.packing_size));
  return best;
}

std::vector<Index> greedy_cover(const MetricSample& sample, double eps) {
  const Index n = sample.size();
  std::vector<bool> covered(n, false);
  std::vector<Index> centers;
  for (Index i = 0; i < n; ++i) {
    if (covered[i]) continue;
    centers.push_back(i);
    for (Index j = 0; j < n; ++j)
      if (sample(i, j) <= eps) covered[j] = true;
  }
  return centers;
}

double distance_to_set(const MetricSample& sample, Index point,
                       std::span<const Index> set) {
  double best = std::numeric_limits<double>::infinity();
  for (Index q : set) best = std::min(best, sample(point, q));
  return best;
}

double mapping_cost(const MetricSample& sample, std::span<const Index> set) {
  double total = 0.0;
  for (Index i = 0; i < sample.size(); ++i)
    total += sample.multiplicity[i] * distance_to_set(sample, i, set);
  return total;
}

}  // namespace adr
