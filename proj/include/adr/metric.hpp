#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adr/error.hpp"

namespace adr {

using Index = Eigen::Index;

/// Finite metric sample. Distances are stored densely; coordinates are kept
/// alongside when the sample came from vectors so that query points can be
/// measured against it later. `scale_factor` converts working distances back
/// to input units: original = working * scale_factor.
struct MetricSample {
  std::vector<std::string> ids;
  Eigen::MatrixXd distances;
  std::optional<Eigen::MatrixXd> coordinates;
  std::vector<int> labels;
  std::vector<double> multiplicity;
  double scale_factor = 1.0;

  Index size() const { return distances.rows(); }
  double operator()(Index i, Index j) const { return distances(i, j); }
  bool has_labels() const { return !labels.empty(); }
  double total_multiplicity() const;
};

MetricSample from_points(std::vector<std::string> ids, Eigen::MatrixXd points,
                         std::vector<int> labels = {});
MetricSample from_distances(std::vector<std::string> ids,
                            Eigen::MatrixXd distances,
                            std::vector<int> labels = {});

/// Pairwise Euclidean distances between the rows of `points`.
Eigen::MatrixXd euclidean_distances(const Eigen::MatrixXd& points);

double diameter(const MetricSample& sample);
/// Smallest positive pairwise distance (0 for a one-point sample).
double min_distance(const MetricSample& sample);

/// Restriction to the listed points, in the listed order.
MetricSample subset(const MetricSample& sample, std::span<const Index> points);

/// Duplicate points collapsed onto their first occurrence, which carries the
/// summed multiplicity; `representative[i]` is the collapsed index of input i.
struct CollapsedSample {
  MetricSample sample;
  std::vector<Index> representative;
};
CollapsedSample collapse_duplicates(const MetricSample& sample);

/// Rescales distances (and coordinates) so the diameter is 1.
MetricSample normalized(const MetricSample& sample);
MetricSample denormalized(const MetricSample& sample);

/// Collapse followed by normalization: the form every hierarchy and LDM
/// routine expects (diameter 1, minimum distance > 0).
CollapsedSample prepare(const MetricSample& sample);

struct ValidationReport {
  bool ok = true;
  /// (x, y, z) with d(x, y) > d(x, z) + d(z, y).
  std::optional<std::array<Index, 3>> violation;
  std::string message;
};

/// Checks the triangle inequality, exhaustively for n <= 200 and on
/// 10 n^2 random triples drawn from `seed` above that. Throws on empty input or on a
/// distance matrix that is not square, symmetric, zero-diagonal and
/// nonnegative.
ValidationReport validate_metric(const MetricSample& sample, std::uint64_t seed = 0);

/// log2 of the largest greedy (r/2)-separated subset found inside any ball
/// B(x, r). A maximal packing is also a half-radius cover, so this value
/// bounds the doubling dimension from above.
struct DdimEstimate {
  double value = 0.0;
  Index center = 0;
  double radius = 0.0;
  Index packing_size = 1;
};
DdimEstimate estimate_ddim(const MetricSample& sample);

/// Covering-number bound (2 diam / eps)^ddim, clamped to 1 once a single
/// ball of radius eps covers everything.
template <typename Scalar>
Scalar covering_number_bound(Scalar ddim, Scalar diam, Scalar eps) {
  if (!(eps > Scalar(0))) fail(ErrorKind::kInput, "eps must be positive");
  if (eps >= Scalar(2) * diam) return Scalar(1);
  using std::pow;
  return pow(Scalar(2) * diam / eps, ddim);
}

/// Greedy eps-cover: scanning in index order, every uncovered point opens a
/// ball of radius eps (closed) and becomes a center.
std::vector<Index> greedy_cover(const MetricSample& sample, double eps);

/// min over the set of d(point, member); +inf for an empty set.
double distance_to_set(const MetricSample& sample, Index point,
                       std::span<const Index> set);

/// Sum over all points of multiplicity * distance to the set (working units).
double mapping_cost(const MetricSample& sample, std::span<const Index> set);

}  // namespace adr
