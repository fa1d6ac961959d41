#pragma once

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

#include "adr/metric.hpp"

namespace adr::test {

inline std::vector<std::string> make_ids(Index n, const std::string& prefix = "p") {
  std::vector<std::string> ids;
  for (Index i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

/// Uniform points in [0, 1]^dim.
inline Eigen::MatrixXd uniform_points(Index n, Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd X(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < dim; ++k) X(i, k) = u(rng);
  return X;
}

inline MetricSample random_euclidean(Index n, Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return from_points(make_ids(n), uniform_points(n, dim, rng));
}

/// n equally spaced points on [0, 1].
inline MetricSample segment(Index n) {
  Eigen::MatrixXd X(n, 1);
  for (Index i = 0; i < n; ++i) X(i, 0) = n == 1 ? 0.0 : double(i) / double(n - 1);
  return from_points(make_ids(n), X);
}

inline MetricSample line_points(const std::vector<double>& xs) {
  Eigen::MatrixXd X(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) X(static_cast<Index>(i), 0) = xs[i];
  return from_points(make_ids(X.rows()), X);
}

/// Two Gaussian-ish clusters at (0, 0) and (1, 0) with labels -1 / +1 and
/// a fraction of labels flipped.
struct Clusters {
  Eigen::MatrixXd X;
  std::vector<int> labels;
};
inline Clusters two_clusters(Index n, double spread, double noise, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, spread);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Clusters c;
  c.X.resize(n, 2);
  for (Index i = 0; i < n; ++i) {
    const int side = (i % 2 == 0) ? 1 : -1;
    c.X(i, 0) = (side > 0 ? 1.0 : 0.0) + g(rng);
    c.X(i, 1) = g(rng);
    c.labels.push_back(u(rng) < noise ? -side : side);
  }
  return c;
}

}  // namespace adr::test
