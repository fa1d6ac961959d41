#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "adr/metric.hpp"

namespace adr::pca {

/// Singular spectrum of the (optionally centered) data matrix. Identically
/// zero columns are dropped before any arithmetic, and rows are rescaled by
/// a common factor when some row norm exceeds 1.
struct SpectralProfile {
  Index n = 0;
  Index ambient_dim = 0;         // N including zero columns
  std::vector<Index> columns;    // retained column indices
  bool centered = false;
  Eigen::RowVectorXd mean;       // over retained columns; zero unless centered
  double row_scale = 1.0;        // data were multiplied by this
  Eigen::VectorXd singular_values;  // nonincreasing
  Eigen::MatrixXd basis;         // right singular vectors, retained coords
  /// eta(k) = (1/n) * sum_{j > k} s_j^2 for k = 0..rank_bound().
  Eigen::VectorXd eta;

  Index rank_bound() const { return singular_values.size(); }
  /// Maps rows of raw data to coordinates in the top-k singular subspace.
  Eigen::MatrixXd project(const Eigen::MatrixXd& raw, Index k) const;
  /// Rows of raw data after centering, scaling and column selection.
  Eigen::MatrixXd working(const Eigen::MatrixXd& raw) const;
};

SpectralProfile spectral_profile(const Eigen::MatrixXd& X, bool center = false);

/// (1/n) sum_i ||X_i - P X_i||^2 for the orthogonal projector onto the
/// column span of an orthonormal `basis`.
double projection_residual(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis);

/// 17 sqrt(k/n) + sqrt(eta/n).
template <typename Scalar>
Scalar rademacher_bound_euclid(Scalar k, Scalar eta, Scalar n) {
  using std::sqrt;
  return Scalar(17) * sqrt(k / n) + sqrt(eta / n);
}

/// empirical + 34 sqrt(k/n) + 2 sqrt(eta/n) + 3 sqrt(log(2/delta) / (2n)).
template <typename Scalar>
Scalar hinge_bound(Scalar k, Scalar eta, Scalar n, Scalar delta, Scalar empirical) {
  using std::log;
  using std::sqrt;
  return empirical + Scalar(34) * sqrt(k / n) + Scalar(2) * sqrt(eta / n) +
         Scalar(3) * sqrt(log(Scalar(2) / delta) / (Scalar(2) * n));
}

/// |u| when sign(u) disagrees with y, else 0.
double hinge_loss(double u, int y);

struct TrainOptions {
  int epochs = 500;
};

/// Full-batch projected subgradient descent on the average of
/// max(0, 1 - y w.x) over ||w|| <= 1, step 1/sqrt(t), keeping the best
/// iterate seen.
Eigen::VectorXd train_linear(const Eigen::MatrixXd& Z, const std::vector<int>& y,
                             const TrainOptions& opts = {});

double mean_hinge_loss(const Eigen::MatrixXd& Z, const std::vector<int>& y,
                       const Eigen::VectorXd& w);

/// Classifier trained in the top-k subspace and applied to raw vectors by
/// projecting first.
struct LiftedClassifier {
  SpectralProfile profile;
  Index k = 0;
  Eigen::VectorXd w;  // low-dimensional weights

  double low_dim_value(const Eigen::VectorXd& projected) const { return w.dot(projected); }
  double value(const Eigen::RowVectorXd& raw) const;
};

struct CutoffRow {
  Index k = 0;
  double eta = 0.0;
  double rademacher = 0.0;
  double empirical_loss = 0.0;
  double hinge_bound = 0.0;
};

struct CutoffReport {
  SpectralProfile profile;
  std::vector<CutoffRow> rows;
  Index chosen_k = 0;
  Eigen::VectorXd chosen_w;
  double delta = 0.05;
  std::vector<std::string> warnings;
};

/// Evaluates the bound for k = 1..rank_bound() and picks the smallest
/// minimizer. Labels that are all equal give chosen_k = 0.
CutoffReport select_cutoff(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                           double delta = 0.05, bool center = false,
                           const TrainOptions& opts = {});

LiftedClassifier lifted(const CutoffReport& report);

}  // namespace adr::pca
