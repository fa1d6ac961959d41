#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "adr/metric.hpp"
#include "adr/rounding.hpp"

namespace adr {

/// Ramp loss min(max(0, 1 - y u / gamma), 1). Throws unless 0 < gamma < 1.
double margin_loss(double u, int y, double gamma);

/// sgn with sgn(0) = +1.
inline int sign_of(double v) { return v >= 0.0 ? 1 : -1; }

struct Extension {
  double value = 0.0;
  int sign = 1;
};

/// Midpoint of the upper and lower L-Lipschitz envelopes of the anchor
/// targets, clamped to [-1, 1].
Extension extend_value(const std::vector<double>& targets,
                       const Eigen::VectorXd& dist_to_anchors, double L);

/// Complexity of the L-Lipschitz class on a diameter-1 sample of doubling
/// dimension D: with K = 34 (4L)^{D/2} / sqrt(n) * (D - 1) / 2,
/// 8 K^{2/(D+1)} + max(0, D K (K^{(D-1)/(D+1)} - 1)). D < 2 is evaluated
/// at D = 2.
template <typename Scalar>
Scalar rademacher_bound_metric(Scalar L, Scalar n, Scalar D) {
  using std::max;
  using std::pow;
  using std::sqrt;
  const Scalar d = max(D, Scalar(2));
  const Scalar K = Scalar(34) * pow(Scalar(4) * L, d / Scalar(2)) / sqrt(n) *
                   (d - Scalar(1)) / Scalar(2);
  const Scalar first = Scalar(8) * pow(K, Scalar(2) / (d + Scalar(1)));
  const Scalar second = d * K * (pow(K, (d - Scalar(1)) / (d + Scalar(1))) - Scalar(1));
  return first + max(Scalar(0), second);
}

/// Adds L eta / n^{1/(D+1)} for a perturbed sample.
template <typename Scalar>
Scalar rademacher_bound_perturbed(Scalar L, Scalar n, Scalar D, Scalar eta_normalized) {
  using std::pow;
  return rademacher_bound_metric(L, n, D) +
         L * eta_normalized / pow(n, Scalar(1) / (D + Scalar(1)));
}

/// loss + (2/gamma) R + sqrt(log log2(max(e, 2L/gamma)) / n)
///      + 3 sqrt(log(4/delta) / (2n)).
double generalization_bound(double sample_margin_loss, double L, double gamma, double n,
                            double D, double eta_normalized, double delta);

/// Where every training point lands in T.
struct Perturbation {
  double D = 1.0;
  std::vector<Index> target;  // per input point: prepared-sample index in T
  double eta_total = 0.0;     // sum of displacements, normalized units
  double eta_normalized = 0.0;
};

struct LipschitzClassifier {
  std::vector<std::string> anchor_ids;
  std::vector<double> targets;
  /// Anchor coordinates in input units, when trained on vectors.
  std::optional<Eigen::MatrixXd> anchor_coordinates;
  /// Input distance = working distance * scale_factor.
  double scale_factor = 1.0;
  double L = 1.0;
  double gamma = 0.5;
  double D = 1.0;
  double sample_margin_loss = 0.0;

  /// Distances in input units.
  Extension predict(const Eigen::VectorXd& dist_to_anchors) const;
  Extension predict_point(const Eigen::RowVectorXd& x) const;
};

struct GammaFit {
  double gamma = 0.5;
  double loss = 0.0;
  double bound = 0.0;
};

struct ModelRow {
  double D = 1.0;
  Index t_size = 0;
  double ddim_estimate = 0.0;
  double eta_total = 0.0;
  double eta_normalized = 0.0;
  double mapping_cost = 0.0;  // input units
  double target_scale = 1.0;
  GammaFit fit;
  std::vector<GammaFit> gamma_table;
};

struct ModelSelection {
  std::vector<ModelRow> rows;
  std::size_t chosen = 0;
  Perturbation perturbation;
  LipschitzClassifier classifier;
  double delta = 0.05;
  Index n = 0;

  const ModelRow& best() const { return rows[chosen]; }
};

struct ModelOptions {
  double delta = 0.05;
  std::optional<double> beta;
  /// Restrict the sweep to one dimension.
  std::optional<double> only_D;
};

/// Sweeps D = 1..ceil(log2 n), reducing the sample, anchoring each T point
/// at the mean label of the points mapped to it (scaled down until the
/// targets are 1-Lipschitz) and fitting gamma on {2^-1, ..., 2^-10}.
/// Throws for n < 4 or missing labels.
ModelSelection model_select(const MetricSample& sample, const ModelOptions& opts = {});

}  // namespace adr
