#include "adr/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adr/error.hpp"

namespace adr {

double margin_loss(double u, int y, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorKind::kInput, "gamma must lie in (0, 1)");
  return std::min(std::max(0.0, 1.0 - y * u / gamma), 1.0);
}

Extension extend_value(const std::vector<double>& targets,
                       const Eigen::VectorXd& dist_to_anchors, double L) {
  if (targets.empty()) fail(ErrorKind::kInput, "no anchors");
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = L * dist_to_anchors(static_cast<Index>(i));
    upper = std::min(upper, targets[i] + r);
    lower = std::max(lower, targets[i] - r);
  }
  Extension e;
  e.value = std::clamp(0.5 * (upper + lower), -1.0, 1.0);
  e.sign = sign_of(e.value);
  return e;
}

double generalization_bound(double sample_margin_loss, double L, double gamma, double n,
                            double D, double eta_normalized, double delta) {
  if (!(gamma > 0.0 && gamma < 1.0)) fail(ErrorKind::kInput, "gamma must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::kInput, "delta must lie in (0, 1)");
  const double R = rademacher_bound_perturbed(L, n, D, eta_normalized);
  const double loglog = std::log(std::log2(std::max(std::numbers::e, 2.0 * L / gamma)));
  return sample_margin_loss + 2.0 / gamma * R + std::sqrt(loglog / n) +
         3.0 * std::sqrt(std::log(4.0 / delta) / (2.0 * n));
}

Extension LipschitzClassifier::predict(const Eigen::VectorXd& dist_to_anchors) const {
  return extend_value(targets, dist_to_anchors / scale_factor, L);
}

Extension LipschitzClassifier::predict_point(const Eigen::RowVectorXd& x) const {
  if (!anchor_coordinates) fail(ErrorKind::kInput, "model has no anchor coordinates");
  if (x.size() != anchor_coordinates->cols())
    fail(ErrorKind::kInput, "query dimension does not match the model");
  const Eigen::VectorXd d = (anchor_coordinates->rowwise() - x).rowwise().norm();
  return predict(d);
}

namespace {

Index nearest_in(const MetricSample& s, Index p, const std::vector<Index>& T) {
  Index best = T.front();
  for (Index q : T)
    if (s(p, q) < s(p, best)) best = q;
  return best;
}

}  // namespace

ModelSelection model_select(const MetricSample& sample, const ModelOptions& opts) {
  const Index n = sample.size();
  if (n < 4) fail(ErrorKind::kInput, "sample too small for model selection");
  if (!sample.has_labels()) fail(ErrorKind::kInput, "model selection needs labels");
  if (!(opts.delta > 0.0 && opts.delta < 1.0)) fail(ErrorKind::kInput, "delta must lie in (0, 1)");
  const double nd = static_cast<double>(n);

  std::vector<double> dims;
  if (opts.only_D) dims.push_back(*opts.only_D);
  else
    for (int D = 1; D <= static_cast<int>(std::ceil(std::log2(nd))); ++D) dims.push_back(D);

  ModelSelection ms;
  ms.delta = opts.delta;
  ms.n = n;
  double best_bound = std::numeric_limits<double>::infinity();
  for (double D : dims) {
    const Reduction red = reduce(sample, D, opts.beta);
    const MetricSample& ps = red.prepared.sample;
    const std::vector<Index>& T = red.solution.T;

    Perturbation pert;
    pert.D = D;
    pert.target.resize(n);
    std::vector<double> label_sum(ps.size(), 0.0), label_count(ps.size(), 0.0);
    for (Index i = 0; i < n; ++i) {
      const Index p = red.prepared.representative[i];
      const Index a = nearest_in(ps, p, T);
      pert.target[i] = a;
      pert.eta_total += ps(p, a);
      label_sum[a] += sample.labels[i];
      label_count[a] += 1.0;
    }
    pert.eta_normalized = pert.eta_total / std::pow(nd, D / (D + 1.0));

    std::vector<double> target(ps.size(), 0.0);
    for (Index a : T) target[a] = label_count[a] > 0 ? label_sum[a] / label_count[a] : 0.0;
    // Shrink the targets until they are 1-Lipschitz on T.
    double s = 1.0;
    for (std::size_t x = 0; x < T.size(); ++x)
      for (std::size_t y = x + 1; y < T.size(); ++y) {
        const double diff = std::abs(target[T[x]] - target[T[y]]);
        if (diff > 0.0) s = std::min(s, ps(T[x], T[y]) / diff * (1.0 - 1e-12));
      }
    for (Index a : T) target[a] *= s;

    ModelRow row;
    row.D = D;
    row.t_size = static_cast<Index>(T.size());
    row.ddim_estimate = red.solution.ddim.value;
    row.eta_total = pert.eta_total;
    row.eta_normalized = pert.eta_normalized;
    row.mapping_cost = red.solution.mapping_cost;
    row.target_scale = s;
    row.fit.bound = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= 10; ++q) {
      GammaFit g;
      g.gamma = std::ldexp(1.0, -q);
      for (Index i = 0; i < n; ++i) g.loss += margin_loss(target[pert.target[i]], sample.labels[i], g.gamma);
      g.loss /= nd;
      g.bound = generalization_bound(g.loss, 1.0, g.gamma, nd, D, pert.eta_normalized, opts.delta);
      if (g.bound < row.fit.bound) row.fit = g;
      row.gamma_table.push_back(g);
    }

    if (row.fit.bound < best_bound) {
      best_bound = row.fit.bound;
      ms.chosen = ms.rows.size();
      ms.perturbation = pert;
      LipschitzClassifier& clf = ms.classifier;
      clf = LipschitzClassifier{};
      clf.scale_factor = ps.scale_factor;
      clf.L = 1.0;
      clf.gamma = row.fit.gamma;
      clf.D = D;
      clf.sample_margin_loss = row.fit.loss;
      for (Index a : T) {
        clf.anchor_ids.push_back(ps.ids[a]);
        clf.targets.push_back(target[a]);
      }
      if (ps.coordinates) {
        Eigen::MatrixXd c(static_cast<Index>(T.size()), ps.coordinates->cols());
        for (std::size_t r = 0; r < T.size(); ++r)
          c.row(static_cast<Index>(r)) = ps.coordinates->row(T[r]) * ps.scale_factor;
        clf.anchor_coordinates = std::move(c);
      }
    }
    ms.rows.push_back(std::move(row));
  }
  return ms;
}

}  // namespace adr
