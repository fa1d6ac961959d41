#include "adr/pca.hpp"

#include <algorithm>
#include <cmath>

#include "adr/error.hpp"

namespace adr::pca {

Eigen::MatrixXd SpectralProfile::working(const Eigen::MatrixXd& raw) const {
  if (raw.cols() != ambient_dim)
    fail(ErrorKind::kInput, "expected " + std::to_string(ambient_dim) + " coordinates, got " +
                                std::to_string(raw.cols()));
  Eigen::MatrixXd A(raw.rows(), static_cast<Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) A.col(c) = raw.col(columns[c]);
  if (centered) A.rowwise() -= mean;
  return A * row_scale;
}

Eigen::MatrixXd SpectralProfile::project(const Eigen::MatrixXd& raw, Index k) const {
  return working(raw) * basis.leftCols(k);
}

SpectralProfile spectral_profile(const Eigen::MatrixXd& X, bool center) {
  if (X.rows() == 0 || X.cols() == 0) fail(ErrorKind::kInput, "empty matrix");
  if (!X.allFinite()) fail(ErrorKind::kInput, "non-finite coordinates");
  SpectralProfile p;
  p.n = X.rows();
  p.ambient_dim = X.cols();
  p.centered = center;
  for (Index c = 0; c < X.cols(); ++c)
    if ((X.col(c).array() != 0.0).any()) p.columns.push_back(c);
  p.mean = Eigen::RowVectorXd::Zero(static_cast<Index>(p.columns.size()));

  Eigen::MatrixXd A(X.rows(), static_cast<Index>(p.columns.size()));
  for (std::size_t c = 0; c < p.columns.size(); ++c) A.col(c) = X.col(p.columns[c]);
  if (center) {
    p.mean = A.colwise().mean();
    A.rowwise() -= p.mean;
  }
  const double max_norm = A.rows() > 0 && A.cols() > 0 ? A.rowwise().norm().maxCoeff() : 0.0;
  if (max_norm > 1.0) {
    p.row_scale = 1.0 / max_norm;
    A *= p.row_scale;
  }

  if (A.cols() == 0) {
    p.singular_values.resize(0);
    p.basis.resize(0, 0);
    p.eta = Eigen::VectorXd::Zero(1);
    return p;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  p.singular_values = svd.singularValues();
  p.basis = svd.matrixV();
  const Index r = p.singular_values.size();
  p.eta = Eigen::VectorXd::Zero(r + 1);
  for (Index k = r - 1; k >= 0; --k)
    p.eta(k) = p.eta(k + 1) + p.singular_values(k) * p.singular_values(k) / static_cast<double>(p.n);
  return p;
}

double projection_residual(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd R = X - (X * basis) * basis.transpose();
  return R.squaredNorm() / static_cast<double>(X.rows());
}

double hinge_loss(double u, int y) { return y * u < 0.0 ? std::abs(u) : 0.0; }

double mean_hinge_loss(const Eigen::MatrixXd& Z, const std::vector<int>& y,
                       const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Index i = 0; i < Z.rows(); ++i) s += hinge_loss(Z.row(i).dot(w), y[i]);
  return s / static_cast<double>(Z.rows());
}

namespace {

double surrogate(const Eigen::MatrixXd& Z, const std::vector<int>& y, const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Index i = 0; i < Z.rows(); ++i) s += std::max(0.0, 1.0 - y[i] * Z.row(i).dot(w));
  return s / static_cast<double>(Z.rows());
}

}  // namespace

Eigen::VectorXd train_linear(const Eigen::MatrixXd& Z, const std::vector<int>& y,
                             const TrainOptions& opts) {
  const Index n = Z.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(Z.cols());
  Eigen::VectorXd best = w;
  double best_loss = surrogate(Z, y, w);
  for (int t = 1; t <= opts.epochs; ++t) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(Z.cols());
    for (Index i = 0; i < n; ++i)
      if (y[i] * Z.row(i).dot(w) < 1.0) g -= y[i] * Z.row(i).transpose();
    g /= static_cast<double>(n);
    w -= g / std::sqrt(static_cast<double>(t));
    const double norm = w.norm();
    if (norm > 1.0) w /= norm;
    const double loss = surrogate(Z, y, w);
    if (loss < best_loss) {
      best_loss = loss;
      best = w;
    }
  }
  return best;
}

double LiftedClassifier::value(const Eigen::RowVectorXd& raw) const {
  if (k == 0) return 0.0;
  const Eigen::VectorXd z = profile.project(raw, k).row(0).transpose();
  return low_dim_value(z);
}

CutoffReport select_cutoff(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                           double delta, bool center, const TrainOptions& opts) {
  if (!(delta > 0.0 && delta < 1.0)) fail(ErrorKind::kInput, "delta must lie in (0, 1)");
  if (static_cast<Index>(labels.size()) != X.rows())
    fail(ErrorKind::kInput, "every row needs a label");
  CutoffReport rep;
  rep.delta = delta;
  rep.profile = spectral_profile(X, center);
  const auto& prof = rep.profile;
  const double n = static_cast<double>(prof.n);
  if (prof.row_scale != 1.0) rep.warnings.push_back("rows rescaled to norm <= 1");

  const Eigen::MatrixXd A = prof.working(X);
  double best = std::numeric_limits<double>::infinity();
  for (Index k = 1; k <= prof.rank_bound(); ++k) {
    const Eigen::MatrixXd Z = A * prof.basis.leftCols(k);
    const Eigen::VectorXd w = train_linear(Z, labels, opts);
    CutoffRow row;
    row.k = k;
    row.eta = prof.eta(k);
    row.rademacher = rademacher_bound_euclid(static_cast<double>(k), row.eta, n);
    row.empirical_loss = mean_hinge_loss(Z, labels, w);
    row.hinge_bound = hinge_bound(static_cast<double>(k), row.eta, n, delta, row.empirical_loss);
    if (row.hinge_bound < best) {
      best = row.hinge_bound;
      rep.chosen_k = k;
      rep.chosen_w = w;
    }
    rep.rows.push_back(row);
  }

  const bool degenerate =
      std::all_of(labels.begin(), labels.end(), [&](int y) { return y == labels.front(); });
  if (degenerate) {
    rep.warnings.push_back("all labels equal: constant classifier");
    rep.chosen_k = 0;
    rep.chosen_w.resize(0);
  } else if (rep.rows.empty()) {
    rep.warnings.push_back("data are identically zero");
  }
  return rep;
}

LiftedClassifier lifted(const CutoffReport& report) {
  LiftedClassifier c;
  c.profile = report.profile;
  c.k = report.chosen_k;
  c.w = report.chosen_w;
  return c;
}

}  // namespace adr::pca
