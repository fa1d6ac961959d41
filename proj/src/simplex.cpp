#include "adr/simplex.hpp"

#include <cmath>
#include <limits>

#include "adr/error.hpp"

namespace adr::simplex {

namespace {

constexpr double kEps = 1e-9;
constexpr double kFlush = 1e-12;
constexpr double kPivot = 1e-8;
constexpr double kFeas = 1e-9;
constexpr int kStallLimit = 64;

class Tableau {
 public:
  Tableau(Index rows, Index cols) : t_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)) {}

  double& at(Index r, Index c) { return t_(r, c); }
  Index rows() const { return t_.rows() - 1; }
  Index cols() const { return t_.cols() - 1; }
  Index rhs() const { return t_.cols() - 1; }
  Index obj() const { return t_.rows() - 1; }
  auto row(Index r) { return t_.row(r); }

  void pivot(Index p, Index q) {
    t_.row(p) /= t_(p, q);
    Eigen::VectorXd column = t_.col(q);
    column(p) = 0.0;
    t_.noalias() -= column * t_.row(p);
    // Flush round-off so degenerate vertices stay degenerate.
    t_ = (t_.array().abs() < kFlush).select(0.0, t_);
    for (Index i = 0; i < rows(); ++i)
      if (t_(i, rhs()) < 0.0 && t_(i, rhs()) > -kEps) t_(i, rhs()) = 0.0;
  }

 private:
  Eigen::MatrixXd t_;
};

struct Runner {
  Tableau& tab;
  std::vector<Index>& basis;
  const std::vector<char>& allowed;
  PivotRule rule;
  int& pivots;
  int max_pivots;

  /// Stop as soon as the objective value drops to this level.
  double target = -std::numeric_limits<double>::infinity();

  // Returns false when the objective is unbounded below.
  bool optimize() {
    bool bland = rule == PivotRule::kBland;
    int stalls = 0;
    while (true) {
      if (-tab.at(tab.obj(), tab.rhs()) <= target) return true;
      Index q = -1;
      double best = -kEps;
      for (Index j = 0; j < tab.cols(); ++j) {
        if (!allowed[j]) continue;
        const double r = tab.at(tab.obj(), j);
        if (r < best) {
          q = j;
          if (bland) break;
          best = r;
        }
      }
      if (q < 0) return true;

      // Two-pass ratio test: bound the step with a small feasibility
      // allowance, then take the largest pivot within that bound.
      double theta = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < tab.rows(); ++i) {
        const double a = tab.at(i, q);
        if (a > kPivot) theta = std::min(theta, (tab.at(i, tab.rhs()) + kFeas) / a);
      }
      Index p = -1;
      double ratio = 0.0;
      for (Index i = 0; i < tab.rows(); ++i) {
        const double a = tab.at(i, q);
        if (a <= kPivot) continue;
        const double r = tab.at(i, tab.rhs()) / a;
        if (r > theta) continue;
        if (p < 0 || a > tab.at(p, q) * (1.0 + 1e-9) ||
            (a >= tab.at(p, q) * (1.0 - 1e-9) && basis[i] < basis[p])) {
          p = i;
          ratio = std::max(r, 0.0);
        }
      }
      if (p < 0) return false;
      if (++pivots > max_pivots) fail(ErrorKind::kNumeric, "simplex pivot cap reached");
      stalls = ratio <= kEps ? stalls + 1 : 0;
      if (stalls > kStallLimit) bland = true;
      tab.pivot(p, q);
      basis[p] = q;
    }
  }
};

}  // namespace

Result solve(const LinearProgram& lp, PivotRule rule, int max_pivots) {
  const Index nv = lp.num_vars();
  struct DenseRow {
    Eigen::VectorXd a;
    Relation rel;
    double b;
  };
  std::vector<DenseRow> rows;
  for (const auto& c : lp.constraints) {
    DenseRow r{Eigen::VectorXd::Zero(nv), c.relation, c.rhs};
    for (const auto& [v, coeff] : c.terms) r.a(v) += coeff;
    rows.push_back(std::move(r));
  }
  if (lp.upper.size() == nv) {
    for (Index v = 0; v < nv; ++v) {
      if (!std::isfinite(lp.upper(v))) continue;
      DenseRow r{Eigen::VectorXd::Zero(nv), Relation::kLessEqual, lp.upper(v)};
      r.a(v) = 1.0;
      rows.push_back(std::move(r));
    }
  }
  for (auto& r : rows) {
    if (r.b < 0.0) {
      r.a = -r.a;
      r.b = -r.b;
      if (r.rel == Relation::kLessEqual) r.rel = Relation::kGreaterEqual;
      else if (r.rel == Relation::kGreaterEqual) r.rel = Relation::kLessEqual;
    }
  }

  const Index m = static_cast<Index>(rows.size());
  Index ns = 0, na = 0;
  for (const auto& r : rows) {
    if (r.rel != Relation::kEqual) ++ns;
    if (r.rel != Relation::kLessEqual) ++na;
  }
  const Index art0 = nv + ns;
  Tableau tab(m, nv + ns + na);
  std::vector<Index> basis(m, -1);
  Index s = nv, a = art0;
  for (Index i = 0; i < m; ++i) {
    const auto& r = rows[i];
    for (Index v = 0; v < nv; ++v) tab.at(i, v) = r.a(v);
    tab.at(i, tab.rhs()) = r.b;
    if (r.rel == Relation::kLessEqual) {
      tab.at(i, s) = 1.0;
      basis[i] = s++;
    } else {
      if (r.rel == Relation::kGreaterEqual) tab.at(i, s++) = -1.0;
      tab.at(i, a) = 1.0;
      basis[i] = a++;
    }
  }

  Result result;
  std::vector<char> allowed(tab.cols(), 1);

  // Phase 1: drive the artificials to zero.
  if (na > 0) {
    for (Index i = 0; i < m; ++i)
      if (basis[i] >= art0) tab.row(tab.obj()) -= tab.row(i);
    for (Index j = art0; j < tab.cols(); ++j) tab.at(tab.obj(), j) = 0.0;
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, r.b);
    Runner run{tab, basis, allowed, rule, result.pivots, max_pivots};
    run.target = 1e-10 * scale;
    run.optimize();
    if (-tab.at(tab.obj(), tab.rhs()) > 1e-7 * scale) {
      result.status = Status::kInfeasible;
      return result;
    }
    for (Index i = 0; i < m; ++i) {
      if (basis[i] < art0) continue;
      Index best = -1;
      for (Index j = 0; j < art0; ++j)
        if (std::abs(tab.at(i, j)) > kPivot &&
            (best < 0 || std::abs(tab.at(i, j)) > std::abs(tab.at(i, best))))
          best = j;
      if (best >= 0) {
        tab.pivot(i, best);
        basis[i] = best;
      }
    }
    for (Index j = art0; j < tab.cols(); ++j) allowed[j] = 0;
  }

  // Phase 2.
  tab.row(tab.obj()).setZero();
  for (Index v = 0; v < nv; ++v) tab.at(tab.obj(), v) = lp.cost(v);
  for (Index i = 0; i < m; ++i) {
    const Index b = basis[i];
    if (b < nv && lp.cost(b) != 0.0) tab.row(tab.obj()) -= lp.cost(b) * tab.row(i);
  }
  Runner run{tab, basis, allowed, rule, result.pivots, max_pivots};
  if (!run.optimize()) {
    result.status = Status::kUnbounded;
    return result;
  }
  result.status = Status::kOptimal;
  result.x = Eigen::VectorXd::Zero(nv);
  for (Index i = 0; i < m; ++i)
    if (basis[i] < nv) result.x(basis[i]) = std::max(0.0, tab.at(i, tab.rhs()));
  result.objective = lp.cost.dot(result.x);
  for (const auto& r : rows) {
    const double lhs = r.a.dot(result.x);
    const double tol = 1e-6 * std::max(1.0, std::abs(r.b));
    const bool bad = (r.rel != Relation::kGreaterEqual && lhs > r.b + tol) ||
                     (r.rel != Relation::kLessEqual && lhs < r.b - tol);
    if (bad) fail(ErrorKind::kNumeric, "simplex solution failed its residual check");
  }
  return result;
}

}  // namespace adr::simplex
