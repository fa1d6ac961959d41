#include "adr/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace adr {

namespace {

constexpr double kBigWeight = 1e200;
constexpr long kRefreshInterval = 4096;
constexpr int kMaxBisection = 40;

using Entry = std::pair<Index, double>;

/// Form rows scaled to unit right-hand side, with row- and column-major
/// copies for incremental weight updates.
struct UnitRows {
  std::vector<std::vector<Entry>> pack_rows, cover_rows;  // (var, coeff)
  std::vector<std::vector<Entry>> pack_cols, cover_cols;  // (row, coeff)
  std::vector<char> frozen;
  bool trivially_infeasible = false;
};

UnitRows normalize(const PackingCoveringForm& form) {
  UnitRows u;
  u.frozen.assign(form.num_vars, 0);
  for (const auto& row : form.packing) {
    // Nonnegative terms cannot sum below a negative right-hand side.
    if (row.rhs < 0.0) u.trivially_infeasible = true;
    if (row.rhs <= 0.0)
      for (const auto& t : row.terms)
        if (t.coeff > 0.0) u.frozen[t.var] = 1;
  }

  u.pack_cols.resize(form.num_vars);
  u.cover_cols.resize(form.num_vars);
  for (const auto& row : form.packing) {
    if (row.rhs <= 0.0) continue;
    if (row.source >= 0) {
      double total = 0.0;
      for (const auto& t : row.terms) total += t.coeff;
      if (total <= row.rhs) continue;  // implied by the box rows
    }
    std::vector<Entry> r;
    for (const auto& t : row.terms)
      if (!u.frozen[t.var]) r.emplace_back(t.var, t.coeff / row.rhs);
    if (r.empty()) continue;
    const Index id = static_cast<Index>(u.pack_rows.size());
    for (const auto& [v, a] : r) u.pack_cols[v].emplace_back(id, a);
    u.pack_rows.push_back(std::move(r));
  }
  for (const auto& row : form.covering) {
    if (row.rhs <= 0.0) continue;
    std::vector<Entry> r;
    for (const auto& t : row.terms)
      if (!u.frozen[t.var]) r.emplace_back(t.var, t.coeff / row.rhs);
    if (r.empty()) {
      u.trivially_infeasible = true;
      continue;
    }
    const Index id = static_cast<Index>(u.cover_rows.size());
    for (const auto& [v, a] : r) u.cover_cols[v].emplace_back(id, a);
    u.cover_rows.push_back(std::move(r));
  }
  return u;
}

double form_ratio(const std::vector<PackingCoveringForm::FormRow>& rows,
                  const Eigen::VectorXd& x, bool want_max) {
  double best = want_max ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    double a = 0.0;
    for (const auto& t : row.terms) a += t.coeff * x(t.var);
    if (row.rhs <= 0.0) {
      if (want_max && a > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    best = want_max ? std::max(best, a / row.rhs) : std::min(best, a / row.rhs);
  }
  return best;
}

/// One pass of the sequential algorithm at step precision eps.
MwuResult run_mwu(const PackingCoveringForm& form, const UnitRows& u, double eps,
                  long max_steps) {
  MwuResult res;
  const Index nv = form.num_vars;
  const std::size_t mp = u.pack_rows.size(), mc = u.cover_rows.size();
  res.x = Eigen::VectorXd::Zero(nv);
  if (mc == 0) {
    res.status = MwuStatus::kFeasible;
    return res;
  }
  const double scale = std::ceil(2.0 * std::log(static_cast<double>(mp + mc + 1)) / (eps * eps));
  const double grow = std::log1p(eps), shrink = std::log1p(-eps);

  std::vector<double> pval(mp, 0.0), cval(mc, 0.0);
  std::vector<double> y(mp, 1.0), z(mc, 1.0);
  std::vector<char> active(mc, 1);
  std::vector<double> py(nv, 0.0), cz(nv, 0.0), max_pack(nv, 0.0);
  double ysum = 0.0, zsum = 0.0;
  std::size_t remaining = mc;

  auto refresh = [&] {
    std::fill(py.begin(), py.end(), 0.0);
    std::fill(cz.begin(), cz.end(), 0.0);
    ysum = std::accumulate(y.begin(), y.end(), 0.0);
    zsum = std::accumulate(z.begin(), z.end(), 0.0);
    for (std::size_t i = 0; i < mp; ++i)
      for (const auto& [v, a] : u.pack_rows[i]) py[v] += a * y[i];
    for (std::size_t i = 0; i < mc; ++i)
      if (active[i])
        for (const auto& [v, a] : u.cover_rows[i]) cz[v] += a * z[i];
  };
  for (Index v = 0; v < nv; ++v)
    for (const auto& [r, a] : u.pack_cols[v]) max_pack[v] = std::max(max_pack[v], a);
  refresh();

  auto eligible = [&](Index v) {
    return cz[v] > 0.0 && py[v] * zsum <= (1.0 + eps) * cz[v] * ysum;
  };

  Index cursor = 0;
  Index misses = 0;
  while (remaining > 0) {
    if (!eligible(cursor)) {
      cursor = (cursor + 1) % nv;
      if (++misses > nv) {
        if (misses > 2 * nv) {
          res.status = MwuStatus::kInfeasible;
          res.message = "multiplicative weights certify infeasibility";
          return res;
        }
        // Confirm the certificate on freshly summed weights.
        refresh();
        misses = nv + 1;
        for (Index k = 0; k < nv && misses > nv; ++k)
          if (eligible(k)) {
            cursor = k;
            misses = 0;
          }
        if (misses > nv) misses = 2 * nv + 1;
      }
      continue;
    }
    misses = 0;
    if (++res.steps > max_steps) {
      res.status = MwuStatus::kNoCertificate;
      res.message = "step cap exceeded";
      return res;
    }
    const Index v = cursor;
    double max_coeff = max_pack[v];
    for (const auto& [r, a] : u.cover_cols[v])
      if (active[r]) max_coeff = std::max(max_coeff, a);
    const double d = 1.0 / max_coeff;
    res.x(v) += d;

    for (const auto& [r, a] : u.pack_cols[v]) {
      pval[r] += a * d;
      const double updated = y[r] * std::exp(grow * a * d);
      const double dy = updated - y[r];
      y[r] = updated;
      ysum += dy;
      for (const auto& [k, b] : u.pack_rows[r]) py[k] += b * dy;
    }
    for (const auto& [r, a] : u.cover_cols[v]) {
      if (!active[r]) continue;
      cval[r] += a * d;
      double updated = 0.0;
      if (cval[r] >= scale) {
        active[r] = 0;
        --remaining;
      } else {
        updated = z[r] * std::exp(shrink * a * d);
      }
      const double dz = updated - z[r];
      z[r] = updated;
      zsum += dz;
      for (const auto& [k, b] : u.cover_rows[r]) cz[k] += b * dz;
    }

    if (ysum > kBigWeight) {
      for (auto& w : y) w /= kBigWeight;
      refresh();
    } else if (remaining > 0 && zsum < 1.0 / kBigWeight) {
      for (auto& w : z) w *= kBigWeight;
      refresh();
    } else if (res.steps % kRefreshInterval == 0) {
      refresh();
    }
  }

  res.x /= scale;
  res.min_cover = form_ratio(form.covering, res.x, false);
  if (std::isfinite(res.min_cover) && res.min_cover > 1.0) res.x /= res.min_cover;
  res.min_cover = form_ratio(form.covering, res.x, false);
  res.overshoot = form_ratio(form.packing, res.x, true);
  res.status = MwuStatus::kFeasible;
  return res;
}

}  // namespace

double default_beta(int t, Index n) {
  const double logn = std::log2(static_cast<double>(std::max<Index>(n, 2)));
  return std::min(0.25, 1.0 / (std::max(t, 1) * logn));
}

PackingCoveringForm to_packing_covering(const LdmProgram& prog, double beta) {
  PackingCoveringForm form;
  form.beta = beta;
  form.num_program_vars = prog.num_vars();
  const Index nz = prog.num_z();
  form.complement.resize(nz);
  for (Index v = 0; v < nz; ++v) form.complement[v] = prog.num_vars() + v;
  form.num_vars = prog.num_vars() + nz;

  for (std::size_t r = 0; r < prog.rows.size(); ++r) {
    const auto& row = prog.rows[r];
    // Negative coefficients live on z variables only; a*z = a - a*zbar.
    PackingCoveringForm::FormRow out;
    out.rhs = row.rhs;
    out.source = static_cast<long>(r);
    for (const auto& t : row.terms) {
      if (t.coeff >= 0.0) {
        out.terms.push_back(t);
      } else {
        out.terms.push_back({form.complement[t.var], -t.coeff});
        out.rhs -= t.coeff;
      }
    }
    (row.sense == Sense::kLessEqual ? form.packing : form.covering).push_back(std::move(out));
  }
  for (Index v = 0; v < nz; ++v) {
    std::vector<Term> pair{{v, 1.0}, {form.complement[v], 1.0}};
    form.covering.push_back({pair, 1.0, -1});
    form.packing.push_back({pair, 1.0, -1});
  }
  for (Index j = 0; j < prog.n; ++j)
    form.packing.push_back({{{prog.c_index[j], 1.0}}, 1.0, -1});
  PackingCoveringForm::FormRow budget;
  for (Index j = 0; j < prog.n; ++j)
    budget.terms.push_back({prog.c_index[j], prog.objective(prog.c_index[j])});
  budget.rhs = 0.0;
  form.budget_row = form.packing.size();
  form.packing.push_back(std::move(budget));
  return form;
}

MwuResult solve_mwu(const PackingCoveringForm& form, const MwuOptions& opts) {
  if (!(form.beta > 0.0 && form.beta <= 0.5))
    fail(ErrorKind::kInput, "beta must lie in (0, 1/2]");
  const UnitRows u = normalize(form);
  if (u.trivially_infeasible) {
    MwuResult res;
    res.status = MwuStatus::kInfeasible;
    res.x = Eigen::VectorXd::Zero(form.num_vars);
    res.message = "a row cannot be met by nonnegative variables";
    return res;
  }
  double eps = opts.initial_epsilon;
  long used = 0;
  MwuResult res;
  for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
    res = run_mwu(form, u, eps, opts.max_steps - used);
    used += res.steps;
    res.steps = used;
    if (res.status != MwuStatus::kFeasible) return res;
    if (res.overshoot <= 1.0 + form.beta + 1e-12) return res;
    eps /= 2.0;
  }
  res.status = MwuStatus::kNoCertificate;
  res.message = "packing overshoot stayed above 1 + beta";
  return res;
}

Eigen::VectorXd FractionalSolution::program_vector() const {
  Eigen::VectorXd x(z.size() + c.size());
  x << z, c;
  return x;
}

FractionalSolution minimize_cost(const LdmProgram& prog, double beta,
                                 SolverStats* stats, const MwuOptions& opts) {
  PackingCoveringForm form = to_packing_covering(prog, beta);
  SolverStats local;
  SolverStats& st = stats ? *stats : local;
  st.beta = beta;

  std::optional<MwuResult> best;
  double best_budget = 0.0;
  auto probe = [&](double budget) {
    form.set_budget(budget);
    MwuResult r = solve_mwu(form, opts);
    st.steps += r.steps;
    ++st.solves;
    st.budget_trace.emplace_back(budget, status_name(r.status));
    if (r.status == MwuStatus::kFeasible) {
      best = std::move(r);
      best_budget = budget;
      return true;
    }
    return false;
  };

  // The objective is nonnegative, so a feasible zero-cost point is optimal.
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(prog.num_vars());
  candidate.head(prog.num_z()).setOnes();
  if (check_assignment(prog, candidate, 0.0).ok) {
    form.set_budget(0.0);
    MwuResult r;
    r.status = MwuStatus::kFeasible;
    r.x = Eigen::VectorXd::Zero(form.num_vars);
    r.x.head(prog.num_vars()) = candidate;
    r.overshoot = form_ratio(form.packing, r.x, true);
    r.min_cover = form_ratio(form.covering, r.x, false);
    st.budget_trace.emplace_back(0.0, "candidate");
    best = std::move(r);
  }

  double hi = 0.0;
  for (Index j = 0; j < prog.n; ++j) hi += prog.objective(prog.c_index[j]);
  double lo = 0.0;
  if (!best && !probe(0.0)) {
    if (!probe(hi)) fail(ErrorKind::kNumeric, "no certificate at the full budget");
    for (int k = 0; k < kMaxBisection && hi > (1.0 + beta) * lo && hi > 1e-12; ++k) {
      const double mid = 0.5 * (lo + hi);
      if (probe(mid)) hi = mid;
      else lo = mid;
    }
  }

  FractionalSolution sol;
  const Index nz = prog.num_z();
  sol.form_x = best->x;
  sol.z = best->x.head(nz).cwiseMax(0.0).cwiseMin(1.0);
  sol.c.resize(prog.n);
  for (Index j = 0; j < prog.n; ++j) sol.c(j) = best->x(prog.c_index[j]);
  sol.objective = 0.0;
  for (Index j = 0; j < prog.n; ++j)
    sol.objective += prog.objective(prog.c_index[j]) * sol.c(j);
  sol.overshoot = best->overshoot;
  sol.budget = best_budget;
  st.final_overshoot = best->overshoot;
  return sol;
}

simplex::Result solve_exact(const LdmProgram& prog, simplex::PivotRule rule) {
  if (prog.num_vars() > 200)
    fail(ErrorKind::kScaleExceeded, "oracle scale exceeded: exact LP limited to 200 variables");
  simplex::LinearProgram lp;
  lp.cost = prog.objective;
  lp.upper = Eigen::VectorXd::Constant(prog.num_vars(), std::numeric_limits<double>::infinity());
  for (Index v = 0; v < prog.num_z(); ++v) lp.upper(v) = 1.0;
  for (const auto& row : prog.rows) {
    // Skip rows that the bounds already imply.
    double lo = 0.0, up = 0.0;
    for (const auto& t : row.terms) {
      const double ub = lp.upper(t.var);
      if (t.coeff > 0) up += t.coeff * ub;
      else lo += t.coeff * ub;
    }
    if (row.sense == Sense::kLessEqual && up <= row.rhs) continue;
    if (row.sense == Sense::kGreaterEqual && lo >= row.rhs) {
      bool all_nonneg = true;
      for (const auto& t : row.terms) all_nonneg = all_nonneg && t.coeff >= 0;
      if (all_nonneg || row.terms.empty()) continue;
    }
    simplex::Constraint c;
    for (const auto& t : row.terms) c.terms.emplace_back(t.var, t.coeff);
    c.relation = row.sense == Sense::kLessEqual ? simplex::Relation::kLessEqual
                                                : simplex::Relation::kGreaterEqual;
    c.rhs = row.rhs;
    lp.constraints.push_back(std::move(c));
  }
  return simplex::solve(lp, rule);
}

const char* status_name(MwuStatus s) {
  switch (s) {
    case MwuStatus::kFeasible: return "feasible";
    case MwuStatus::kInfeasible: return "infeasible";
    case MwuStatus::kNoCertificate: return "no_certificate";
  }
  return "?";
}

}  // namespace adr
