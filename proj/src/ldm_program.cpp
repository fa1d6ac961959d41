#include "adr/ldm_program.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace adr {

namespace {

constexpr double kRadiusTol = 1e-12;

std::vector<Index> ball_vars(const LdmInstance& inst, const std::vector<Index>& z_level,
                             int level, Index center, double radius) {
  const auto& sample = *inst.sample;
  const double r = radius * NetHierarchy::scale(level) * (1.0 + kRadiusTol);
  std::vector<Index> out;
  for (Index k : inst.hierarchy.levels[level])
    if (sample(center, k) <= r) out.push_back(z_level[k]);
  return out;
}

/// Merges duplicate variables and drops zero coefficients.
std::vector<Term> combine(std::vector<Term> terms) {
  std::map<Index, double> acc;
  for (const auto& t : terms) acc[t.var] += t.coeff;
  std::vector<Term> out;
  for (const auto& [var, coeff] : acc)
    if (coeff != 0.0) out.push_back({var, coeff});
  return out;
}

void add_sum(std::vector<Term>& terms, const std::vector<Index>& vars, double coeff) {
  for (Index v : vars) terms.push_back({v, coeff});
}

double packing_rhs(double radius, double packing_dim) {
  return std::ceil(std::pow(2.0 * radius, packing_dim));
}

}  // namespace

double packing_dimension(double target_dim) {
  return std::log2(std::exp2(3.0 * target_dim) + 1.0);
}

LdmInstance LdmInstance::create(const MetricSample& prepared, double target_dim) {
  LdmInstance inst;
  inst.sample = &prepared;
  inst.hierarchy = build_hierarchy(prepared, 1.0);
  inst.target_dim = target_dim;
  inst.packing_dim = packing_dimension(target_dim);
  inst.delta = prepared.size() > 1 ? min_distance(prepared) : 1.0;
  return inst;
}

Neighborhoods build_neighborhoods(const LdmInstance& inst) {
  const auto& h = inst.hierarchy;
  const auto& sample = *inst.sample;
  const Index n = sample.size();
  // Variable numbering shared with build_program.
  std::vector<std::vector<Index>> z_index(h.num_levels(), std::vector<Index>(n, -1));
  Index next = 0;
  for (int i = 0; i <= h.t; ++i)
    for (Index p : h.levels[i]) z_index[i][p] = next++;

  Neighborhoods nb;
  const auto L = static_cast<std::size_t>(h.num_levels());
  nb.center.assign(L, std::vector<Index>(n, -1));
  nb.E.assign(L, std::vector<std::vector<Index>>(n));
  nb.F = nb.E;
  nb.G = nb.E;
  nb.H = nb.E;
  for (int i = 0; i <= h.t; ++i) {
    for (Index j = 0; j < n; ++j) {
      const Index c = h.contains(i, j) ? j : nearest_in_level(h, sample, j, i);
      nb.center[i][j] = c;
      nb.E[i][j] = ball_vars(inst, z_index[i], i, c, NeighborhoodRadii::e);
      nb.F[i][j] = ball_vars(inst, z_index[i], i, c, NeighborhoodRadii::f);
      nb.G[i][j] = ball_vars(inst, z_index[i], i, c, NeighborhoodRadii::g);
      nb.H[i][j] = ball_vars(inst, z_index[i], i, c, NeighborhoodRadii::h);
    }
  }
  return nb;
}

LdmProgram build_program(const LdmInstance& inst) {
  if (!(inst.target_dim >= 1.0)) fail(ErrorKind::kInput, "target dimension D must be >= 1");
  const auto& h = inst.hierarchy;
  const auto& sample = *inst.sample;
  const Index n = sample.size();
  const int t = h.t;

  LdmProgram prog;
  prog.t = t;
  prog.n = n;
  prog.delta = inst.delta;
  prog.z_index.assign(h.num_levels(), std::vector<Index>(n, -1));
  for (int i = 0; i <= t; ++i)
    for (Index p : h.levels[i]) {
      prog.z_index[i][p] = static_cast<Index>(prog.z_vars.size());
      prog.z_vars.emplace_back(i, p);
    }
  const Index nz = prog.num_z();
  for (Index j = 0; j < n; ++j) prog.c_index.push_back(nz + j);
  prog.objective = Eigen::VectorXd::Zero(nz + n);
  for (Index j = 0; j < n; ++j) prog.objective(nz + j) = sample.multiplicity[j];
  prog.neighborhoods = build_neighborhoods(inst);
  const auto& nb = prog.neighborhoods;

  if (n > 1 && inst.target_dim > std::log2(static_cast<double>(n)))
    prog.warnings.push_back("D exceeds log2(n): every subset already qualifies");

  auto emit = [&](RowFamily fam, int i, Index j, int k, std::vector<Term> terms,
                  Sense sense, double rhs) {
    prog.rows.push_back({fam, i, j, k, combine(std::move(terms)), sense, rhs});
  };

  // (2) nesting: z^i_j - z^{i+1}_j <= 0
  for (int i = 0; i < t; ++i)
    for (Index j : h.levels[i])
      emit(RowFamily::kNesting, i, j, -1,
           {{prog.z(i, j), 1.0}, {prog.z(i + 1, j), -1.0}}, Sense::kLessEqual, 0.0);

  // (3) covering: sum_{E^i_j} z - z^t_j >= 0
  for (int i = 0; i <= t; ++i)
    for (Index j = 0; j < n; ++j) {
      std::vector<Term> terms{{prog.z(t, j), -1.0}};
      add_sum(terms, nb.E[i][j], 1.0);
      emit(RowFamily::kCover, i, j, -1, std::move(terms), Sense::kGreaterEqual, 0.0);
    }

  // (4)-(6) packing
  const std::pair<RowFamily, double> packs[] = {
      {RowFamily::kPackF, NeighborhoodRadii::f},
      {RowFamily::kPackG, NeighborhoodRadii::g},
      {RowFamily::kPackH, NeighborhoodRadii::h}};
  for (const auto& [fam, radius] : packs) {
    const double rhs = packing_rhs(radius, inst.packing_dim);
    const auto& sets = fam == RowFamily::kPackF   ? nb.F
                       : fam == RowFamily::kPackG ? nb.G
                                                  : nb.H;
    for (int i = 0; i <= t; ++i)
      for (Index j = 0; j < n; ++j) {
        std::vector<Term> terms;
        add_sum(terms, sets[i][j], 1.0);
        emit(fam, i, j, -1, std::move(terms), Sense::kLessEqual, rhs);
      }
  }

  // (7) z^t_j + c_j / delta >= 1
  for (Index j = 0; j < n; ++j)
    emit(RowFamily::kCostFloor, t, j, -1,
         {{prog.z(t, j), 1.0}, {prog.c_index[j], 1.0 / inst.delta}},
         Sense::kGreaterEqual, 1.0);

  // (8) z^t_j + c_j / 2^-i + sum_{F^i_j} z >= 1
  for (int i = 0; i <= t; ++i)
    for (Index j = 0; j < n; ++j) {
      std::vector<Term> terms{{prog.z(t, j), 1.0},
                              {prog.c_index[j], 1.0 / NetHierarchy::scale(i)}};
      add_sum(terms, nb.F[i][j], 1.0);
      emit(RowFamily::kCostLevel, i, j, -1, std::move(terms), Sense::kGreaterEqual, 1.0);
    }

  // (9) sum_{F^i_j} z - (2f)^{-D'} sum_{F^k_j} z >= 0, i < k
  const double alpha = std::pow(2.0 * NeighborhoodRadii::f, -inst.packing_dim);
  for (int i = 0; i <= t; ++i)
    for (Index j = 0; j < n; ++j)
      for (int k = i + 1; k <= t; ++k) {
        std::vector<Term> terms;
        add_sum(terms, nb.F[i][j], 1.0);
        add_sum(terms, nb.F[k][j], -alpha);
        emit(RowFamily::kMonotone, i, j, k, std::move(terms), Sense::kGreaterEqual, 0.0);
      }
  return prog;
}

RowCensus expected_census(const NetHierarchy& h, Index n) {
  RowCensus c;
  const Index levels = h.num_levels();
  for (int i = 0; i < h.t; ++i) c.nesting += static_cast<Index>(h.levels[i].size());
  c.cover = levels * n;
  c.pack = levels * n;
  c.cost_floor = n;
  c.cost_level = levels * n;
  c.monotone = n * levels * (levels - 1) / 2;
  return c;
}

double row_activity(const Row& row, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& term : row.terms) s += term.coeff * x(term.var);
  return s;
}

AssignmentCheck check_assignment(const LdmProgram& prog, const Eigen::VectorXd& x,
                                 double tol) {
  AssignmentCheck out;
  for (Index v = 0; v < prog.num_vars(); ++v) {
    const bool bad = x(v) < -tol || (prog.is_z(v) && x(v) > 1.0 + tol);
    if (bad) {
      out.ok = false;
      out.violation = x(v) < 0 ? -x(v) : x(v) - 1.0;
      out.message = "variable " + std::to_string(v) + " out of bounds";
      return out;
    }
  }
  for (std::size_t r = 0; r < prog.rows.size(); ++r) {
    const auto& row = prog.rows[r];
    const double a = row_activity(row, x);
    const double gap = row.sense == Sense::kLessEqual ? a - row.rhs : row.rhs - a;
    if (gap > tol) {
      out.ok = false;
      out.row = r;
      out.violation = gap;
      out.message = std::string(family_name(row.family)) + " row i=" +
                    std::to_string(row.level) + " j=" + std::to_string(row.point) +
                    " violated by " + std::to_string(gap);
      return out;
    }
  }
  return out;
}

void fill_min_costs(const LdmProgram& prog, Eigen::VectorXd& x) {
  const auto& nb = prog.neighborhoods;
  for (Index j = 0; j < prog.n; ++j) {
    const double top = x(prog.z(prog.t, j));
    double c = std::max(0.0, prog.delta * (1.0 - top));
    for (int i = 0; i <= prog.t; ++i) {
      double f = 0.0;
      for (Index v : nb.F[i][j]) f += x(v);
      c = std::max(c, NetHierarchy::scale(i) * (1.0 - top - f));
    }
    x(prog.c_index[j]) = c;
  }
}

Eigen::VectorXd witness_assignment(const LdmInstance& inst, const LdmProgram& prog,
                                   std::span<const Index> subset) {
  const auto& h = inst.hierarchy;
  const auto& sample = *inst.sample;
  const int t = h.t;
  std::vector<Index> members(subset.begin(), subset.end());
  std::sort(members.begin(), members.end());

  // A greedy 1-covering hierarchy of the subset on the same scales.
  std::vector<std::vector<Index>> own(t + 1);
  if (!members.empty()) {
    own[0] = {members.front()};
    for (int i = 1; i <= t; ++i) {
      own[i] = own[i - 1];
      for (Index p : members) {
        if (std::find(own[i].begin(), own[i].end(), p) != own[i].end()) continue;
        bool far = true;
        for (Index q : own[i])
          if (sample(p, q) < NetHierarchy::scale(i)) far = false;
        if (far || i == t) own[i].push_back(p);
      }
    }
  }

  std::vector<std::vector<char>> extended(t + 1, std::vector<char>(sample.size(), 0));
  extended[0][h.levels[0].front()] = 1;
  for (int i = 1; i <= t; ++i) {
    extended[i] = extended[i - 1];
    for (Index v : own[i]) {
      bool near = false;
      for (Index w = 0; w < sample.size() && !near; ++w)
        near = extended[i][w] && sample(v, w) <= 2.0 * NetHierarchy::scale(i);
      if (!near) extended[i][nearest_in_level(h, sample, v, i)] = 1;
    }
  }
  for (Index v : members) extended[t][v] = 1;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.num_vars());
  for (Index var = 0; var < prog.num_z(); ++var) {
    const auto [level, point] = prog.z_vars[var];
    x(var) = extended[level][point] ? 1.0 : 0.0;
  }
  fill_min_costs(prog, x);
  return x;
}

const char* family_name(RowFamily family) {
  switch (family) {
    case RowFamily::kNesting: return "nesting";
    case RowFamily::kCover: return "cover";
    case RowFamily::kPackF: return "pack_f";
    case RowFamily::kPackG: return "pack_g";
    case RowFamily::kPackH: return "pack_h";
    case RowFamily::kCostFloor: return "cost_floor";
    case RowFamily::kCostLevel: return "cost_level";
    case RowFamily::kMonotone: return "monotone";
  }
  return "?";
}

std::string dump_program(const LdmProgram& prog, const MetricSample& sample) {
  std::ostringstream out;
  out.precision(17);
  auto name = [&](Index var) {
    if (prog.is_z(var)) {
      const auto [level, point] = prog.z_vars[var];
      return "z" + std::to_string(level) + "_" + sample.ids[point];
    }
    return "c_" + sample.ids[var - prog.num_z()];
  };
  out << "minimize";
  for (Index j = 0; j < prog.n; ++j)
    out << (j ? " + " : " ") << prog.objective(prog.c_index[j]) << " " << name(prog.c_index[j]);
  out << "\n";
  for (std::size_t r = 0; r < prog.rows.size(); ++r) {
    const auto& row = prog.rows[r];
    out << "r" << r << " " << family_name(row.family) << "["
        << static_cast<int>(row.family) << "] i=" << row.level << " j="
        << sample.ids[row.point];
    if (row.other_level >= 0) out << " k=" << row.other_level;
    out << ":";
    if (row.terms.empty()) out << " 0";
    for (std::size_t k = 0; k < row.terms.size(); ++k)
      out << (k ? " + " : " ") << row.terms[k].coeff << " " << name(row.terms[k].var);
    out << (row.sense == Sense::kLessEqual ? " <= " : " >= ") << row.rhs << "\n";
  }
  out << "bounds 0 <= z <= 1, c >= 0\n";
  return out.str();
}

}  // namespace adr
