#include "adr/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "adr/error.hpp"
#include "adr/lp_solver.hpp"
#include "adr/simplex.hpp"

namespace adr::oracle {

namespace {

constexpr double kRel = 1e-12;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_scale(Index n, Index cap) {
  if (n > cap)
    fail(ErrorKind::kScaleExceeded,
         "oracle scale exceeded: " + std::to_string(n) + " > " + std::to_string(cap) + " points");
}

/// Balls of the subset as bitmasks over subset positions.
class BallTable {
 public:
  BallTable(const MetricSample& s, std::span<const Index> pts) : s_(s), pts_(pts) {}

  std::uint32_t ball(std::size_t center, double r) const {
    std::uint32_t m = 0;
    for (std::size_t q = 0; q < pts_.size(); ++q)
      if (s_(pts_[center], pts_[q]) <= r * (1.0 + kRel)) m |= 1u << q;
    return m;
  }

  std::vector<double> radii() const {
    std::vector<double> r;
    for (std::size_t a = 0; a < pts_.size(); ++a)
      for (std::size_t b = a + 1; b < pts_.size(); ++b) r.push_back(s_(pts_[a], pts_[b]));
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
  }

  std::size_t size() const { return pts_.size(); }

 private:
  const MetricSample& s_;
  std::span<const Index> pts_;
};

bool union_covers(const std::vector<std::uint32_t>& halves, std::uint32_t target,
                  std::size_t count, std::size_t start, std::uint32_t acc) {
  if ((acc & target) == target) return true;
  if (count == 0) return false;
  for (std::size_t y = start; y < halves.size(); ++y)
    if (union_covers(halves, target, count - 1, y + 1, acc | halves[y])) return true;
  return false;
}

/// Smallest number of half-radius balls covering `target`, or limit + 1 when
/// more than `limit` are needed.
std::size_t min_cover(const std::vector<std::uint32_t>& halves, std::uint32_t target,
                      std::size_t limit) {
  for (std::size_t k = 1; k <= limit; ++k)
    if (union_covers(halves, target, k, 0, 0)) return k;
  return limit + 1;
}

/// Largest minimum cover count, stopping early once it exceeds `limit`.
std::size_t doubling_constant(const MetricSample& s, std::span<const Index> pts,
                              std::size_t limit) {
  const BallTable table(s, pts);
  const std::size_t m = table.size();
  if (m <= 1) return 1;
  std::size_t lambda = 1;
  for (double r : table.radii()) {
    std::vector<std::uint32_t> halves(m);
    for (std::size_t y = 0; y < m; ++y) halves[y] = table.ball(y, r / 2.0);
    for (std::size_t x = 0; x < m; ++x) {
      const std::uint32_t b = table.ball(x, r);
      if (static_cast<std::size_t>(std::popcount(b)) <= lambda) continue;
      lambda = std::max(lambda, min_cover(halves, b, std::min(limit, m)));
      if (lambda > limit) return lambda;
    }
  }
  return lambda;
}

std::vector<Index> all_points(const MetricSample& s) {
  std::vector<Index> p(static_cast<std::size_t>(s.size()));
  std::iota(p.begin(), p.end(), Index{0});
  return p;
}

}  // namespace

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

double exact_ddim(const MetricSample& sample, std::span<const Index> points) {
  require_scale(static_cast<Index>(points.size()), 12);
  const std::size_t lambda = doubling_constant(sample, points, points.size());
  return std::log2(static_cast<double>(lambda));
}

double exact_ddim(const MetricSample& sample) {
  const auto p = all_points(sample);
  return exact_ddim(sample, p);
}

bool ddim_at_most(const MetricSample& sample, std::span<const Index> points, double D) {
  require_scale(static_cast<Index>(points.size()), 12);
  const auto limit = static_cast<std::size_t>(std::floor(std::exp2(D) * (1.0 + kRel)));
  return doubling_constant(sample, points, limit) <= limit;
}

LdmOptimum brute_force_ldm(const MetricSample& sample, double D) {
  const Index n = sample.size();
  require_scale(n, 10);
  struct Candidate {
    double cost;
    std::vector<Index> T;
  };
  std::vector<Candidate> all;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    Candidate c;
    for (Index p = 0; p < n; ++p)
      if (mask & (1u << p)) c.T.push_back(p);
    c.cost = mapping_cost(sample, c.T);
    all.push_back(std::move(c));
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.T < b.T;
  });
  std::optional<LdmOptimum> best;
  for (const auto& c : all) {
    if (best && c.cost > best->cost * (1.0 + kRel) + 1e-15) break;
    if (best && !(c.T < best->T)) continue;
    if (ddim_at_most(sample, c.T, D)) {
      const double cost = best ? best->cost : c.cost;
      best = LdmOptimum{c.T, cost};
    }
  }
  best->cost = mapping_cost(sample, best->T);
  return *best;
}

double reference_lp(const LdmProgram& prog) {
  const simplex::Result r = solve_exact(prog, simplex::PivotRule::kBland);
  if (r.status != simplex::Status::kOptimal)
    fail(ErrorKind::kNumeric, "reference LP did not reach an optimum");
  return r.objective;
}

Estimate mc_rademacher_linear(const Eigen::MatrixXd& X, long draws, std::uint64_t seed) {
  const Index n = X.rows();
  Estimate e;
  e.draws = draws;
  double sum = 0.0, sq = 0.0;
  for (long d = 0; d < draws; ++d) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(X.cols());
    for (Index i = 0; i < n; ++i) v += sigma(seed, d, i) * X.row(i).transpose();
    const double val = v.norm() / static_cast<double>(n);
    sum += val;
    sq += val * val;
  }
  e.mean = sum / draws;
  e.std_error = draws > 1 ? std::sqrt(std::max(0.0, (sq - sum * e.mean) / (draws - 1)) / draws) : 0.0;
  return e;
}

double lipschitz_sup(const MetricSample& sample, const std::vector<int>& sig, double L) {
  const Index n = sample.size();
  // Dual: min sum L d_ij y_ij + sum u_k + sum l_k subject to
  // sum_j y_kj - sum_j y_jk + u_k - l_k = sigma_k, all variables >= 0.
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && L * sample(i, j) < 2.0) pairs.emplace_back(i, j);
  const Index np = static_cast<Index>(pairs.size());
  simplex::LinearProgram lp;
  lp.cost.resize(np + 2 * n);
  for (Index e = 0; e < np; ++e) lp.cost(e) = L * sample(pairs[e].first, pairs[e].second);
  lp.cost.tail(2 * n).setOnes();
  lp.constraints.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    auto& c = lp.constraints[k];
    c.relation = simplex::Relation::kEqual;
    c.rhs = sig[k];
    c.terms.emplace_back(np + k, 1.0);
    c.terms.emplace_back(np + n + k, -1.0);
  }
  for (Index e = 0; e < np; ++e) {
    lp.constraints[pairs[e].first].terms.emplace_back(e, 1.0);
    lp.constraints[pairs[e].second].terms.emplace_back(e, -1.0);
  }
  const simplex::Result r = simplex::solve(lp, simplex::PivotRule::kDantzig);
  if (r.status != simplex::Status::kOptimal)
    fail(ErrorKind::kNumeric, "Lipschitz dual did not reach an optimum");
  return r.objective / static_cast<double>(n);
}

double lipschitz_sup_primal(const MetricSample& sample, const std::vector<int>& sig, double L) {
  const Index n = sample.size();
  // g = f + 1 in [0, 2]; maximize sigma.g.
  simplex::LinearProgram lp;
  lp.cost.resize(n);
  double offset = 0.0;
  for (Index i = 0; i < n; ++i) {
    lp.cost(i) = -sig[i];
    offset += sig[i];
  }
  lp.upper = Eigen::VectorXd::Constant(n, 2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && L * sample(i, j) < 2.0)
        lp.constraints.push_back({{{i, 1.0}, {j, -1.0}}, simplex::Relation::kLessEqual,
                                  L * sample(i, j)});
  const simplex::Result r = simplex::solve(lp, simplex::PivotRule::kBland);
  if (r.status != simplex::Status::kOptimal)
    fail(ErrorKind::kNumeric, "Lipschitz primal did not reach an optimum");
  return (-r.objective - offset) / static_cast<double>(n);
}

Estimate mc_rademacher_lipschitz(const MetricSample& sample, double L, long draws,
                                 std::uint64_t seed) {
  const Index n = sample.size();
  require_scale(n, 24);
  Estimate e;
  e.draws = draws;
  double sum = 0.0, sq = 0.0;
  std::vector<int> sig(static_cast<std::size_t>(n));
  for (long d = 0; d < draws; ++d) {
    for (Index i = 0; i < n; ++i) sig[i] = sigma(seed, d, i);
    const double val = lipschitz_sup(sample, sig, L);
    sum += val;
    sq += val * val;
  }
  e.mean = sum / draws;
  e.std_error = draws > 1 ? std::sqrt(std::max(0.0, (sq - sum * e.mean) / (draws - 1)) / draws) : 0.0;
  return e;
}

}  // namespace adr::oracle
