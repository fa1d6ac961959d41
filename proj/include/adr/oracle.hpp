#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adr/ldm_program.hpp"
#include "adr/metric.hpp"

namespace adr::oracle {

/// Stateless generator: the same (seed, a, b) always hashes to the same
/// 64-bit value.
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Rademacher sign of draw `draw` at position `index`.
inline int sigma(std::uint64_t seed, std::uint64_t draw, std::uint64_t index) {
  return (counter_hash(seed, draw, index) & 1u) ? 1 : -1;
}

/// log2 of the exact doubling constant over all centers and pairwise-distance
/// radii, with covering centers restricted to the sample. n <= 12.
double exact_ddim(const MetricSample& sample);
double exact_ddim(const MetricSample& sample, std::span<const Index> points);

/// True iff the exact doubling constant of the subset is <= 2^D. Exits at the
/// first ball needing more.
bool ddim_at_most(const MetricSample& sample, std::span<const Index> points, double D);

struct LdmOptimum {
  std::vector<Index> T;
  double cost = 0.0;  // sum_j m_j d(v_j, T), sample units
};

/// Cheapest nonempty T with exact ddim <= D; ties go to the lexicographically
/// smallest index list. n <= 10.
LdmOptimum brute_force_ldm(const MetricSample& sample, double D);

/// Exact optimum of the relaxed program.
double reference_lp(const LdmProgram& prog);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long draws = 0;
};

/// Mean over draws of ||sum_i sigma_i X_i||_2 / n.
Estimate mc_rademacher_linear(const Eigen::MatrixXd& X, long draws, std::uint64_t seed = 0);

/// sup of sum_i sigma_i f_i over |f_i - f_j| <= L d_ij, |f_i| <= 1, scaled by
/// 1/n. Solved via the dual transshipment program.
double lipschitz_sup(const MetricSample& sample, const std::vector<int>& sigma, double L);
/// The same supremum from the primal program, for cross-checks.
double lipschitz_sup_primal(const MetricSample& sample, const std::vector<int>& sigma,
                            double L);

/// Mean over draws of lipschitz_sup. n <= 24.
Estimate mc_rademacher_lipschitz(const MetricSample& sample, double L, long draws,
                                 std::uint64_t seed = 0);

}  // namespace adr::oracle
