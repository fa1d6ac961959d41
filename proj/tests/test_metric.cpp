#include <doctest.h>

#include <cmath>
#include <sstream>

#include "adr/csv_io.hpp"
#include "adr/metric.hpp"
#include "support.hpp"

using namespace adr;

namespace {

MetricSample three_point(double ab, double bc, double ac) {
  Eigen::MatrixXd d(3, 3);
  d << 0, ab, ac,
       ab, 0, bc,
       ac, bc, 0;
  return from_distances({"a", "b", "c"}, d);
}

// Largest subset of B(x, r) whose pairwise distances all exceed r / 2,
// by exhaustive search over subsets.
Index max_packing_in_ball(const MetricSample& s, Index x, double r) {
  std::vector<Index> ball;
  for (Index y = 0; y < s.size(); ++y)
    if (s(x, y) <= r) ball.push_back(y);
  const std::size_t m = ball.size();
  Index best = 1;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    const int bits = __builtin_popcount(mask);
    if (bits <= best) continue;
    bool ok = true;
    for (std::size_t a = 0; a < m && ok; ++a)
      for (std::size_t b = a + 1; b < m && ok; ++b)
        if ((mask >> a & 1u) && (mask >> b & 1u) && s(ball[a], ball[b]) <= r / 2.0) ok = false;
    if (ok) best = bits;
  }
  return best;
}

// Smallest number of closed eps-balls centered at sample points covering it.
Index min_cover_size(const MetricSample& s, double eps) {
  const Index n = s.size();
  for (Index k = 1; k <= n; ++k) {
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      if (__builtin_popcount(mask) != k) continue;
      bool covered = true;
      for (Index p = 0; p < n && covered; ++p) {
        bool hit = false;
        for (Index c = 0; c < n; ++c)
          if ((mask >> c & 1u) && s(p, c) <= eps) hit = true;
        covered = hit;
      }
      if (covered) return k;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("validate_metric accepts the equilateral triangle") {
  const auto rep = validate_metric(three_point(1, 1, 1));
  CHECK(rep.ok);
  CHECK_FALSE(rep.violation.has_value());
}

TEST_CASE("validate_metric reports the violating triple (a, c, b)") {
  const auto rep = validate_metric(three_point(1, 1, 3));
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.violation.has_value());
  CHECK((*rep.violation)[0] == 0);
  CHECK((*rep.violation)[1] == 2);
  CHECK((*rep.violation)[2] == 1);
}

TEST_CASE("validate_metric agrees with a direct check on random Euclidean points") {
  const auto s = test::random_euclidean(20, 2, 7);
  bool direct = true;
  for (Index x = 0; x < 20; ++x)
    for (Index y = 0; y < 20; ++y)
      for (Index z = 0; z < 20; ++z)
        if (s(x, y) > s(x, z) + s(z, y) + 1e-12) direct = false;
  CHECK(direct);
  CHECK(validate_metric(s).ok);
}

TEST_CASE("malformed inputs are rejected") {
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_WITH(from_distances({"a", "b"}, rect), "malformed distances");
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  CHECK_THROWS_WITH(from_distances({"a", "b"}, asym), "malformed distances");
  CHECK_THROWS_WITH(from_distances({}, Eigen::MatrixXd()), "empty sample");
  std::istringstream empty("id,x1\n");
  CHECK_THROWS_WITH(io::read_points_csv(empty), "empty sample");
}

TEST_CASE("estimate_ddim examples") {
  SUBCASE("single point") { CHECK(estimate_ddim(test::segment(1)).value == 0.0); }
  SUBCASE("16-point segment is at most 2 and below the exhaustive packing") {
    const auto s = test::segment(16);
    const auto est = estimate_ddim(s);
    CHECK(est.value <= 2.0);
    Index best = 1;
    for (Index x = 0; x < s.size(); ++x)
      for (Index y = 0; y < s.size(); ++y) {
        if (x == y) continue;
        best = std::max(best, max_packing_in_ball(s, x, s(x, y)));
        best = std::max(best, max_packing_in_ball(s, x, 2.0 * s(x, y)));
      }
    CHECK(est.packing_size <= best);
  }
  SUBCASE("unit square corners give 2") {
    Eigen::MatrixXd X(4, 2);
    X << 0, 0, 1, 0, 0, 1, 1, 1;
    const auto s = from_points(test::make_ids(4), X);
    CHECK(estimate_ddim(s).value == doctest::Approx(2.0));
    CHECK(max_packing_in_ball(s, 0, std::sqrt(2.0)) == 4);
  }
}

TEST_CASE("covering_number_bound examples") {
  CHECK(covering_number_bound(3.0, 1.0, 2.0) == 1.0);
  CHECK(covering_number_bound(1.0, 1.0, 0.5) == doctest::Approx(4.0));
  CHECK(covering_number_bound(2.0, 2.0, 1.0) == doctest::Approx(16.0));
  CHECK_THROWS(covering_number_bound(1.0, 1.0, 0.0));
  CHECK_THROWS(covering_number_bound(1.0, 1.0, -1.0));
}

TEST_CASE("greedy_cover examples") {
  const auto seg = test::segment(8);
  CHECK(greedy_cover(seg, 1.0).size() == 1);
  CHECK(greedy_cover(seg, 0.5 / 7.0).size() == 8);

  Eigen::MatrixXd X(6, 1);
  X << 0.0, 0.02, 0.05, 1.0, 1.03, 1.05;
  const auto two = from_points(test::make_ids(6), X);
  const auto cover = greedy_cover(two, 0.1);
  CHECK(cover.size() == 2);
  CHECK(min_cover_size(two, 0.1) == 2);
  for (Index p = 0; p < 6; ++p) CHECK(distance_to_set(two, p, cover) <= 0.1);
}

TEST_CASE("collapse_duplicates carries multiplicity") {
  Eigen::MatrixXd X(4, 1);
  X << 0.0, 1.0, 0.0, 2.0;
  const auto c = collapse_duplicates(from_points(test::make_ids(4), X));
  CHECK(c.sample.size() == 3);
  CHECK(c.sample.multiplicity[0] == 2.0);
  CHECK(c.representative[2] == 0);
  CHECK(c.sample.total_multiplicity() == 4.0);
}

TEST_CASE("prepare normalizes the diameter and keeps the scale") {
  const auto s = test::line_points({0.0, 3.0, 4.0});
  const auto p = prepare(s);
  CHECK(diameter(p.sample) == doctest::Approx(1.0));
  CHECK(p.sample.scale_factor == doctest::Approx(4.0));
  CHECK(min_distance(p.sample) == doctest::Approx(0.25));
  CHECK(denormalized(p.sample)(0, 1) == doctest::Approx(3.0));
}

TEST_CASE("mapping_cost sums multiplicity-weighted distances") {
  auto s = test::line_points({0.0, 0.5, 1.0});
  s.multiplicity = {1.0, 2.0, 1.0};
  const std::vector<Index> T{0};
  CHECK(mapping_cost(s, T) == doctest::Approx(2.0 * 0.5 + 1.0));
  CHECK(std::isinf(distance_to_set(s, 0, std::vector<Index>{})));
}

TEST_CASE("subset keeps the listed order") {
  const auto s = test::segment(5);
  const std::vector<Index> pts{4, 1};
  const auto sub = subset(s, pts);
  CHECK(sub.ids[0] == "p4");
  CHECK(sub(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("distance CSV with separate labels") {
  std::istringstream d("id,a,b\na,0,1\nb,1,0\n");
  std::istringstream l("id,label\nb,-1\na,1\n");
  const auto s = io::read_distance_csv(d, &l);
  CHECK(s.size() == 2);
  CHECK(s.labels == std::vector<int>{1, -1});
  std::istringstream bad("id,a,b\na,0,1\nb,2,0\n");
  CHECK_THROWS_WITH(io::read_distance_csv(bad), "malformed distances");
}

TEST_CASE("large samples use seeded random triples") {
  const auto s = test::random_euclidean(210, 2, 3);
  CHECK(validate_metric(s, 1).ok);
  CHECK(validate_metric(s, 2).ok);
}
