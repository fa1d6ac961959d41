#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <random>
#include <set>

#include "adr/csv_io.hpp"
#include "adr/json_io.hpp"
#include "cli_support.hpp"
#include "schema_check.hpp"
#include "support.hpp"

using namespace adr;
using adr::test::run_cli;
using nlohmann::json;

namespace {

const test::SchemaChecker& schemas() {
  static const test::SchemaChecker checker(ADR_SCHEMA_DIR);
  return checker;
}

void check_schema(const json& j, const std::string& file) {
  const auto errors = schemas().check(j, file);
  for (const auto& e : errors) FAIL_CHECK(file << ": " << e);
}

std::string cluster_csv(Index n, std::uint64_t seed, Index pad = 0) {
  std::mt19937_64 rng(seed);
  const auto c = test::two_clusters(n, 0.05, 0.0, rng);
  std::ostringstream s;
  s.precision(17);
  s << "id";
  for (Index k = 0; k < 2 + pad; ++k) s << ",x" << k + 1;
  s << ",label\n";
  for (Index i = 0; i < n; ++i) {
    s << "q" << i << ',' << c.X(i, 0) * 0.5 << ',' << c.X(i, 1) * 0.5;
    for (Index k = 0; k < pad; ++k) s << ",0";
    s << ',' << c.labels[i] << '\n';
  }
  return s.str();
}

}  // namespace

TEST_CASE("validate") {
  test::ScratchDir dir("cli_validate");
  SUBCASE("triangle violation exits 2 with the triple") {
    const auto f = dir.write("tri.csv", "id,a,b,c\na,0,1,3\nb,1,0,1\nc,3,1,0\n");
    const auto r = run_cli({"validate", "--input", f});
    CHECK(r.code == 2);
    CHECK(r.err.find("(triple a, c, b)") != std::string::npos);
    const auto j = json::parse(r.out);
    CHECK(j["ok"] == false);
    CHECK(j["violation"] == json({"a", "c", "b"}));
    check_schema(j, "validate.schema.json");
  }
  SUBCASE("equilateral passes, oracle adds the exact value") {
    const auto f = dir.write("eq.csv", "id,a,b,c\na,0,1,1\nb,1,0,1\nc,1,1,0\n");
    const auto r = run_cli({"validate", "--input", f, "--oracle"});
    CHECK(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["ok"] == true);
    CHECK(j["exact_ddim"].get<double>() == doctest::Approx(std::log2(3.0)));
    check_schema(j, "validate.schema.json");
  }
  SUBCASE("input errors") {
    CHECK(run_cli({"validate", "--input", dir.file("missing.csv")}).code == 2);
    const auto bad = dir.write("bad.csv", "id,a,b\na,0,1\nb,2,0\n");
    const auto r = run_cli({"validate", "--input", bad});
    CHECK(r.code == 2);
    CHECK(r.err.find("malformed distances") != std::string::npos);
    CHECK(run_cli({"validate"}).code == 2);
    CHECK(run_cli({"nonsense"}).code == 2);
  }
}

TEST_CASE("commands that need a metric reject a triangle violation") {
  test::ScratchDir dir("cli_nonmetric");
  const auto f = dir.write("tri.csv", "id,a,b,c\na,0,1,3\nb,1,0,1\nc,3,1,0\n");
  for (const char* cmd : {"hierarchy", "reduce", "train"}) {
    CAPTURE(cmd);
    const auto r = run_cli({cmd, "--input", f});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK(r.err.find("(triple a, c, b)") != std::string::npos);
  }
}

TEST_CASE("hierarchy") {
  test::ScratchDir dir("cli_hierarchy");
  const auto f = dir.write("seg8.csv", test::segment_csv(8));
  const auto r = run_cli({"hierarchy", "--input", f});
  REQUIRE(r.code == 0);
  const auto j = io::ordered_json::parse(r.out);
  check_schema(j, "hierarchy.schema.json");
  CHECK(j["t"] == 3);
  CHECK(j["levels"][1] == json({"p0", "p4"}));
  const auto prep = prepare(io::read_sample(f));
  const auto h = io::hierarchy_from_json(j, prep.sample);
  CHECK(validate_hierarchy(h, prep.sample).ok);
  CHECK(io::dump(io::hierarchy_json(h, prep.sample)) == r.out);
}

TEST_CASE("reduce") {
  test::ScratchDir dir("cli_reduce");
  const auto f = dir.write("seg8.csv", test::segment_csv(8));
  const std::set<std::string> ids{"p0", "p1", "p2", "p3", "p4", "p5", "p6", "p7"};

  const auto r1 = run_cli({"reduce", "--input", f, "--D", "1", "--stats", "--oracle"});
  REQUIRE(r1.code == 0);
  const auto j1 = json::parse(r1.out);
  check_schema(j1, "reduce.schema.json");
  CHECK(j1["mapping_cost"].get<double>() >= 0.0);
  for (const auto& id : j1["T"]) CHECK(ids.count(id.get<std::string>()) == 1);
  CHECK(j1["oracle"]["T"] == json({"p1", "p2", "p5", "p6"}));
  CHECK(j1["oracle"]["cost"].get<double>() == doctest::Approx(4.0 / 7.0));
  CHECK(j1["oracle"]["lp_optimum"].get<double>() == doctest::Approx(0.0));

  const auto r3 = run_cli({"reduce", "--input", f, "--D", "3"});
  REQUIRE(r3.code == 0);
  const auto j3 = json::parse(r3.out);
  CHECK(j3["mapping_cost"].get<double>() <= j1["mapping_cost"].get<double>());

  const auto sweep = run_cli({"reduce", "--input", f, "--sweep"});
  REQUIRE(sweep.code == 0);
  const auto js = json::parse(sweep.out);
  check_schema(js, "reduce_sweep.schema.json");
  CHECK(js["runs"].size() == 3);

  CHECK(run_cli({"reduce", "--input", f, "--beta", "0.7"}).code == 2);
  CHECK(run_cli({"reduce", "--input", f, "--D", "0.5"}).code == 2);
  const auto big = dir.write("seg11.csv", test::segment_csv(11));
  CHECK(run_cli({"reduce", "--input", big, "--oracle"}).code == 4);
}

TEST_CASE("reduce counts duplicate rows") {
  test::ScratchDir dir("cli_dup");
  const auto f = dir.write("dup.csv", "id,x1\na,0\nb,0\nc,0.5\nd,1\n");
  const auto r = run_cli({"reduce", "--input", f, "--D", "1", "--oracle"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  // Collapsed sample {0 (x2), 0.5, 1} has ddim log2 3; the optimum drops
  // one endpoint. Dropping 1 costs 0.5, dropping 0 would cost 2 * 0.5.
  CHECK(j["oracle"]["T"] == json({"a", "c"}));
  CHECK(j["oracle"]["cost"].get<double>() == doctest::Approx(0.5));
  CHECK(j["mapping_cost"].get<double>() == 0.0);
  // The T = {c} hand sum counts both copies of the origin.
  const auto pts = io::read_sample(f);
  const std::vector<Index> mid{2};
  CHECK(mapping_cost(pts, mid) == doctest::Approx(0.5 + 0.5 + 0.5));
  const auto prep = prepare(pts);
  const std::vector<Index> mid_collapsed{1};
  CHECK(mapping_cost(prep.sample, mid_collapsed) * prep.sample.scale_factor ==
        doctest::Approx(1.5));
}

TEST_CASE("pca-cutoff is independent of zero padding") {
  test::ScratchDir dir("cli_pca");
  const auto a = dir.write("a.csv", cluster_csv(24, 3));
  const auto b = dir.write("b.csv", cluster_csv(24, 3, 4));
  const auto ra = run_cli({"pca-cutoff", "--input", a, "--json", dir.file("a.json")});
  const auto rb = run_cli({"pca-cutoff", "--input", b, "--json", dir.file("b.json")});
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(ra.out.rfind("k,eta,rademacher,hinge_bound\n", 0) == 0);
  auto ja = json::parse(test::read_file(dir.file("a.json")));
  auto jb = json::parse(test::read_file(dir.file("b.json")));
  check_schema(ja, "cutoff.schema.json");
  CHECK(ja["N"] == 2);
  CHECK(jb["N"] == 6);
  ja.erase("N");
  jb.erase("N");
  CHECK(ja.dump() == jb.dump());
  const auto inline_json = run_cli({"pca-cutoff", "--input", a});
  REQUIRE(inline_json.code == 0);
  CHECK(inline_json.out.find("\"chosen_k\"") != std::string::npos);
  const auto unlabeled = dir.write("u.csv", "id,x1\na,0.1\nb,0.2\n");
  CHECK(run_cli({"pca-cutoff", "--input", unlabeled}).code == 2);
}

TEST_CASE("train then predict reproduces training signs") {
  test::ScratchDir dir("cli_train");
  const auto f = dir.write("train.csv", cluster_csv(32, 5));
  const auto model = dir.file("model.json");
  const auto t = run_cli({"train", "--input", f, "--out", model});
  REQUIRE(t.code == 0);
  const auto mj = json::parse(test::read_file(model));
  check_schema(mj, "model.schema.json");
  const auto p = run_cli({"predict", "--model", model, "--query", f});
  REQUIRE(p.code == 0);
  const auto table = io::read_point_table(f);
  std::istringstream lines(p.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "id,value,sign");
  Index row = 0;
  while (std::getline(lines, line)) {
    const auto fields = io::split_csv_line(line);
    REQUIRE(fields.size() == 3);
    CHECK(fields[0] == table.ids[row]);
    CHECK(std::stoi(fields[2]) == table.labels[row]);
    ++row;
  }
  CHECK(row == 32);
}

TEST_CASE("train and predict on a distance matrix") {
  test::ScratchDir dir("cli_matrix");
  const auto s = test::segment(6);
  std::ostringstream m, l;
  m.precision(17);
  m << "id";
  for (Index i = 0; i < 6; ++i) m << ",p" << i;
  m << "\n";
  l << "id,label\n";
  for (Index i = 0; i < 6; ++i) {
    m << "p" << i;
    for (Index k = 0; k < 6; ++k) m << ',' << s(i, k) * 3.0;
    m << "\n";
    l << "p" << i << ',' << (i < 3 ? -1 : 1) << "\n";
  }
  const auto mf = dir.write("d.csv", m.str());
  const auto lf = dir.write("l.csv", l.str());
  const auto model = dir.file("m.json");
  REQUIRE(run_cli({"train", "--input", mf, "--labels", lf, "--out", model}).code == 0);
  const auto mj = json::parse(test::read_file(model));
  check_schema(mj, "model.schema.json");
  CHECK(mj["coordinates"].is_null());
  CHECK(mj["scale_factor"].get<double>() == doctest::Approx(3.0));
  // Query rows give distances to every anchor, in input units.
  const auto p = run_cli({"predict", "--model", model, "--query", mf});
  REQUIRE(p.code == 0);
  CHECK(p.out.find("p0,") != std::string::npos);
  CHECK(p.out.find(",-1\n") != std::string::npos);
  const auto missing = dir.write("q.csv", "id,zz\nx,1\n");
  CHECK(run_cli({"predict", "--model", model, "--query", missing}).code == 2);
  const auto junk = dir.write("junk.json", "{not json");
  CHECK(run_cli({"predict", "--model", junk, "--query", mf}).code == 2);
}

TEST_CASE("bounds") {
  const auto r = run_cli({"bounds", "--n", "10000", "--L", "1", "--D", "2"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  check_schema(j, "bounds.schema.json");
  CHECK(j["metric"]["rademacher"].get<double>() == doctest::Approx(6.1862755731));
  const auto h = run_cli({"bounds", "--n", "1156", "--k", "1", "--delta", "0.2706705664732254"});
  REQUIRE(h.code == 0);
  CHECK(json::parse(h.out)["euclid"]["hinge_bound"].get<double>() == doctest::Approx(1.0882352941));
  const auto g = run_cli({"bounds", "--n", "100", "--D", "2", "--gamma", "0.5", "--loss", "0.1"});
  REQUIRE(g.code == 0);
  check_schema(json::parse(g.out), "bounds.schema.json");
  CHECK(run_cli({"bounds", "--n", "100"}).code == 2);
  CHECK(run_cli({"bounds", "--n", "0", "--k", "1"}).code == 2);
  CHECK(run_cli({"bounds", "--n", "10", "--D", "2", "--gamma", "1.5"}).code == 2);
}

TEST_CASE("repeated runs are byte-identical") {
  test::ScratchDir dir("cli_repeat");
  const auto seg = dir.write("seg.csv", test::segment_csv(12));
  const auto cl = dir.write("cl.csv", cluster_csv(20, 8));
  const std::vector<std::vector<std::string>> commands{
      {"validate", "--input", seg, "--seed", "3"},
      {"hierarchy", "--input", seg},
      {"reduce", "--input", seg, "--sweep", "--stats"},
      {"pca-cutoff", "--input", cl, "--center"},
      {"train", "--input", cl},
      {"bounds", "--n", "50", "--k", "2", "--D", "3", "--gamma", "0.25"},
  };
  for (const auto& cmd : commands) {
    const auto a = run_cli(cmd);
    const auto b = run_cli(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}
