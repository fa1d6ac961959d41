#include "adr/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "adr/csv_io.hpp"
#include "adr/error.hpp"
#include "adr/hierarchy.hpp"
#include "adr/json_io.hpp"
#include "adr/lipschitz.hpp"
#include "adr/oracle.hpp"
#include "adr/pca.hpp"
#include "adr/rounding.hpp"

namespace adr::cli {

namespace {

using io::ordered_json;

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Config {
  std::string input;
  std::optional<std::string> labels;
  std::string format = "auto";
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  double delta = 0.05;
  std::optional<double> beta;
  std::optional<double> D;
  bool sweep = false;
  bool stats = false;
  bool center = false;
  bool oracle = false;
  std::optional<std::string> json_path;
  std::string model;
  std::string query;
  // bounds
  std::optional<double> n, k;
  double eta = 0.0, loss = 0.0, L = 1.0, eta_normalized = 0.0;
  std::optional<double> gamma;
};

io::InputFormat parse_format(const std::string& f) {
  if (f == "auto") return io::InputFormat::kAuto;
  if (f == "points") return io::InputFormat::kPoints;
  if (f == "matrix") return io::InputFormat::kMatrix;
  fail(ErrorKind::kInput, "unknown format '" + f + "'");
}

MetricSample load(const Config& c) {
  return io::read_sample(c.input, c.labels, parse_format(c.format));
}

// For commands that rely on the triangle inequality.
MetricSample load_metric(const Config& c) {
  MetricSample s = load(c);
  const ValidationReport rep = validate_metric(s, c.seed);
  if (rep.ok) return s;
  std::string msg = rep.message;
  if (rep.violation) {
    const auto& v = *rep.violation;
    msg += " (triple " + s.ids[v[0]] + ", " + s.ids[v[1]] + ", " + s.ids[v[2]] + ")";
  }
  fail(ErrorKind::kInput, msg);
}

void check_unit_interval(const char* name, double v) {
  if (!(v > 0.0 && v < 1.0)) fail(ErrorKind::kInput, std::string(name) + " must lie in (0, 1)");
}

class Output {
 public:
  Output(const Config& c, std::ostream& fallback) : fallback_(fallback) {
    if (c.out) {
      file_.open(*c.out);
      if (!file_) fail(ErrorKind::kInput, "cannot write '" + *c.out + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

int cmd_validate(const Config& c, std::ostream& out, std::ostream& err) {
  const MetricSample s = load(c);
  const ValidationReport rep = validate_metric(s, c.seed);
  ordered_json j;
  j["ok"] = rep.ok;
  j["n"] = s.size();
  j["mode"] = s.size() <= 200 ? "exhaustive" : "sampled";
  if (rep.violation) {
    const auto& v = *rep.violation;
    j["violation"] = {s.ids[v[0]], s.ids[v[1]], s.ids[v[2]]};
    Output(c, out).stream() << io::dump(j);
    err << "error: " << rep.message << " (triple " << s.ids[v[0]] << ", " << s.ids[v[1]]
        << ", " << s.ids[v[2]] << ")\n";
    return static_cast<int>(ErrorKind::kInput);
  }
  j["violation"] = nullptr;
  const CollapsedSample prep = prepare(s);
  j["ddim_estimate"] = estimate_ddim(prep.sample).value;
  if (c.oracle) j["exact_ddim"] = oracle::exact_ddim(prep.sample);
  Output(c, out).stream() << io::dump(j);
  return 0;
}

int cmd_hierarchy(const Config& c, std::ostream& out, std::ostream&) {
  const CollapsedSample prep = prepare(load_metric(c));
  const NetHierarchy h = build_hierarchy(prep.sample);
  const HierarchyReport rep = validate_hierarchy(h, prep.sample);
  if (!rep.ok) fail(ErrorKind::kNumeric, "hierarchy failed validation: " + rep.message);
  Output(c, out).stream() << io::dump(io::hierarchy_json(h, prep.sample));
  return 0;
}

ordered_json reduce_one(const MetricSample& s, double D, const Config& c) {
  const Reduction red = reduce(s, D, c.beta);
  ordered_json j = io::rounded_json(red.solution, red.prepared.sample);
  j["D"] = D;
  j["beta"] = red.beta;
  if (!red.solution.notes.empty() || !red.warnings.empty()) {
    std::vector<std::string> notes = red.warnings;
    notes.insert(notes.end(), red.solution.notes.begin(), red.solution.notes.end());
    j["notes"] = notes;
  }
  if (c.stats) j["stats"] = io::stats_json(red.stats);
  if (c.oracle) {
    const MetricSample& ps = red.prepared.sample;
    const oracle::LdmOptimum opt = oracle::brute_force_ldm(ps, D);
    const LdmInstance inst = LdmInstance::create(ps, D);
    const LdmProgram prog = build_program(inst);
    ordered_json o;
    std::vector<std::string> ids;
    for (Index p : opt.T) ids.push_back(ps.ids[p]);
    o["T"] = ids;
    o["cost"] = opt.cost * ps.scale_factor;
    o["lp_optimum"] = oracle::reference_lp(prog) * ps.scale_factor;
    j["oracle"] = std::move(o);
  }
  return j;
}

int cmd_reduce(const Config& c, std::ostream& out, std::ostream&) {
  const MetricSample s = load_metric(c);
  if (c.sweep) {
    const CollapsedSample prep = prepare(s);
    const double n = static_cast<double>(prep.sample.size());
    const int top = std::max(1, static_cast<int>(std::ceil(std::log2(std::max(n, 2.0)))));
    ordered_json runs = ordered_json::array();
    for (int D = 1; D <= top; ++D) runs.push_back(reduce_one(s, D, c));
    Output(c, out).stream() << io::dump({{"runs", runs}});
    return 0;
  }
  Output(c, out).stream() << io::dump(reduce_one(s, c.D.value_or(1.0), c));
  return 0;
}

int cmd_pca(const Config& c, std::ostream& out, std::ostream&) {
  const io::PointTable t = io::read_point_table(c.input);
  if (t.labels.empty()) fail(ErrorKind::kInput, "pca-cutoff needs a label column");
  check_unit_interval("delta", c.delta);
  const pca::CutoffReport rep = pca::select_cutoff(t.values, t.labels, c.delta, c.center);
  Output sink(c, out);
  std::ostream& o = sink.stream();
  o << "k,eta,rademacher,hinge_bound\n";
  for (const auto& r : rep.rows)
    o << r.k << ',' << num(r.eta) << ',' << num(r.rademacher) << ',' << num(r.hinge_bound) << '\n';
  const ordered_json j = io::cutoff_json(rep);
  if (c.json_path) {
    std::ofstream f(*c.json_path);
    if (!f) fail(ErrorKind::kInput, "cannot write '" + *c.json_path + "'");
    f << io::dump(j);
  } else {
    o << io::dump(j);
  }
  return 0;
}

int cmd_train(const Config& c, std::ostream& out, std::ostream&) {
  check_unit_interval("delta", c.delta);
  ModelOptions opts;
  opts.delta = c.delta;
  opts.beta = c.beta;
  opts.only_D = c.D;
  const ModelSelection ms = model_select(load_metric(c), opts);
  Output(c, out).stream() << io::dump(io::model_json(ms));
  return 0;
}

int cmd_predict(const Config& c, std::ostream& out, std::ostream&) {
  std::ifstream mf(c.model);
  if (!mf) fail(ErrorKind::kInput, "cannot open '" + c.model + "'");
  ordered_json mj;
  try {
    mj = ordered_json::parse(mf);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kInput, std::string("model is not valid JSON: ") + e.what());
  }
  const LipschitzClassifier clf = io::classifier_from_json(mj);
  const io::PointTable q = io::read_point_table(c.query);
  Output sink(c, out);
  std::ostream& o = sink.stream();
  o << "id,value,sign\n";
  if (clf.anchor_coordinates) {
    for (Index r = 0; r < q.values.rows(); ++r) {
      const Extension e = clf.predict_point(q.values.row(r));
      o << q.ids[r] << ',' << num(e.value) << ',' << e.sign << '\n';
    }
    return 0;
  }
  // Distance rows: one column per anchor id.
  std::map<std::string, Index> col;
  for (std::size_t k = 0; k < q.header.size(); ++k) col[q.header[k]] = static_cast<Index>(k);
  std::vector<Index> order;
  for (const auto& id : clf.anchor_ids) {
    const auto it = col.find(id);
    if (it == col.end()) fail(ErrorKind::kInput, "query lacks a distance column for anchor '" + id + "'");
    order.push_back(it->second);
  }
  for (Index r = 0; r < q.values.rows(); ++r) {
    Eigen::VectorXd d(static_cast<Index>(order.size()));
    for (std::size_t a = 0; a < order.size(); ++a) d(a) = q.values(r, order[a]);
    if ((d.array() < 0.0).any()) fail(ErrorKind::kInput, "negative distance in query");
    const Extension e = clf.predict(d);
    o << q.ids[r] << ',' << num(e.value) << ',' << e.sign << '\n';
  }
  return 0;
}

int cmd_bounds(const Config& c, std::ostream& out, std::ostream&) {
  if (!c.n || !(*c.n >= 1.0)) fail(ErrorKind::kInput, "--n must be >= 1");
  check_unit_interval("delta", c.delta);
  const double n = *c.n;
  ordered_json j;
  j["n"] = n;
  j["delta"] = c.delta;
  if (c.k) {
    j["euclid"] = {
        {"k", *c.k},
        {"eta", c.eta},
        {"rademacher", pca::rademacher_bound_euclid(*c.k, c.eta, n)},
        {"hinge_bound", pca::hinge_bound(*c.k, c.eta, n, c.delta, c.loss)},
    };
  }
  if (c.D) {
    if (!(c.L > 0.0)) fail(ErrorKind::kInput, "--L must be positive");
    ordered_json m;
    m["L"] = c.L;
    m["D"] = *c.D;
    m["eta_normalized"] = c.eta_normalized;
    m["rademacher"] = rademacher_bound_metric(c.L, n, *c.D);
    m["perturbed"] = rademacher_bound_perturbed(c.L, n, *c.D, c.eta_normalized);
    if (c.gamma) {
      m["gamma"] = *c.gamma;
      m["generalization"] =
          generalization_bound(c.loss, c.L, *c.gamma, n, *c.D, c.eta_normalized, c.delta);
    }
    j["metric"] = std::move(m);
  }
  if (!c.k && !c.D) fail(ErrorKind::kInput, "bounds needs --k and/or --D");
  Output(c, out).stream() << io::dump(j);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metric sample reduction, PCA cutoff and Lipschitz classification"};
  app.require_subcommand(1);
  Config c;

  auto add_input = [&](CLI::App* s, bool labels) {
    s->add_option("--input", c.input, "Points or distance-matrix CSV")->required();
    if (labels) s->add_option("--labels", c.labels, "id,label file for distance matrices");
    s->add_option("--format", c.format, "auto, points or matrix");
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", c.out, "Write output here instead of stdout");
    s->add_option("--seed", c.seed, "Seed for every random choice");
  };

  auto* validate = app.add_subcommand("validate", "Check the metric axioms");
  add_input(validate, true);
  add_common(validate);
  validate->add_flag("--oracle", c.oracle, "Also report the exact doubling dimension");

  auto* hierarchy = app.add_subcommand("hierarchy", "Build the net hierarchy");
  add_input(hierarchy, true);
  add_common(hierarchy);

  auto* red = app.add_subcommand("reduce", "Low-dimensional reduction of a sample");
  add_input(red, true);
  add_common(red);
  red->add_option("--D", c.D, "Target doubling dimension");
  red->add_flag("--sweep", c.sweep, "Run D = 1..ceil(log2 n)");
  red->add_option("--beta", c.beta, "Solver precision in (0, 1/2]");
  red->add_flag("--stats", c.stats, "Include solver statistics");
  red->add_flag("--oracle", c.oracle, "Include brute-force optimum (n <= 10)");

  auto* pca_cmd = app.add_subcommand("pca-cutoff", "Choose the PCA cutoff");
  pca_cmd->add_option("--input", c.input, "Labeled points CSV")->required();
  add_common(pca_cmd);
  pca_cmd->add_option("--delta", c.delta, "Confidence parameter");
  pca_cmd->add_flag("--center", c.center, "Center the data before the decomposition");
  pca_cmd->add_option("--json", c.json_path, "Write the JSON report here");

  auto* train = app.add_subcommand("train", "Train the Lipschitz classifier");
  add_input(train, true);
  add_common(train);
  train->add_option("--delta", c.delta, "Confidence parameter");
  train->add_option("--beta", c.beta, "Solver precision in (0, 1/2]");
  train->add_option("--D", c.D, "Use only this dimension");

  auto* predict = app.add_subcommand("predict", "Apply a trained model");
  predict->add_option("--model", c.model, "Model JSON")->required();
  predict->add_option("--query", c.query, "Query points, or distances to anchors")->required();
  add_common(predict);

  auto* bounds = app.add_subcommand("bounds", "Evaluate the generalization bounds");
  add_common(bounds);
  bounds->add_option("--n", c.n, "Sample size")->required();
  bounds->add_option("--delta", c.delta, "Confidence parameter");
  bounds->add_option("--k", c.k, "Subspace dimension");
  bounds->add_option("--eta", c.eta, "Distortion");
  bounds->add_option("--loss", c.loss, "Empirical loss");
  bounds->add_option("--L", c.L, "Lipschitz constant");
  bounds->add_option("--D", c.D, "Doubling dimension");
  bounds->add_option("--gamma", c.gamma, "Margin");
  bounds->add_option("--eta-normalized", c.eta_normalized, "Normalized perturbation");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kInput);
  }

  try {
    if (c.beta && !(*c.beta > 0.0 && *c.beta <= 0.5))
      fail(ErrorKind::kInput, "beta must lie in (0, 1/2]");
    if (*validate) return cmd_validate(c, out, err);
    if (*hierarchy) return cmd_hierarchy(c, out, err);
    if (*red) return cmd_reduce(c, out, err);
    if (*pca_cmd) return cmd_pca(c, out, err);
    if (*train) return cmd_train(c, out, err);
    if (*predict) return cmd_predict(c, out, err);
    if (*bounds) return cmd_bounds(c, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kNumeric);
  }
  return 0;
}

}  // namespace adr::cli
