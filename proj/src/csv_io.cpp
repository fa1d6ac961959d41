#include "adr/csv_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace adr::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> read_rows(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

int parse_label(const std::string& field) {
  const double v = parse_double(field);
  if (v == 1.0) return 1;
  if (v == -1.0) return -1;
  fail(ErrorKind::kInput, "labels must be -1 or +1, got '" + field + "'");
}

bool looks_like_points_header(const std::vector<std::string>& header) {
  if (header.size() < 2) return false;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (c + 1 == header.size() && h == "label") continue;
    if (h.size() < 2 || h[0] != 'x') return false;
    if (h.find_first_not_of("0123456789", 1) != std::string::npos) return false;
  }
  return true;
}

std::ifstream open(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::kInput, "cannot open '" + path + "'");
  return f;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::kInput, "not a number: '" + field + "'");
  }
  if (used != field.size()) fail(ErrorKind::kInput, "not a number: '" + field + "'");
  return v;
}

PointTable read_point_table(std::istream& in) {
  const auto rows = read_rows(in);
  if (rows.empty()) fail(ErrorKind::kInput, "empty sample");
  PointTable t;
  t.header = rows.front();
  if (t.header.empty() || t.header[0] != "id")
    fail(ErrorKind::kInput, "header must start with 'id'");
  const bool labeled = t.header.back() == "label";
  const Index dim = static_cast<Index>(t.header.size()) - 1 - (labeled ? 1 : 0);
  if (dim < 1) fail(ErrorKind::kInput, "file has no coordinate columns");

  const Index n = static_cast<Index>(rows.size()) - 1;
  if (n == 0) fail(ErrorKind::kInput, "empty sample");
  t.values.resize(n, dim);
  for (Index r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    if (row.size() != t.header.size())
      fail(ErrorKind::kInput, "row " + std::to_string(r + 2) + " has wrong width");
    t.ids.push_back(row[0]);
    for (Index c = 0; c < dim; ++c) t.values(r, c) = parse_double(row[c + 1]);
    if (labeled) t.labels.push_back(parse_label(row.back()));
  }
  if (labeled) t.header.pop_back();
  t.header.erase(t.header.begin());
  return t;
}

PointTable read_point_table(const std::string& path) {
  auto f = open(path);
  return read_point_table(f);
}

MetricSample read_points_csv(std::istream& in) {
  PointTable t = read_point_table(in);
  return from_points(std::move(t.ids), std::move(t.values), std::move(t.labels));
}

MetricSample read_distance_csv(std::istream& in, std::istream* labels_in) {
  const auto rows = read_rows(in);
  if (rows.empty()) fail(ErrorKind::kInput, "empty sample");
  const auto& header = rows.front();
  const Index n = static_cast<Index>(header.size()) - 1;
  if (n < 1) fail(ErrorKind::kInput, "empty sample");
  if (static_cast<Index>(rows.size()) - 1 != n)
    fail(ErrorKind::kInput, "malformed distances");

  Eigen::MatrixXd d(n, n);
  std::vector<std::string> ids(header.begin() + 1, header.end());
  for (Index r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    if (static_cast<Index>(row.size()) != n + 1 || row[0] != ids[r])
      fail(ErrorKind::kInput, "malformed distances");
    for (Index c = 0; c < n; ++c) d(r, c) = parse_double(row[c + 1]);
  }

  std::vector<int> labels;
  if (labels_in) {
    std::map<std::string, int> by_id;
    const auto lrows = read_rows(*labels_in);
    for (std::size_t r = 0; r < lrows.size(); ++r) {
      if (r == 0 && lrows[r].size() == 2 && lrows[r][0] == "id") continue;
      if (lrows[r].size() != 2) fail(ErrorKind::kInput, "labels file must be id,label");
      by_id[lrows[r][0]] = parse_label(lrows[r][1]);
    }
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) fail(ErrorKind::kInput, "no label for id '" + id + "'");
      labels.push_back(it->second);
    }
  }
  return from_distances(std::move(ids), std::move(d), std::move(labels));
}

MetricSample read_sample(const std::string& path,
                         const std::optional<std::string>& labels_path,
                         InputFormat format) {
  if (format == InputFormat::kAuto) {
    auto f = open(path);
    std::string first;
    std::getline(f, first);
    format = looks_like_points_header(split_csv_line(first)) ? InputFormat::kPoints
                                                              : InputFormat::kMatrix;
  }
  auto f = open(path);
  if (format == InputFormat::kPoints) {
    if (labels_path) fail(ErrorKind::kInput, "points files carry labels inline");
    return read_points_csv(f);
  }
  if (labels_path) {
    auto lf = open(*labels_path);
    return read_distance_csv(f, &lf);
  }
  return read_distance_csv(f);
}

}  // namespace adr::io
