#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "adr/metric.hpp"

namespace adr::io {

enum class InputFormat { kAuto, kPoints, kMatrix };

/// Rows of `id,<columns...>[,label]` without building distances.
struct PointTable {
  std::vector<std::string> header;  // column names after id, label dropped
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
  std::vector<int> labels;
};
PointTable read_point_table(std::istream& in);
PointTable read_point_table(const std::string& path);

/// `id,x1,...,xN[,label]`.
MetricSample read_points_csv(std::istream& in);

/// Square matrix whose header row and first column carry the ids. Labels,
/// when present, come from a separate `id,label` file.
MetricSample read_distance_csv(std::istream& in,
                               std::istream* labels = nullptr);

/// Reads from disk, sniffing the format from the header when kAuto: a header
/// whose remaining columns are `x1..xN[,label]` is a points file.
MetricSample read_sample(const std::string& path,
                         const std::optional<std::string>& labels_path = {},
                         InputFormat format = InputFormat::kAuto);

/// Splits one CSV line on commas and trims surrounding whitespace.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double(const std::string& field);

}  // namespace adr::io
