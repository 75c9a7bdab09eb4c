#pragma once

// File formats: data CSV (rows = samples, columns = features, optional
// header), single-column 1-based label files and the metrics JSON record.

#include "lasdp/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lasdp::io {

/// Parsed CSV as a p x n matrix (transposed from the file layout).
struct CsvTable {
  MatrixXd x;
  std::vector<std::string> header;
};

/// Throws ParseError (naming row and column) on malformed cells or ragged rows
/// and on empty input; ValidationError on non-finite values.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

/// One sample per row.
void write_csv(std::ostream& out, const MatrixXd& x, const std::vector<std::string>& header = {});
void write_csv_file(const std::filesystem::path& path, const MatrixXd& x,
                    const std::vector<std::string>& header = {});

/// 1-based labels, one per line (an optional non-numeric header line is skipped).
/// Returned 0-based.
std::vector<int> read_labels(std::istream& in);
std::vector<int> read_labels_file(const std::filesystem::path& path);
void write_labels(std::ostream& out, const Partition& partition);
void write_labels_file(const std::filesystem::path& path, const Partition& partition);

struct RunMetrics {
  /// NaN when no truth labels were supplied.
  double error = 0.0;
  double delta = 0.0;
  double d_min = 0.0;
  double big_m = 0.0;
  double small_m = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::string method;
  std::uint64_t seed = 0;
};

/// Keys error, delta, D_min, M, m, iterations, wall_ms, method, seed.
/// Non-finite numbers are written as null.
std::string metrics_json(const RunMetrics& m);
void write_metrics_file(const std::filesystem::path& path, const RunMetrics& m);

}  // namespace lasdp::io
