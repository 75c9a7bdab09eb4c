#include "lasdp/io.hpp"

#include "lasdp/error.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

namespace lasdp::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return cells;
}

// Parses a full cell; from_chars rejects a leading '+', so skip it by hand.
bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) {
    return false;
  }
  if (cell.front() == '+') {
    cell.remove_prefix(1);
  }
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot write " + path.string());
  }
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) {
      continue;
    }
    const auto cells = split(line);
    if (first) {
      first = false;
      width = cells.size();
      bool numeric = true;
      double dummy = 0.0;
      for (auto c : cells) {
        numeric = numeric && parse_double(c, dummy);
      }
      if (!numeric) {
        for (auto c : cells) {
          table.header.push_back(unquote(c));
        }
        continue;
      }
    }
    if (cells.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " columns, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (!parse_double(cells[j], row[j])) {
        throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) +
                         ": cannot parse '" + std::string(cells[j]) + "' as a number");
      }
      if (!std::isfinite(row[j])) {
        throw ValidationError("line " + std::to_string(line_no) + ", column " +
                              std::to_string(j + 1) + ": non-finite value");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw ParseError("CSV input contains no data rows");
  }
  table.x.resize(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.x(static_cast<Index>(j), static_cast<Index>(i)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const MatrixXd& x, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      out << (j ? "," : "") << header[j];
    }
    out << '\n';
  }
  out.precision(17);
  for (Index i = 0; i < x.cols(); ++i) {
    for (Index j = 0; j < x.rows(); ++j) {
      out << (j ? "," : "") << x(j, i);
    }
    out << '\n';
  }
}

void write_csv_file(const std::filesystem::path& path, const MatrixXd& x,
                    const std::vector<std::string>& header) {
  auto out = open_out(path);
  write_csv(out, x, header);
}

std::vector<int> read_labels(std::istream& in) {
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cell = trim(line);
    if (cell.empty()) {
      continue;
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      if (labels.empty() && line_no == 1) {
        continue;  // header
      }
      throw ParseError("labels line " + std::to_string(line_no) + ": '" + std::string(cell) +
                       "' is not an integer");
    }
    if (value < 1) {
      throw ValidationError("labels line " + std::to_string(line_no) + ": labels are 1-based");
    }
    labels.push_back(value - 1);
  }
  if (labels.empty()) {
    throw ParseError("labels input is empty");
  }
  return labels;
}

std::vector<int> read_labels_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

void write_labels(std::ostream& out, const Partition& partition) {
  for (int label : partition.one_based()) {
    out << label << '\n';
  }
}

void write_labels_file(const std::filesystem::path& path, const Partition& partition) {
  auto out = open_out(path);
  write_labels(out, partition);
}

std::string metrics_json(const RunMetrics& m) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) {
      return v;
    }
    return nullptr;
  };
  nlohmann::json j;
  j["error"] = num(m.error);
  j["delta"] = num(m.delta);
  j["D_min"] = num(m.d_min);
  j["M"] = num(m.big_m);
  j["m"] = num(m.small_m);
  j["iterations"] = m.iterations;
  j["wall_ms"] = num(m.wall_ms);
  j["method"] = m.method;
  j["seed"] = m.seed;
  return j.dump(2);
}

void write_metrics_file(const std::filesystem::path& path, const RunMetrics& m) {
  auto out = open_out(path);
  out << metrics_json(m) << '\n';
}

}  // namespace lasdp::io
