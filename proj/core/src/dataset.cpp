#include "logbarrier/dataset.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "logbarrier/errors.hpp"

namespace logbarrier {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) {
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos ? std::string() : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_real(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE) return std::nullopt;
  return v;
}

}  // namespace

std::vector<Sample> read_dataset(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> columns;
  bool first_content = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (first_content) {
      first_content = false;
      if (!parse_real(cells.front())) continue;  // header
    }
    const std::string where = "line " + std::to_string(line_no);
    if (cells.size() < 2) throw ParseError(where + ": need at least one pixel and a label");
    if (!columns) {
      columns = cells.size();
      if (expected_dim && *expected_dim + 1 != *columns) {
        throw ParseError(where + ": " + std::to_string(*columns - 1) + " pixel columns, expected " +
                         std::to_string(*expected_dim));
      }
    } else if (cells.size() != *columns) {
      throw ParseError(where + ": " + std::to_string(cells.size()) + " columns, expected " +
                       std::to_string(*columns));
    }

    Sample s;
    s.pixels.reserve(cells.size() - 1);
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
      const auto v = parse_real(cells[i]);
      if (!v) throw ParseError(where + ", column " + std::to_string(i + 1) + ": not a number");
      if (!std::isfinite(*v) || *v < 0.0 || *v > 1.0) {
        throw ValidationError(where + ", column " + std::to_string(i + 1) + ": pixel " + cells[i] +
                              " outside [0,1]");
      }
      s.pixels.push_back(*v);
    }
    const auto label = parse_real(cells.back());
    if (!label || *label < 0.0 || *label != std::floor(*label)) {
      throw ParseError(where + ": label '" + cells.back() + "' is not a non-negative integer");
    }
    s.label = static_cast<std::size_t>(*label);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<Sample> load_dataset(const std::filesystem::path& path,
                                 std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_dataset(in, expected_dim);
}

void save_dataset(const std::vector<Sample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  char buf[32];
  for (const Sample& s : samples) {
    for (double v : s.pixels) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << s.label << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace logbarrier
