#include "logbarrier/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "logbarrier/errors.hpp"

namespace logbarrier {
namespace {

const char* norm_name(Norm norm) { return norm == Norm::kL2 ? "l2" : "linf"; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

double parse_real_field(const std::string& text, std::size_t line, const char* field) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ParseError("line " + std::to_string(line) + ": bad " + field + " '" + text + "'");
  }
  return v;
}

std::size_t parse_count_field(const std::string& text, std::size_t line, const char* field) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ParseError("line " + std::to_string(line) + ": bad " + field + " '" + text + "'");
  }
  return static_cast<std::size_t>(std::stoull(text));
}

// JSON has no infinity; non-finite values are stored as strings.
nlohmann::ordered_json json_real(double v) {
  if (std::isfinite(v)) return round_to_report_precision(v);
  return format_real(v);
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

std::string per_sample_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "id,attack,success,l2,linf,iters\n";
  for (const SampleRecord& r : report.per_sample) {
    out << r.id << ',' << r.attack << ',' << (r.success ? 1 : 0) << ','
        << format_real(r.distance_l2) << ',' << format_real(r.distance_linf) << ','
        << r.iterations << '\n';
  }
  return out.str();
}

std::string summary_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "attack,norm,metric,key,value\n";
  for (const AttackSummary& s : report.summaries) {
    const std::string prefix = s.attack + "," + norm_name(s.norm) + ",";
    out << prefix << "samples,," << s.samples << '\n';
    out << prefix << "successes,," << s.successes << '\n';
    for (const auto& [t, rate] : s.success_rate_at) {
      out << prefix << "success_rate_at," << format_real(t) << ',' << format_real(rate) << '\n';
    }
    out << prefix << "mean_l2,," << format_real(s.mean_l2) << '\n';
    out << prefix << "variance_l2,," << format_real(s.variance_l2) << '\n';
    out << prefix << "mean_linf,," << format_real(s.mean_linf) << '\n';
    out << prefix << "variance_linf,," << format_real(s.variance_linf) << '\n';
    for (const auto& [q, d] : s.quantiles) {
      out << prefix << "quantile," << format_real(q) << ',' << format_real(d) << '\n';
    }
  }
  return out.str();
}

std::string curve_csv(const AttackSummary& summary) {
  std::ostringstream out;
  out << "distance,fraction\n";
  for (const CurvePoint& p : summary.curve) {
    out << format_real(p.distance) << ',' << format_real(p.fraction) << '\n';
  }
  return out.str();
}

std::string report_json(const EvaluationReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["thresholds"] = ordered_json::array();
  for (double t : report.thresholds) doc["thresholds"].push_back(json_real(t));
  doc["quantile_levels"] = ordered_json::array();
  for (double q : report.quantile_levels) doc["quantile_levels"].push_back(json_real(q));

  doc["attacks"] = ordered_json::array();
  for (const AttackSummary& s : report.summaries) {
    ordered_json a;
    a["attack"] = s.attack;
    a["norm"] = norm_name(s.norm);
    a["samples"] = s.samples;
    a["successes"] = s.successes;
    a["success_rate_at"] = ordered_json::array();
    for (const auto& [t, rate] : s.success_rate_at) {
      a["success_rate_at"].push_back({{"threshold", json_real(t)}, {"percent", json_real(rate)}});
    }
    a["mean_l2"] = json_real(s.mean_l2);
    a["variance_l2"] = json_real(s.variance_l2);
    a["mean_linf"] = json_real(s.mean_linf);
    a["variance_linf"] = json_real(s.variance_linf);
    a["quantiles"] = ordered_json::array();
    for (const auto& [q, d] : s.quantiles) {
      a["quantiles"].push_back({{"level", json_real(q)}, {"distance", json_real(d)}});
    }
    a["curve"] = ordered_json::array();
    for (const CurvePoint& p : s.curve) {
      a["curve"].push_back({json_real(p.distance), json_real(p.fraction)});
    }
    doc["attacks"].push_back(std::move(a));
  }

  doc["per_sample"] = ordered_json::array();
  for (const SampleRecord& r : report.per_sample) {
    doc["per_sample"].push_back({{"id", r.id},
                                 {"attack", r.attack},
                                 {"success", r.success},
                                 {"l2", json_real(r.distance_l2)},
                                 {"linf", json_real(r.distance_linf)},
                                 {"iters", r.iterations}});
  }
  return doc.dump(1) + "\n";
}

void write_report(const EvaluationReport& report, const std::filesystem::path& dir,
                  ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (format == ReportFormat::kCsv) {
    write_file(dir / "per_sample.csv", per_sample_csv(report));
    write_file(dir / "summary.csv", summary_csv(report));
  } else {
    write_file(dir / "report.json", report_json(report));
  }
}

void emit_curve(const EvaluationReport& report, const std::string& attack,
                const std::filesystem::path& path) {
  const AttackSummary* s = report.find(attack);
  if (s == nullptr) {
    // An attack with no rows still gets a header-only curve.
    write_file(path, curve_csv(AttackSummary{}));
    return;
  }
  write_file(path, curve_csv(*s));
}

std::vector<SampleRecord> parse_per_sample_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<SampleRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "id,attack,success,l2,linf,iters") {
        throw ParseError("line 1: unexpected per-sample header '" + line + "'");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 columns");
    }
    SampleRecord r;
    r.id = parse_count_field(cells[0], line_no, "id");
    r.attack = cells[1];
    if (cells[2] != "0" && cells[2] != "1") {
      throw ParseError("line " + std::to_string(line_no) + ": success must be 0 or 1");
    }
    r.success = cells[2] == "1";
    r.distance_l2 = parse_real_field(cells[3], line_no, "l2");
    r.distance_linf = parse_real_field(cells[4], line_no, "linf");
    r.iterations = parse_count_field(cells[5], line_no, "iters");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SampleRecord> read_per_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_per_sample_csv(buffer.str());
}

}  // namespace logbarrier
