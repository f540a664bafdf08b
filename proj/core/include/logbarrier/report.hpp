#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "logbarrier/evaluation.hpp"

namespace logbarrier {

enum class ReportFormat { kCsv, kStructured };

// Reals are printed with "%.9g"; +inf as "inf".
std::string format_real(double value);

// kCsv writes <dir>/per_sample.csv and <dir>/summary.csv;
// kStructured writes <dir>/report.json. The directory is created if needed.
//
//   per_sample.csv: id,attack,success,l2,linf,iters
//   summary.csv:    attack,norm,metric,key,value
//
// Throws IoError when a file cannot be written.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir,
                  ReportFormat format);

// Defense curve of one attack: distance,fraction.
void emit_curve(const EvaluationReport& report, const std::string& attack,
                const std::filesystem::path& path);

std::string per_sample_csv(const EvaluationReport& report);
std::string summary_csv(const EvaluationReport& report);
std::string curve_csv(const AttackSummary& summary);
std::string report_json(const EvaluationReport& report);

// Parses a per_sample.csv written by write_report.
std::vector<SampleRecord> read_per_sample_csv(const std::filesystem::path& path);
std::vector<SampleRecord> parse_per_sample_csv(const std::string& text);

}  // namespace logbarrier
