#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "logbarrier/attack.hpp"
#include "logbarrier/baselines.hpp"
#include "logbarrier/classifier.hpp"
#include "logbarrier/perturbation.hpp"
#include "logbarrier/types.hpp"

namespace logbarrier {

// A named attack together with the norm its statistics are reported in.
// `run` receives the sample and its index in the evaluated set; seeds should
// be derived from the index so results do not depend on scheduling.
struct AttackSpec {
  std::string name;
  Norm norm = Norm::kL2;
  std::function<AttackResult(const Sample&, std::size_t)> run;
};

struct SampleRecord {
  std::size_t id = 0;
  std::string attack;
  bool success = false;
  double distance_l2 = std::numeric_limits<double>::infinity();
  double distance_linf = std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;

  double distance(Norm norm) const { return norm == Norm::kL2 ? distance_l2 : distance_linf; }
};

struct CurvePoint {
  double distance = 0.0;
  double fraction = 0.0;
};

struct AttackSummary {
  std::string attack;
  Norm norm = Norm::kL2;
  std::size_t samples = 0;
  std::size_t successes = 0;
  // (threshold, percent of samples misclassified within that distance)
  std::vector<std::pair<double, double>> success_rate_at;
  double mean_l2 = 0.0;
  double variance_l2 = 0.0;
  double mean_linf = 0.0;
  double variance_linf = 0.0;
  // (level in (0,1], nearest-rank distance; +inf if the rank falls on a failure)
  std::vector<std::pair<double, double>> quantiles;
  std::vector<CurvePoint> curve;
};

struct EvaluationReport {
  std::vector<double> thresholds;
  std::vector<double> quantile_levels;
  // Grouped by attack in the order attacks were given, then by sample id.
  std::vector<SampleRecord> per_sample;
  std::vector<AttackSummary> summaries;

  const AttackSummary* find(const std::string& attack) const;
};

// Nearest-rank quantile: the smallest d such that at least a fraction `level`
// of the values are <= d. Failures should be passed as +inf.
double nearest_rank_quantile(std::vector<double> values, double level);

// Aggregates per-sample records. Attacks appear in first-seen order; their
// norm comes from `norm_of`.
EvaluationReport summarize(std::vector<SampleRecord> records, std::vector<double> thresholds,
                           std::vector<double> quantile_levels,
                           const std::function<Norm(const std::string&)>& norm_of);

// Runs every attack on every sample. Samples the model already misclassifies
// are recorded as distance-0 successes without running the attack. Distances
// are rounded to the 9 significant digits used in report files, so a report
// rebuilt from its own CSV is identical.
EvaluationReport evaluate(const Classifier& model, const std::vector<Sample>& samples,
                          const std::vector<AttackSpec>& attacks, std::vector<double> thresholds,
                          std::vector<double> quantile_levels, std::size_t threads = 0);

// Norm implied by the attack names used by the CLI: "pgd" and "*_l2" are l2,
// "ifgsm" and "*_linf" are linf. Throws InvalidInput otherwise.
Norm norm_for_attack_name(const std::string& name);

struct GridSearchResult {
  // Smallest radius in the grid at which the attack succeeded, +inf if none.
  double epsilon = std::numeric_limits<double>::infinity();
  AttackResult result;
};

// Runs a baseline at each radius of an ascending grid, with step size scaled
// in proportion to the radius, and stops at the first success.
GridSearchResult smallest_successful_radius(const Classifier& model, const Sample& sample,
                                            BaselineConfig::Kind kind,
                                            const std::vector<double>& grid);

double round_to_report_precision(double value);

}  // namespace logbarrier
