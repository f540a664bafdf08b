#include "logbarrier/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <tuple>

#include "logbarrier/errors.hpp"
#include "logbarrier/parallel.hpp"

namespace logbarrier {

const AttackSummary* EvaluationReport::find(const std::string& attack) const {
  for (const AttackSummary& s : summaries) {
    if (s.attack == attack) return &s;
  }
  return nullptr;
}

double round_to_report_precision(double value) {
  if (!std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return std::strtod(buf, nullptr);
}

double nearest_rank_quantile(std::vector<double> values, double level) {
  if (values.empty()) return std::numeric_limits<double>::infinity();
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  // Guard against level * n landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil(level * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

Norm norm_for_attack_name(const std::string& name) {
  auto ends_with = [&](const std::string& suffix) {
    return name.size() >= suffix.size() &&
           name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (name == "pgd" || ends_with("_l2")) return Norm::kL2;
  if (name == "ifgsm" || ends_with("_linf")) return Norm::kLinf;
  throw InvalidInput("cannot infer the norm of attack '" + name + "'");
}

namespace {

std::pair<double, double> mean_and_variance(const std::vector<double>& values) {
  if (values.empty()) {
    const double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, var};
}

AttackSummary summarize_attack(const std::string& attack, Norm norm,
                               const std::vector<const SampleRecord*>& rows,
                               const std::vector<double>& thresholds,
                               const std::vector<double>& levels) {
  AttackSummary out;
  out.attack = attack;
  out.norm = norm;
  out.samples = rows.size();

  std::vector<double> all;        // failures as +inf
  std::vector<double> finite;
  std::vector<double> l2;
  std::vector<double> linf;
  for (const SampleRecord* r : rows) {
    const double d = r->success ? r->distance(norm) : std::numeric_limits<double>::infinity();
    all.push_back(d);
    if (r->success) {
      ++out.successes;
      finite.push_back(d);
      l2.push_back(r->distance_l2);
      linf.push_back(r->distance_linf);
    }
  }

  const double n = static_cast<double>(rows.size());
  for (double t : thresholds) {
    std::size_t hit = 0;
    for (double d : all) hit += d <= t ? 1 : 0;
    out.success_rate_at.emplace_back(t, rows.empty() ? 0.0 : 100.0 * static_cast<double>(hit) / n);
  }
  std::tie(out.mean_l2, out.variance_l2) = mean_and_variance(l2);
  std::tie(out.mean_linf, out.variance_linf) = mean_and_variance(linf);
  for (double q : levels) out.quantiles.emplace_back(q, nearest_rank_quantile(all, q));

  std::sort(finite.begin(), finite.end());
  for (std::size_t i = 0; i < finite.size(); ++i) {
    out.curve.push_back({finite[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

}  // namespace

EvaluationReport summarize(std::vector<SampleRecord> records, std::vector<double> thresholds,
                           std::vector<double> quantile_levels,
                           const std::function<Norm(const std::string&)>& norm_of) {
  std::sort(thresholds.begin(), thresholds.end());
  for (double q : quantile_levels) {
    if (!(q > 0.0 && q <= 1.0)) throw InvalidInput("quantile levels must lie in (0,1]");
  }

  EvaluationReport report;
  report.thresholds = std::move(thresholds);
  report.quantile_levels = std::move(quantile_levels);
  report.per_sample = std::move(records);

  std::vector<std::string> order;
  for (const SampleRecord& r : report.per_sample) {
    if (std::find(order.begin(), order.end(), r.attack) == order.end()) order.push_back(r.attack);
  }
  for (const std::string& name : order) {
    std::vector<const SampleRecord*> rows;
    for (const SampleRecord& r : report.per_sample) {
      if (r.attack == name) rows.push_back(&r);
    }
    report.summaries.push_back(summarize_attack(name, norm_of(name), rows, report.thresholds,
                                                report.quantile_levels));
  }
  return report;
}

EvaluationReport evaluate(const Classifier& model, const std::vector<Sample>& samples,
                          const std::vector<AttackSpec>& attacks, std::vector<double> thresholds,
                          std::vector<double> quantile_levels, std::size_t threads) {
  for (const Sample& s : samples) {
    if (s.pixels.size() != model.input_dim()) {
      throw InvalidInput("sample length does not match the model input");
    }
    if (s.label >= model.num_classes()) throw InvalidInput("sample label out of range");
  }

  const std::size_t n = samples.size();
  std::vector<bool> already(n);
  for (std::size_t i = 0; i < n; ++i) already[i] = model.predict(samples[i].pixels) != samples[i].label;

  std::vector<SampleRecord> records(attacks.size() * n);
  parallel_for(records.size(), threads, [&](std::size_t slot) {
    const std::size_t a = slot / n;
    const std::size_t i = slot % n;
    SampleRecord& rec = records[slot];
    rec.id = i;
    rec.attack = attacks[a].name;
    if (already[i]) {
      rec.success = true;
      rec.distance_l2 = 0.0;
      rec.distance_linf = 0.0;
      return;
    }
    const AttackResult r = attacks[a].run(samples[i], i);
    rec.success = r.success;
    rec.distance_l2 = r.success ? round_to_report_precision(r.distance_l2)
                                : std::numeric_limits<double>::infinity();
    rec.distance_linf = r.success ? round_to_report_precision(r.distance_linf)
                                  : std::numeric_limits<double>::infinity();
    rec.iterations = r.total_inner_steps;
  });

  auto norm_of = [&](const std::string& name) {
    for (const AttackSpec& spec : attacks) {
      if (spec.name == name) return spec.norm;
    }
    return norm_for_attack_name(name);
  };
  return summarize(std::move(records), std::move(thresholds), std::move(quantile_levels), norm_of);
}

GridSearchResult smallest_successful_radius(const Classifier& model, const Sample& sample,
                                            BaselineConfig::Kind kind,
                                            const std::vector<double>& grid) {
  GridSearchResult out;
  for (double eps : grid) {
    const BaselineConfig config = kind == BaselineConfig::Kind::kIfgsm
                                      ? BaselineConfig::ifgsm_defaults(eps)
                                      : BaselineConfig::pgd_defaults(eps);
    AttackResult r = run_baseline(model, sample, config);
    const bool hit = r.success;
    out.result = std::move(r);
    if (hit) {
      out.epsilon = eps;
      break;
    }
  }
  return out;
}

}  // namespace logbarrier
