#include "logbarrier/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "logbarrier/errors.hpp"
#include "logbarrier/perturbation.hpp"

namespace logbarrier {

BaselineConfig BaselineConfig::ifgsm_defaults(double epsilon_ball) {
  return {Kind::kIfgsm, epsilon_ball, epsilon_ball / 4.0, 10, 0};
}

BaselineConfig BaselineConfig::pgd_defaults(double epsilon_ball) {
  return {Kind::kPgdL2, epsilon_ball, epsilon_ball / 4.0, 20, 0};
}

void BaselineConfig::validate() const {
  if (!(epsilon_ball >= 0.0) || !std::isfinite(epsilon_ball)) {
    throw InvalidInput("baseline: ball radius must be non-negative");
  }
  if (!(step_size >= 0.0) || step_size > 2.0 * epsilon_ball) {
    throw InvalidInput("baseline: step size must lie in [0, 2 * epsilon]");
  }
  if (iterations == 0) throw InvalidInput("baseline: iterations must be positive");
}

namespace {

void finish(const Classifier& model, const Sample& sample, Vector u, AttackResult& result) {
  const Vector delta = difference(u, sample.pixels);
  result.distance_l2 = exact_norm(delta, Norm::kL2);
  result.distance_linf = exact_norm(delta, Norm::kLinf);
  result.success = model.is_misclassified(u, sample.label, 1);
  result.adversarial = std::move(u);
}

void check(const Classifier& model, const Sample& sample, const BaselineConfig& config) {
  config.validate();
  validate_sample(sample);
  if (sample.pixels.size() != model.input_dim()) {
    throw InvalidInput("sample length does not match the model input");
  }
}

}  // namespace

AttackResult run_ifgsm(const Classifier& model, const Sample& sample, const BaselineConfig& config) {
  check(model, sample, config);
  const Vector& x = sample.pixels;
  const double eps = config.epsilon_ball;
  Vector u = x;
  AttackResult result;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    const Vector grad = model.loss_gradient(u, sample.label);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double s = grad[i] > 0.0 ? 1.0 : (grad[i] < 0.0 ? -1.0 : 0.0);
      const double stepped = u[i] + config.step_size * s;
      u[i] = std::clamp(std::clamp(stepped, x[i] - eps, x[i] + eps), 0.0, 1.0);
    }
    ++result.total_inner_steps;
  }
  finish(model, sample, std::move(u), result);
  return result;
}

AttackResult run_pgd_l2(const Classifier& model, const Sample& sample, const BaselineConfig& config) {
  check(model, sample, config);
  const Vector& x = sample.pixels;
  const double eps = config.epsilon_ball;
  Vector u = x;
  AttackResult result;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    ++result.total_inner_steps;
    const Vector grad = model.loss_gradient(u, sample.label);
    const double norm = exact_norm(grad, Norm::kL2);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      ++result.skipped_steps;
      continue;
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += config.step_size * grad[i] / norm;

    Vector delta = difference(u, x);
    const double dn = exact_norm(delta, Norm::kL2);
    if (dn > eps) {
      for (double& d : delta) d *= eps / dn;
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = x[i] + delta[i];
    u = project_box(std::move(u));
  }
  finish(model, sample, std::move(u), result);
  return result;
}

AttackResult run_baseline(const Classifier& model, const Sample& sample,
                          const BaselineConfig& config) {
  return config.kind == BaselineConfig::Kind::kIfgsm ? run_ifgsm(model, sample, config)
                                                     : run_pgd_l2(model, sample, config);
}

}  // namespace logbarrier
