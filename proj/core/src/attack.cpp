#include "logbarrier/attack.hpp"

#include <cmath>
#include <random>
#include <string>

#include "logbarrier/errors.hpp"
#include "logbarrier/parallel.hpp"

namespace logbarrier {

AttackConfig AttackConfig::linf_defaults() { return AttackConfig{}; }

AttackConfig AttackConfig::l2_defaults() {
  AttackConfig config;
  config.measure = PerturbationMeasure::squared_l2();
  config.step_size = 5e-3;
  config.outer_iterations = 15;
  config.inner_iterations = 200;
  config.init_noise = InitNoise::kNormal;
  return config;
}

double AttackConfig::lambda_at(std::size_t k) const {
  return lambda0 * std::pow(beta, static_cast<double>(k));
}

void AttackConfig::validate() const {
  logbarrier::validate(measure);
  auto fail = [](const std::string& what) { throw InvalidInput("attack config: " + what); };
  if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) fail("lambda0 must be non-negative");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
  if (!(step_size > 0.0)) fail("step size must be positive");
  if (!(epsilon_stop > 0.0)) fail("epsilon_stop must be positive");
  if (outer_iterations == 0 || inner_iterations == 0) fail("loop bounds must be positive");
  if (topk == 0) fail("topk must be at least 1");
  if (!(init_step > 0.0)) fail("init step must be positive");
  if (init_noise == InitNoise::kBernoulli && !(init_rho > 0.0 && init_rho < 1.0)) {
    fail("bernoulli rho must lie in (0,1)");
  }
}

void AttackConfig::validate_for(const Classifier& model) const {
  validate();
  if (topk >= model.num_classes()) {
    throw InvalidInput("attack config: topk must be below the number of classes (" +
                       std::to_string(model.num_classes()) + ")");
  }
}

bool operator==(const TracePoint& a, const TracePoint& b) {
  return a.outer == b.outer && a.best_measure == b.best_measure;
}

bool operator==(const AttackResult& a, const AttackResult& b) {
  return a.adversarial == b.adversarial && a.success == b.success &&
         a.distance_l2 == b.distance_l2 && a.distance_linf == b.distance_linf &&
         a.init_iterations == b.init_iterations && a.outer_completed == b.outer_completed &&
         a.total_inner_steps == b.total_inner_steps && a.backtrack_count == b.backtrack_count &&
         a.skipped_steps == b.skipped_steps && a.best_trace == b.best_trace &&
         a.lambda_trace == b.lambda_trace;
}

namespace {

void require_feasible(const Vector& gaps) {
  for (std::size_t j = 0; j < gaps.size(); ++j) {
    if (!(gaps[j] > 0.0)) {
      throw InfeasiblePoint("barrier undefined: gap " + std::to_string(j) + " = " +
                            std::to_string(gaps[j]) + " is not positive");
    }
  }
}

bool all_finite(const Vector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double barrier_value(const Classifier& model, const Vector& u, std::size_t c, std::size_t topk,
                     double lambda) {
  const Vector gaps = model.gaps(u, c, topk);
  require_feasible(gaps);
  double total = 0.0;
  for (double g : gaps) total -= std::log(g);
  return lambda * total;
}

Vector barrier_gradient(const Classifier& model, const Vector& u, std::size_t c,
                        std::size_t topk, double lambda) {
  const GapGradient gg = model.gap_and_gradient(u, c, topk);
  require_feasible(gg.gaps);
  Vector grad(u.size(), 0.0);
  if (lambda == 0.0) return grad;
  for (std::size_t j = 0; j < topk; ++j) {
    const double scale = -lambda / gg.gaps[j];
    const Vector& dg = gg.gradients[j];
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += scale * dg[i];
  }
  return grad;
}

InitResult initialize_adversarial(const Classifier& model, const Sample& sample,
                                  const AttackConfig& config) {
  const std::size_t c = sample.label;
  const std::size_t k = config.topk;
  if (model.is_misclassified(sample.pixels, c, k)) return {sample.pixels, 0};

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution mask(config.init_rho);
  std::bernoulli_distribution coin(0.5);

  Vector u = sample.pixels;
  Vector noise(u.size());
  double scale = config.init_step;
  for (std::size_t draw = 0; draw < config.init_max_draws; ++draw) {
    if (config.init_noise == InitNoise::kNormal) {
      for (double& b : noise) b = normal(rng);
    } else {
      // Symmetric +-1 mask so perturbations can darken as well as brighten.
      for (double& b : noise) {
        const bool on = mask(rng);
        const bool up = coin(rng);
        b = on ? (up ? 1.0 : -1.0) : 0.0;
      }
    }
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += scale * noise[i];
    u = project_box(std::move(u));
    if (model.is_misclassified(u, c, k)) return {u, draw + 1};
    scale *= 1.01;
  }
  throw InitializationFailed("no misclassified point within " +
                             std::to_string(config.init_max_draws) + " noise draws");
}

BacktrackResult backtrack_to_feasible(const Vector& u_new, const Vector& u_prev,
                                      const Classifier& model, std::size_t c, std::size_t topk,
                                      double gamma) {
  if (u_new.size() != u_prev.size()) throw InvalidInput("iterates differ in length");
  if (all_finite(u_new) && model.is_misclassified(u_new, c, topk)) return {u_new, 0};
  if (!all_finite(u_new)) return {u_prev, kBacktrackCap};

  Vector u = u_new;
  for (std::size_t step = 1; step <= kBacktrackCap; ++step) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = gamma * u[i] + (1.0 - gamma) * u_prev[i];
    if (model.is_misclassified(u, c, topk)) return {u, step};
  }
  return {u_prev, kBacktrackCap};
}

AttackResult run_logbarrier(const Classifier& model, const Sample& sample,
                            const AttackConfig& config) {
  return run_logbarrier(model, sample, config, IterateObserver{});
}

AttackResult run_logbarrier(const Classifier& model, const Sample& sample,
                            const AttackConfig& config, const IterateObserver& observer) {
  config.validate_for(model);
  validate_sample(sample);
  if (sample.pixels.size() != model.input_dim()) {
    throw InvalidInput("sample length does not match the model input");
  }
  const Vector& x = sample.pixels;
  const std::size_t c = sample.label;
  const std::size_t k = config.topk;

  AttackResult result;
  InitResult init;
  try {
    init = initialize_adversarial(model, sample, config);
  } catch (const InitializationFailed&) {
    result.adversarial = x;
    result.init_iterations = config.init_max_draws;
    return result;
  }
  result.init_iterations = init.iterations;
  result.success = true;

  if (init.iterations == 0) {
    result.adversarial = x;
    result.distance_l2 = 0.0;
    result.distance_linf = 0.0;
    return result;
  }

  Vector u = std::move(init.point);
  Vector best = u;
  double best_measure = measure(config.measure, difference(u, x));

  for (std::size_t outer = 0; outer <= config.outer_iterations; ++outer) {
    const double lambda = config.lambda_at(outer);
    result.lambda_trace.push_back(lambda);

    for (std::size_t inner = 0; inner <= config.inner_iterations; ++inner) {
      Vector grad = measure_gradient(config.measure, difference(u, x));
      const Vector barrier = barrier_gradient(model, u, c, k, lambda);
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += barrier[i];

      Vector candidate(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) candidate[i] = u[i] - config.step_size * grad[i];
      candidate = project_box(std::move(candidate));

      BacktrackResult accepted = backtrack_to_feasible(candidate, u, model, c, k, config.gamma);
      ++result.total_inner_steps;
      result.backtrack_count += accepted.steps;

      if (observer) observer(IterateEvent{outer, inner, lambda, accepted.steps, accepted.point});

      const double moved = exact_norm(difference(accepted.point, u), Norm::kL2);
      u = std::move(accepted.point);

      const double m = measure(config.measure, difference(u, x));
      if (m < best_measure) {
        best_measure = m;
        best = u;
      }
      if (moved <= config.epsilon_stop) break;
    }
    result.outer_completed = outer + 1;
    result.best_trace.push_back({outer, best_measure});
  }

  const Vector delta = difference(best, x);
  result.distance_l2 = exact_norm(delta, Norm::kL2);
  result.distance_linf = exact_norm(delta, Norm::kLinf);
  result.adversarial = std::move(best);
  return result;
}

std::vector<AttackResult> run_logbarrier_batch(const Classifier& model,
                                               const std::vector<Sample>& samples,
                                               const AttackConfig& config,
                                               const std::vector<std::size_t>& indices,
                                               std::size_t threads) {
  if (!indices.empty() && indices.size() != samples.size()) {
    throw InvalidInput("index list must match the number of samples");
  }
  config.validate_for(model);
  std::vector<AttackResult> results(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    AttackConfig local = config;
    local.seed = config.seed + (indices.empty() ? i : indices[i]);
    results[i] = run_logbarrier(model, samples[i], local);
  });
  return results;
}

}  // namespace logbarrier
