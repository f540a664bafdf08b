#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "logbarrier/classifier.hpp"
#include "logbarrier/perturbation.hpp"
#include "logbarrier/types.hpp"

namespace logbarrier {

enum class InitNoise { kNormal, kBernoulli };

// Hyperparameters of the LogBarrier attack and its noise initialisation.
//
// Use `linf_defaults()` / `l2_defaults()` for the published settings; the
// l2 variant differs only in step size, loop bounds, measure and init noise.
struct AttackConfig {
  PerturbationMeasure measure = PerturbationMeasure::smooth_linf(10.0);
  double lambda0 = 0.1;
  double beta = 0.75;
  double gamma = 0.5;
  double step_size = 0.1;
  double epsilon_stop = 1e-6;
  // Inclusive loop bounds: outer k = 0..K_outer, inner j = 0..J_inner.
  std::size_t outer_iterations = 25;
  std::size_t inner_iterations = 1000;
  std::size_t topk = 1;

  double init_step = 5e-4;
  std::size_t init_max_draws = 1000;
  InitNoise init_noise = InitNoise::kBernoulli;
  double init_rho = 0.01;

  std::uint64_t seed = 0;

  static AttackConfig linf_defaults();
  static AttackConfig l2_defaults();

  // Barrier weight for outer iteration k: lambda0 * beta^k.
  double lambda_at(std::size_t k) const;

  // Throws InvalidInput on any out-of-range field.
  void validate() const;
  void validate_for(const Classifier& model) const;
};

// Upper bound on backtracking halvings before falling back to the previous
// (feasible) iterate.
inline constexpr std::size_t kBacktrackCap = 200;

struct TracePoint {
  std::size_t outer = 0;
  double best_measure = 0.0;
};

struct AttackResult {
  Vector adversarial;
  bool success = false;
  double distance_l2 = std::numeric_limits<double>::infinity();
  double distance_linf = std::numeric_limits<double>::infinity();
  std::size_t init_iterations = 0;
  std::size_t outer_completed = 0;
  std::size_t total_inner_steps = 0;
  std::size_t backtrack_count = 0;
  // Baseline attacks: steps skipped because the loss gradient vanished.
  std::size_t skipped_steps = 0;
  std::vector<TracePoint> best_trace;
  std::vector<double> lambda_trace;
};

bool operator==(const TracePoint& a, const TracePoint& b);
bool operator==(const AttackResult& a, const AttackResult& b);

// One retained (post-backtracking) iterate of the inner loop.
struct IterateEvent {
  std::size_t outer = 0;
  std::size_t inner = 0;
  double lambda = 0.0;
  std::size_t backtrack_steps = 0;
  const Vector& iterate;
};

using IterateObserver = std::function<void(const IterateEvent&)>;

// lambda * sum_j -log(gap_j) over the top-k gaps. Throws InfeasiblePoint if any
// gap is <= 0.
double barrier_value(const Classifier& model, const Vector& u, std::size_t c, std::size_t topk,
                     double lambda);

// -lambda * sum_j grad(gap_j) / gap_j. Same feasibility requirement.
Vector barrier_gradient(const Classifier& model, const Vector& u, std::size_t c,
                        std::size_t topk, double lambda);

struct InitResult {
  Vector point;
  std::size_t iterations = 0;
};

// Escalating-noise search for a misclassified starting point. Returns the
// sample unchanged (0 iterations) if it is already misclassified at level
// topk; otherwise walks u <- P(u + h 1.01^k b) with fresh noise b each draw.
// Throws InitializationFailed if init_max_draws draws do not succeed.
InitResult initialize_adversarial(const Classifier& model, const Sample& sample,
                                  const AttackConfig& config);

struct BacktrackResult {
  Vector point;
  std::size_t steps = 0;
};

// Pulls u_new towards the feasible u_prev via u <- gamma u + (1 - gamma) u_prev
// until misclassified. After kBacktrackCap steps returns u_prev itself.
BacktrackResult backtrack_to_feasible(const Vector& u_new, const Vector& u_prev,
                                      const Classifier& model, std::size_t c, std::size_t topk,
                                      double gamma);

AttackResult run_logbarrier(const Classifier& model, const Sample& sample,
                            const AttackConfig& config);

// Variant that reports every retained iterate to `observer`.
AttackResult run_logbarrier(const Classifier& model, const Sample& sample,
                            const AttackConfig& config, const IterateObserver& observer);

// Runs each sample with seed = config.seed + index. When `indices` is given,
// indices[i] is used in place of i so results do not depend on batch order.
// threads == 0 picks the default worker count (see default_thread_count()).
std::vector<AttackResult> run_logbarrier_batch(const Classifier& model,
                                               const std::vector<Sample>& samples,
                                               const AttackConfig& config,
                                               const std::vector<std::size_t>& indices = {},
                                               std::size_t threads = 0);

}  // namespace logbarrier
