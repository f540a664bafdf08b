#pragma once

#include <cstddef>
#include <cstdint>

#include "logbarrier/attack.hpp"
#include "logbarrier/classifier.hpp"
#include "logbarrier/types.hpp"

namespace logbarrier {

// Loss-maximisation attacks constrained to a ball of radius epsilon_ball
// around the clean sample. Both start at the clean sample (no random start).
struct BaselineConfig {
  enum class Kind { kIfgsm, kPgdL2 };

  Kind kind = Kind::kIfgsm;
  double epsilon_ball = 0.3;
  double step_size = 0.075;
  std::size_t iterations = 10;
  std::uint64_t seed = 0;

  // Ten steps of size epsilon/4.
  static BaselineConfig ifgsm_defaults(double epsilon_ball);
  // Twenty steps of size epsilon/4.
  static BaselineConfig pgd_defaults(double epsilon_ball);

  void validate() const;
};

// x_{t+1} = P_box(clip_{|d|_inf <= eps}(x_t + h sign(grad L))).
AttackResult run_ifgsm(const Classifier& model, const Sample& sample, const BaselineConfig& config);

// x_{t+1} = P_box(P_{|d|_2 <= eps}(x_t + h grad L / |grad L|_2)); zero-gradient
// steps are skipped and counted in AttackResult::skipped_steps.
AttackResult run_pgd_l2(const Classifier& model, const Sample& sample, const BaselineConfig& config);

AttackResult run_baseline(const Classifier& model, const Sample& sample,
                          const BaselineConfig& config);

}  // namespace logbarrier
