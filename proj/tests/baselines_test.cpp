#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "logbarrier/baselines.hpp"
#include "logbarrier/errors.hpp"
#include "test_support.hpp"

namespace logbarrier {
namespace {

using testing::linear_model;

TEST(Ifgsm, SingleIterationIsFgsm) {
  const Classifier model = linear_model({{1.0, -2.0, 0.0}, {-1.0, 1.0, 0.5}}, {0.3, 0.0});
  const Sample s{{0.5, 0.2, 0.9}, 0};
  BaselineConfig c = BaselineConfig::ifgsm_defaults(0.1);
  c.iterations = 1;
  c.step_size = 0.05;
  const Vector g = model.loss_gradient(s.pixels, 0);
  const AttackResult r = run_ifgsm(model, s, c);
  for (std::size_t i = 0; i < 3; ++i) {
    const double sign = g[i] > 0 ? 1.0 : (g[i] < 0 ? -1.0 : 0.0);
    EXPECT_DOUBLE_EQ(r.adversarial[i], std::clamp(s.pixels[i] + 0.05 * sign, 0.0, 1.0));
  }
}

TEST(Ifgsm, StaysInBallAndBox) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Classifier model = testing::random_mlp(rng, 6, 8, 3);
    const Vector x = testing::uniform_vector(rng, 6, 0.0, 1.0);
    const Sample s{x, model.predict(x)};
    const double eps = 0.02 + 0.01 * trial;
    const AttackResult r = run_ifgsm(model, s, BaselineConfig::ifgsm_defaults(eps));
    EXPECT_LE(exact_norm(difference(r.adversarial, x), Norm::kLinf), eps + 1e-12);
    for (double v : r.adversarial) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(r.success, model.is_misclassified(r.adversarial, s.label, 1));
  }
}

TEST(Ifgsm, SucceedsBeyondLinfHyperplaneDistance) {
  const Vector w0{1.0, -0.5};
  const Vector w1{-0.5, 0.5};
  const Classifier model = linear_model({w0, w1}, {0.0, 0.0});
  const Sample s{{0.6, 0.4}, 0};
  // l-infinity distance = logit gap / |w0 - w1|_1
  const double gap = (w0[0] - w1[0]) * 0.6 + (w0[1] - w1[1]) * 0.4;
  const double oracle = gap / (std::abs(w0[0] - w1[0]) + std::abs(w0[1] - w1[1]));
  EXPECT_TRUE(run_ifgsm(model, s, BaselineConfig::ifgsm_defaults(oracle * 1.05)).success);
  EXPECT_FALSE(run_ifgsm(model, s, BaselineConfig::ifgsm_defaults(oracle * 0.95)).success);
}

TEST(Ifgsm, LossIsMonotoneOnLinearModels) {
  const Classifier model = linear_model({{2.0, -1.0, 0.5}, {-1.0, 1.0, 0.0}}, {0.2, 0.0});
  const Sample s{{0.5, 0.5, 0.5}, 0};
  double last = model.loss(s.pixels, 0);
  for (std::size_t t = 1; t <= 8; ++t) {
    BaselineConfig c = BaselineConfig::ifgsm_defaults(0.2);
    c.iterations = t;
    const double loss = model.loss(run_ifgsm(model, s, c).adversarial, 0);
    EXPECT_GE(loss, last - 1e-15);
    last = loss;
  }
}

TEST(PgdL2, StaysInBallAndBox) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Classifier model = testing::random_mlp(rng, 5, 8, 4);
    const Vector x = testing::uniform_vector(rng, 5, 0.0, 1.0);
    const Sample s{x, model.predict(x)};
    const double eps = 0.05 + 0.02 * trial;
    BaselineConfig c = BaselineConfig::pgd_defaults(eps);
    c.step_size = std::min(2.0 * eps, 0.1 + 0.01 * trial);
    const AttackResult r = run_pgd_l2(model, s, c);
    EXPECT_LE(exact_norm(difference(r.adversarial, x), Norm::kL2), eps + 1e-9);
    for (double v : r.adversarial) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(PgdL2, SucceedsBeyondL2HyperplaneDistance) {
  const Vector w0{1.0, -0.5};
  const Vector w1{-0.5, 0.5};
  const Classifier model = linear_model({w0, w1}, {0.0, 0.0});
  const Sample s{{0.6, 0.4}, 0};
  const double dx = w0[0] - w1[0];
  const double dy = w0[1] - w1[1];
  const double oracle = (dx * 0.6 + dy * 0.4) / std::sqrt(dx * dx + dy * dy);
  EXPECT_TRUE(run_pgd_l2(model, s, BaselineConfig::pgd_defaults(oracle * 1.05)).success);
  EXPECT_FALSE(run_pgd_l2(model, s, BaselineConfig::pgd_defaults(oracle * 0.95)).success);
}

TEST(PgdL2, ZeroRadiusLeavesTheSampleUnchanged) {
  const Classifier model = linear_model({{1.0, 0.0}, {0.0, 1.0}}, {0.0, 0.0});
  BaselineConfig c = BaselineConfig::pgd_defaults(0.0);
  const AttackResult clean = run_pgd_l2(model, {{0.7, 0.2}, 0}, c);
  EXPECT_EQ(clean.adversarial, (Vector{0.7, 0.2}));
  EXPECT_FALSE(clean.success);
  const AttackResult wrong = run_pgd_l2(model, {{0.7, 0.2}, 1}, c);
  EXPECT_TRUE(wrong.success);
  EXPECT_EQ(wrong.distance_l2, 0.0);
}

TEST(PgdL2, ZeroGradientStepsAreSkipped) {
  const Classifier flat = linear_model({{0.0, 0.0}, {0.0, 0.0}}, {1.0, 0.0});
  const AttackResult r = run_pgd_l2(flat, {{0.5, 0.5}, 0}, BaselineConfig::pgd_defaults(0.3));
  EXPECT_EQ(r.skipped_steps, 20u);
  EXPECT_EQ(r.adversarial, (Vector{0.5, 0.5}));
}

TEST(Baselines, ConfigValidation) {
  BaselineConfig c = BaselineConfig::ifgsm_defaults(0.1);
  c.step_size = 0.3;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = BaselineConfig::ifgsm_defaults(0.1);
  c.iterations = 0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Baselines, Deterministic) {
  const auto& fx = testing::two_blob_mlp();
  const Sample& s = fx.data[5];
  EXPECT_TRUE(run_ifgsm(fx.model, s, BaselineConfig::ifgsm_defaults(0.2)) ==
              run_ifgsm(fx.model, s, BaselineConfig::ifgsm_defaults(0.2)));
  EXPECT_TRUE(run_pgd_l2(fx.model, s, BaselineConfig::pgd_defaults(0.2)) ==
              run_pgd_l2(fx.model, s, BaselineConfig::pgd_defaults(0.2)));
}

}  // namespace
}  // namespace logbarrier
