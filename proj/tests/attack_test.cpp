#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "logbarrier/attack.hpp"
#include "logbarrier/errors.hpp"
#include "test_support.hpp"

namespace logbarrier {
namespace {

using testing::central_difference;
using testing::linear_model;
using testing::relative_error;

// Two-class model whose gap p1 - p0 is constant: zero weights, biases (0, d).
Classifier constant_gap_model(double logit_diff) {
  return linear_model({{0.0, 0.0}, {0.0, 0.0}}, {0.0, logit_diff});
}

TEST(Barrier, ValueMatchesFormula) {
  // p1 = 3/4, p0 = 1/4 -> gap 0.5.
  const Classifier model = constant_gap_model(std::log(3.0));
  EXPECT_NEAR(barrier_value(model, {0.5, 0.5}, 0, 1, 0.1), 0.1 * -std::log(0.5), 1e-12);
  EXPECT_NEAR(barrier_value(model, {0.5, 0.5}, 0, 1, 0.1), 0.06931, 1e-5);
}

TEST(Barrier, DivergesNearTheBoundary) {
  // tanh(d/2) = 1e-12
  const Classifier model = constant_gap_model(2.0 * std::atanh(1e-12));
  EXPECT_GT(barrier_value(model, {0.5, 0.5}, 0, 1, 0.1), 2.7);
}

TEST(Barrier, LinearInLambda) {
  std::mt19937_64 rng(1);
  const Classifier model = testing::random_mlp(rng, 3, 6, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector u = testing::uniform_vector(rng, 3, 0.0, 1.0);
    const std::size_t winner = model.predict(u);
    const std::size_t c = (winner + 1) % 3;
    if (!model.is_misclassified(u, c, 1)) continue;
    EXPECT_EQ(barrier_value(model, u, c, 1, 0.05), barrier_value(model, u, c, 1, 0.1) / 2.0);
  }
}

TEST(Barrier, InfeasiblePointThrows) {
  const Classifier model = constant_gap_model(std::log(3.0));
  EXPECT_THROW(barrier_value(model, {0.5, 0.5}, 1, 1, 0.1), InfeasiblePoint);
  EXPECT_THROW(barrier_gradient(model, {0.5, 0.5}, 1, 1, 0.1), InfeasiblePoint);
  const Classifier tie = constant_gap_model(0.0);
  EXPECT_THROW(barrier_value(tie, {0.5, 0.5}, 0, 1, 0.1), InfeasiblePoint);
}

TEST(Barrier, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  int checked = 0;
  while (checked < 100) {
    const std::size_t classes = 3 + checked % 3;
    const Classifier model = testing::random_mlp(rng, 4, 8, classes);
    const Vector u = testing::uniform_vector(rng, 4, 0.05, 0.95);
    const std::size_t topk = 1 + checked % 2;
    const Vector p = model.probabilities(u);
    // The least likely class is misclassified at every level below N.
    const std::size_t c = static_cast<std::size_t>(
        std::min_element(p.begin(), p.end()) - p.begin());
    const GapGradient gg = model.gap_and_gradient(u, c, topk);
    if (gg.gaps.back() <= 1e-3) continue;
    const double lambda = 0.1;
    auto value = [&](const Vector& v) {
      // Fix the ranking so the finite difference sees one smooth branch.
      const Vector q = model.probabilities(v);
      double total = 0.0;
      for (std::size_t j = 0; j < topk; ++j) total -= std::log(q[gg.ranked_classes[j]] - q[c]);
      return lambda * total;
    };
    EXPECT_LT(relative_error(barrier_gradient(model, u, c, topk, lambda), central_difference(value, u)),
              1e-4);
    ++checked;
  }
}

TEST(Barrier, TwoClassGradientIsAntiparallelToCorrectMargin) {
  const Vector w0{1.0, -0.5};
  const Vector w1{-0.3, 0.8};
  const Classifier model = linear_model({w0, w1}, {0.0, 0.4});
  const Vector u{0.4, 0.7};
  ASSERT_TRUE(model.is_misclassified(u, 0, 1));
  const Vector p = model.probabilities(u);
  const double gap = p[1] - p[0];
  const double lambda = 0.3;
  const Vector g = barrier_gradient(model, u, 0, 1, lambda);
  // grad(f_0 - f_1) = 2 p0 p1 (w0 - w1); barrier gradient = lambda/gap * that.
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(g[i], lambda / gap * 2.0 * p[0] * p[1] * (w0[i] - w1[i]), 1e-14);
  }
  EXPECT_EQ(barrier_gradient(model, u, 0, 1, 0.0), (Vector{0.0, 0.0}));
}

TEST(Schedule, LambdaIsGeometric) {
  const AttackConfig c = AttackConfig::linf_defaults();
  EXPECT_EQ(c.lambda_at(0), c.lambda0);
  EXPECT_EQ(c.lambda_at(1), c.lambda0 * c.beta);
  EXPECT_NEAR(c.lambda_at(3), 0.1 * 0.75 * 0.75 * 0.75, 1e-17);
}

TEST(Config, Defaults) {
  const AttackConfig linf = AttackConfig::linf_defaults();
  EXPECT_EQ(linf.epsilon_stop, 1e-6);
  EXPECT_EQ(linf.step_size, 0.1);
  EXPECT_EQ(linf.beta, 0.75);
  EXPECT_EQ(linf.gamma, 0.5);
  EXPECT_EQ(linf.lambda0, 0.1);
  EXPECT_EQ(linf.outer_iterations, 25u);
  EXPECT_EQ(linf.inner_iterations, 1000u);
  EXPECT_EQ(linf.init_noise, InitNoise::kBernoulli);
  EXPECT_EQ(linf.init_rho, 0.01);
  EXPECT_EQ(linf.init_max_draws, 1000u);
  EXPECT_EQ(linf.init_step, 5e-4);
  const AttackConfig l2 = AttackConfig::l2_defaults();
  EXPECT_EQ(l2.step_size, 5e-3);
  EXPECT_EQ(l2.outer_iterations, 15u);
  EXPECT_EQ(l2.inner_iterations, 200u);
  EXPECT_EQ(l2.init_noise, InitNoise::kNormal);
  EXPECT_EQ(l2.measure.kind, PerturbationMeasure::Kind::kSquaredL2);
}

TEST(Config, ValidationRejectsOutOfRangeFields) {
  const Classifier model = constant_gap_model(1.0);
  AttackConfig c = AttackConfig::l2_defaults();
  c.beta = 1.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = AttackConfig::l2_defaults();
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), InvalidInput);
  c = AttackConfig::l2_defaults();
  c.topk = 2;
  EXPECT_THROW(c.validate_for(model), InvalidInput);
  c = AttackConfig::l2_defaults();
  c.inner_iterations = 0;
  EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(Initialize, AlreadyMisclassifiedIsReturnedUnchanged) {
  const Classifier model = constant_gap_model(1.0);
  const Sample s{{0.3, 0.9}, 0};
  const InitResult r = initialize_adversarial(model, s, AttackConfig::l2_defaults());
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.point, s.pixels);
}

TEST(Initialize, ZeroBudgetFails) {
  const Classifier model = constant_gap_model(1.0);
  AttackConfig c = AttackConfig::l2_defaults();
  c.init_max_draws = 0;
  EXPECT_THROW(initialize_adversarial(model, {{0.3, 0.9}, 1}, c), InitializationFailed);
}

TEST(Initialize, LinearToyFindsAnInBoxAdversary) {
  const Classifier model = linear_model({{4.0, 0.0}, {0.0, 0.0}}, {-2.0, 0.0});
  const Sample s{{0.8, 0.5}, 0};
  ASSERT_EQ(model.predict(s.pixels), 0u);
  for (const InitNoise noise : {InitNoise::kNormal, InitNoise::kBernoulli}) {
    AttackConfig c = AttackConfig::l2_defaults();
    c.init_noise = noise;
    c.init_rho = 0.5;
    c.seed = 42;
    const InitResult r = initialize_adversarial(model, s, c);
    EXPECT_GT(r.iterations, 0u);
    EXPECT_LE(r.iterations, 1000u);
    EXPECT_TRUE(model.is_misclassified(r.point, 0, 1));
    for (double v : r.point) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const InitResult again = initialize_adversarial(model, s, c);
    EXPECT_EQ(again.point, r.point);
  }
}

TEST(Backtrack, FeasibleCandidateIsKept) {
  const Classifier model = linear_model({{1.0, 0.0}, {0.0, 0.0}}, {-0.5, 0.0});
  const Vector feasible{0.2, 0.5};
  const BacktrackResult r = backtrack_to_feasible({0.1, 0.1}, feasible, model, 0, 1, 0.5);
  EXPECT_EQ(r.steps, 0u);
  EXPECT_EQ(r.point, (Vector{0.1, 0.1}));
}

TEST(Backtrack, FollowsTheAffineRecursion) {
  // Boundary at x0 = 0.5; class 0 wins for x0 > 0.5.
  const Classifier model = linear_model({{1.0, 0.0}, {0.0, 0.0}}, {-0.5, 0.0});
  const Vector prev{0.1, 0.2};
  const Vector next{0.9, 0.6};
  const BacktrackResult r = backtrack_to_feasible(next, prev, model, 0, 1, 0.5);
  ASSERT_GT(r.steps, 0u);
  const double shrink = std::pow(0.5, static_cast<double>(r.steps));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(r.point[i], prev[i] + shrink * (next[i] - prev[i]), 1e-15);
  }
  // Returned point lies strictly on the adversarial side of the hyperplane.
  EXPECT_LT(r.point[0], 0.5);
  EXPECT_TRUE(model.is_misclassified(r.point, 0, 1));
  // One fewer step would still be on the wrong side.
  EXPECT_GE(prev[0] + 2.0 * shrink * (next[0] - prev[0]), 0.5);
}

TEST(Backtrack, CapFallsBackToPreviousIterate) {
  const Classifier model = linear_model({{1.0, 0.0}, {0.0, 0.0}}, {-0.5, 0.0});
  // With gamma close to 1, 200 contractions only cover ~18% of the way back.
  const Vector prev{0.5 - 1e-6, 0.0};
  const BacktrackResult r = backtrack_to_feasible({1.0, 0.0}, prev, model, 0, 1, 0.999);
  EXPECT_EQ(r.steps, kBacktrackCap);
  EXPECT_EQ(r.point, prev);
}

Sample clean_sample_for(const Classifier& model, Vector pixels) {
  return {pixels, model.predict(pixels)};
}

TEST(RunLogBarrier, AlreadyMisclassifiedIsZeroDistanceSuccess) {
  const Classifier model = constant_gap_model(1.0);
  const AttackResult r = run_logbarrier(model, {{0.4, 0.4}, 0}, AttackConfig::l2_defaults());
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.distance_l2, 0.0);
  EXPECT_EQ(r.distance_linf, 0.0);
  EXPECT_EQ(r.init_iterations, 0u);
}

TEST(RunLogBarrier, InitializationFailureIsRecorded) {
  // Class 0 wins everywhere in the box.
  const Classifier model = linear_model({{0.0, 0.0}, {0.0, 0.0}}, {5.0, 0.0});
  AttackConfig c = AttackConfig::l2_defaults();
  c.init_max_draws = 20;
  const AttackResult r = run_logbarrier(model, {{0.4, 0.4}, 0}, c);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.adversarial, (Vector{0.4, 0.4}));
  EXPECT_TRUE(std::isinf(r.distance_l2));
  EXPECT_TRUE(std::isinf(r.distance_linf));
}

TEST(RunLogBarrier, TwoClassLinearMatchesHyperplaneDistance) {
  const Vector w0{1.5, -0.7};
  const Vector w1{-0.5, 0.9};
  const double b0 = 0.1;
  const double b1 = -0.05;
  for (const double T : {1.0, 3.0}) {
    const Classifier model = linear_model({w0, w1}, {b0, b1}, T);
    const Sample s = clean_sample_for(model, {0.62, 0.41});
    ASSERT_EQ(s.label, 0u);
    // Point-to-hyperplane distance of the logit boundary (temperature-free).
    const double dx = w0[0] - w1[0];
    const double dy = w0[1] - w1[1];
    const double oracle =
        (dx * s.pixels[0] + dy * s.pixels[1] + b0 - b1) / std::sqrt(dx * dx + dy * dy);
    AttackConfig c = AttackConfig::l2_defaults();
    c.seed = 3;
    const AttackResult r = run_logbarrier(model, s, c);
    ASSERT_TRUE(r.success);
    EXPECT_GE(r.distance_l2, oracle - 1e-9);
    EXPECT_LE(r.distance_l2, 1.05 * oracle) << "T=" << T;
  }
}

TEST(RunLogBarrier, DeterministicForFixedSeed) {
  const auto& fx = testing::two_blob_mlp();
  const std::vector<Sample> clean = testing::correctly_classified(fx);
  for (const AttackConfig& base : {AttackConfig::l2_defaults(), AttackConfig::linf_defaults()}) {
    AttackConfig c = base;
    c.seed = 17;
    c.inner_iterations = 100;
    const AttackResult a = run_logbarrier(fx.model, clean[3], c);
    const AttackResult b = run_logbarrier(fx.model, clean[3], c);
    EXPECT_TRUE(a == b);
  }
}

TEST(RunLogBarrier, RetainedIteratesAreFeasibleAndInBox) {
  const auto& fx = testing::three_blob_mlp();
  const std::vector<Sample> clean = testing::correctly_classified(fx);
  for (std::size_t i = 0; i < 6; ++i) {
    AttackConfig c = i % 2 == 0 ? AttackConfig::l2_defaults() : AttackConfig::linf_defaults();
    c.inner_iterations = 150;
    c.topk = 1 + i % 2;
    c.seed = i;
    // rho = 0.01 leaves a 2-pixel input untouched on most draws.
    c.init_rho = 0.5;
    std::size_t events = 0;
    const AttackResult r = run_logbarrier(fx.model, clean[i * 7], c, [&](const IterateEvent& e) {
      ++events;
      EXPECT_TRUE(fx.model.is_misclassified(e.iterate, clean[i * 7].label, c.topk));
      for (double v : e.iterate) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    });
    EXPECT_EQ(events, r.total_inner_steps);
    ASSERT_TRUE(r.success) << "run " << i;
    EXPECT_TRUE(fx.model.is_misclassified(r.adversarial, clean[i * 7].label, c.topk));
    for (std::size_t t = 1; t < r.best_trace.size(); ++t) {
      EXPECT_LE(r.best_trace[t].best_measure, r.best_trace[t - 1].best_measure);
    }
    ASSERT_EQ(r.lambda_trace.size(), c.outer_iterations + 1);
    for (std::size_t k = 0; k < r.lambda_trace.size(); ++k) {
      EXPECT_EQ(r.lambda_trace[k], c.lambda0 * std::pow(c.beta, static_cast<double>(k)));
    }
  }
}

TEST(RunLogBarrier, WithoutBarrierDistanceNeverIncreases) {
  const auto& fx = testing::two_blob_mlp();
  const Sample s = testing::correctly_classified(fx)[10];
  AttackConfig c = AttackConfig::l2_defaults();
  c.lambda0 = 0.0;
  c.seed = 5;
  double last = std::numeric_limits<double>::infinity();
  run_logbarrier(fx.model, s, c, [&](const IterateEvent& e) {
    const double m = measure(c.measure, difference(e.iterate, s.pixels));
    EXPECT_LE(m, last + 1e-15);
    last = m;
  });
  EXPECT_TRUE(std::isfinite(last));
}

TEST(RunLogBarrierBatch, MatchesSingleRunsAndIsOrderIndependent) {
  const auto& fx = testing::two_blob_mlp();
  const std::vector<Sample> clean = testing::correctly_classified(fx);
  std::vector<Sample> batch(clean.begin(), clean.begin() + 4);
  AttackConfig c = AttackConfig::l2_defaults();
  c.inner_iterations = 60;
  c.seed = 100;

  EXPECT_TRUE(run_logbarrier_batch(fx.model, {}, c).empty());

  const std::vector<AttackResult> one = run_logbarrier_batch(fx.model, {batch[0]}, c);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0] == run_logbarrier(fx.model, batch[0], c));

  const std::vector<AttackResult> forward = run_logbarrier_batch(fx.model, batch, c, {}, 2);
  const std::vector<Sample> reversed(batch.rbegin(), batch.rend());
  const std::vector<AttackResult> backward =
      run_logbarrier_batch(fx.model, reversed, c, {3, 2, 1, 0}, 3);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_TRUE(forward[i] == backward[batch.size() - 1 - i]);
  }
}

}  // namespace
}  // namespace logbarrier
