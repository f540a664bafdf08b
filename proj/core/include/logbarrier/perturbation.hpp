#pragma once

#include "logbarrier/types.hpp"

namespace logbarrier {

enum class Norm { kL2, kLinf };

// Smooth perturbation size m(delta) minimised by the attack.
//
// kSquaredL2 is sum(delta_i^2). kSmoothLinf is the softmax-weighted mean
// of |delta_i| with sharpness alpha,
//
//   sum |d_i| exp(alpha |d_i|) / sum exp(alpha |d_i|),
//
// which lies between mean(|delta|) and max(|delta|) and tends to the max norm
// as alpha grows.
struct PerturbationMeasure {
  enum class Kind { kSquaredL2, kSmoothLinf };

  Kind kind = Kind::kSquaredL2;
  double alpha = 10.0;

  static PerturbationMeasure squared_l2() { return {Kind::kSquaredL2, 10.0}; }
  static PerturbationMeasure smooth_linf(double alpha = 10.0) { return {Kind::kSmoothLinf, alpha}; }
};

// Throws InvalidInput when alpha <= 0 for the smooth max.
void validate(const PerturbationMeasure& m);

double measure(const PerturbationMeasure& m, const Vector& delta);
Vector measure_gradient(const PerturbationMeasure& m, const Vector& delta);

double smooth_linf(const Vector& delta, double alpha);
Vector smooth_linf_gradient(const Vector& delta, double alpha);

double exact_norm(const Vector& delta, Norm p);

// Per-coordinate clamp to [0,1].
Vector project_box(Vector x);

Vector difference(const Vector& a, const Vector& b);

}  // namespace logbarrier
