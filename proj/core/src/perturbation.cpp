#include "logbarrier/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "logbarrier/errors.hpp"

namespace logbarrier {

void validate(const PerturbationMeasure& m) {
  if (m.kind == PerturbationMeasure::Kind::kSmoothLinf && !(m.alpha > 0.0)) {
    throw InvalidInput("smooth_linf sharpness alpha must be positive");
  }
}

double smooth_linf(const Vector& delta, double alpha) {
  if (delta.empty()) return 0.0;
  double top = 0.0;
  for (double d : delta) top = std::max(top, std::abs(d));
  // exp(alpha * top) cancels between numerator and denominator.
  double num = 0.0;
  double den = 0.0;
  for (double d : delta) {
    const double a = std::abs(d);
    const double w = std::exp(alpha * (a - top));
    num += a * w;
    den += w;
  }
  return num / den;
}

Vector smooth_linf_gradient(const Vector& delta, double alpha) {
  Vector grad(delta.size(), 0.0);
  if (delta.empty()) return grad;
  double top = 0.0;
  for (double d : delta) top = std::max(top, std::abs(d));
  Vector weights(delta.size());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double a = std::abs(delta[i]);
    weights[i] = std::exp(alpha * (a - top));
    num += a * weights[i];
    den += weights[i];
  }
  const double value = num / den;
  // d/da_i of S = sum a w / sum w with w = exp(alpha a):
  //   w_i (1 + alpha a_i - alpha S) / sum w
  for (std::size_t i = 0; i < delta.size(); ++i) {
    const double a = std::abs(delta[i]);
    const double sign = delta[i] > 0.0 ? 1.0 : (delta[i] < 0.0 ? -1.0 : 0.0);
    grad[i] = sign * weights[i] * (1.0 + alpha * (a - value)) / den;
  }
  return grad;
}

double measure(const PerturbationMeasure& m, const Vector& delta) {
  switch (m.kind) {
    case PerturbationMeasure::Kind::kSquaredL2: {
      double s = 0.0;
      for (double d : delta) s += d * d;
      return s;
    }
    case PerturbationMeasure::Kind::kSmoothLinf:
      return smooth_linf(delta, m.alpha);
  }
  return 0.0;
}

Vector measure_gradient(const PerturbationMeasure& m, const Vector& delta) {
  switch (m.kind) {
    case PerturbationMeasure::Kind::kSquaredL2: {
      Vector g(delta.size());
      for (std::size_t i = 0; i < delta.size(); ++i) g[i] = 2.0 * delta[i];
      return g;
    }
    case PerturbationMeasure::Kind::kSmoothLinf:
      return smooth_linf_gradient(delta, m.alpha);
  }
  return Vector(delta.size(), 0.0);
}

double exact_norm(const Vector& delta, Norm p) {
  if (p == Norm::kLinf) {
    double top = 0.0;
    for (double d : delta) top = std::max(top, std::abs(d));
    return top;
  }
  double s = 0.0;
  for (double d : delta) s += d * d;
  return std::sqrt(s);
}

Vector project_box(Vector x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  return x;
}

Vector difference(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvalidInput("vector lengths differ");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace logbarrier
