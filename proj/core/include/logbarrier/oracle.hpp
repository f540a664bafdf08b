#pragma once

#include <cstddef>

#include "logbarrier/classifier.hpp"
#include "logbarrier/perturbation.hpp"
#include "logbarrier/types.hpp"

namespace logbarrier {

struct LinearOracle {
  double distance = 0.0;
  // Class whose boundary is nearest (or one that already outscores the label).
  std::size_t nearest_class = 0;
  // Closest point on that boundary, ignoring the [0,1] box.
  Vector projection;
  bool projection_in_box = true;
};

// Exact minimum distance to the decision boundary of a single-affine-layer
// classifier, ignoring the box:
//
//   min_{j != c} ((w_c - w_j).x + b_c - b_j) / |w_c - w_j|_q
//
// with q the dual norm (2 for l2, 1 for linf), clipped at 0 when the sample is
// already misclassified. The softmax temperature does not move the boundary.
// Throws UnsupportedModel for networks with more than one layer.
LinearOracle linear_oracle_detail(const Classifier& model, const Sample& sample, Norm norm);

double linear_oracle(const Classifier& model, const Sample& sample, Norm norm);

}  // namespace logbarrier
