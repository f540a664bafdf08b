#include "logbarrier/oracle.hpp"

#include <cmath>
#include <limits>

#include "logbarrier/errors.hpp"

namespace logbarrier {

LinearOracle linear_oracle_detail(const Classifier& model, const Sample& sample, Norm norm) {
  if (model.layers().size() != 1) {
    throw UnsupportedModel("linear oracle needs a single affine layer, model has " +
                           std::to_string(model.layers().size()));
  }
  const DenseLayer& layer = model.layers().front();
  const Vector& x = sample.pixels;
  const std::size_t c = sample.label;
  if (x.size() != layer.cols) throw InvalidInput("sample length does not match the model input");
  if (c >= layer.rows) throw InvalidInput("label out of range");

  LinearOracle best;
  best.distance = std::numeric_limits<double>::infinity();
  best.nearest_class = c;
  Vector best_dw;
  double best_gap = 0.0;
  for (std::size_t j = 0; j < layer.rows; ++j) {
    if (j == c) continue;
    Vector dw(layer.cols);
    double gap = layer.bias[c] - layer.bias[j];
    for (std::size_t i = 0; i < layer.cols; ++i) {
      dw[i] = layer.weight(c, i) - layer.weight(j, i);
      gap += dw[i] * x[i];
    }
    double dual = 0.0;
    for (double w : dw) dual += norm == Norm::kL2 ? w * w : std::abs(w);
    if (norm == Norm::kL2) dual = std::sqrt(dual);
    double d;
    if (gap <= 0.0) {
      d = 0.0;
    } else if (dual == 0.0) {
      d = std::numeric_limits<double>::infinity();
    } else {
      d = gap / dual;
    }
    if (d < best.distance) {
      best.distance = d;
      best.nearest_class = j;
      best_dw = std::move(dw);
      best_gap = gap;
    }
  }

  best.projection = x;
  if (best.distance > 0.0 && std::isfinite(best.distance)) {
    if (norm == Norm::kL2) {
      double sq = 0.0;
      for (double w : best_dw) sq += w * w;
      for (std::size_t i = 0; i < x.size(); ++i) best.projection[i] -= best_gap / sq * best_dw[i];
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = best_dw[i] > 0.0 ? 1.0 : (best_dw[i] < 0.0 ? -1.0 : 0.0);
        best.projection[i] -= best.distance * s;
      }
    }
  }
  for (double v : best.projection) {
    if (!(v >= 0.0 && v <= 1.0)) best.projection_in_box = false;
  }
  return best;
}

double linear_oracle(const Classifier& model, const Sample& sample, Norm norm) {
  return linear_oracle_detail(model, sample, norm).distance;
}

}  // namespace logbarrier
