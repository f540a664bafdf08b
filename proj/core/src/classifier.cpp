#include "logbarrier/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "logbarrier/errors.hpp"

namespace logbarrier {

void validate_sample(const Sample& sample) {
  for (std::size_t i = 0; i < sample.pixels.size(); ++i) {
    const double v = sample.pixels[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidInput("pixel " + std::to_string(i) + " = " + std::to_string(v) +
                         " lies outside [0,1]");
    }
  }
}

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kRelu:
      return "relu";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "relu") return Activation::kRelu;
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

Vector softmax(const Vector& logits, double temperature) {
  Vector out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp((logits[i] - top) / temperature);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::size_t argmax(const Vector& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<std::size_t> rank_excluding(const Vector& values, std::size_t c) {
  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != c) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

Classifier::Classifier(std::vector<DenseLayer> layers, double temperature)
    : layers_(std::move(layers)), temperature_(temperature) {
  if (layers_.empty()) throw InvalidModel("classifier needs at least one layer");
  if (!(temperature_ > 0.0) || !std::isfinite(temperature_)) {
    throw InvalidModel("temperature must be positive, got " + std::to_string(temperature_));
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const DenseLayer& layer = layers_[i];
    if (layer.rows == 0 || layer.cols == 0) {
      throw InvalidModel("layer " + std::to_string(i) + " has a zero dimension");
    }
    if (layer.weights.size() != layer.rows * layer.cols) {
      throw InvalidModel("layer " + std::to_string(i) + " has " +
                         std::to_string(layer.weights.size()) + " weights, expected " +
                         std::to_string(layer.rows * layer.cols));
    }
    if (layer.bias.size() != layer.rows) {
      throw InvalidModel("layer " + std::to_string(i) + " bias has length " +
                         std::to_string(layer.bias.size()) + ", expected " +
                         std::to_string(layer.rows));
    }
    if (i > 0 && layers_[i - 1].rows != layer.cols) {
      throw InvalidModel("layer " + std::to_string(i) + " expects " + std::to_string(layer.cols) +
                         " inputs but layer " + std::to_string(i - 1) + " produces " +
                         std::to_string(layers_[i - 1].rows));
    }
  }
  input_dim_ = layers_.front().cols;
  num_classes_ = layers_.back().rows;
  if (num_classes_ < 2) throw InvalidModel("classifier needs at least two classes");
}

Classifier Classifier::with_temperature(double temperature) const {
  return Classifier(layers_, temperature);
}

void Classifier::check_input(const Vector& x) const {
  if (x.size() != input_dim_) {
    throw InvalidInput("input has length " + std::to_string(x.size()) + ", model expects " +
                       std::to_string(input_dim_));
  }
}

void Classifier::check_class(std::size_t c, std::size_t k) const {
  if (c >= num_classes_) {
    throw InvalidInput("class " + std::to_string(c) + " out of range for " +
                       std::to_string(num_classes_) + " classes");
  }
  if (k < 1 || k >= num_classes_) {
    throw InvalidInput("top-k must satisfy 1 <= k < " + std::to_string(num_classes_) + ", got " +
                       std::to_string(k));
  }
}

Classifier::Tape Classifier::record(const Vector& x) const {
  check_input(x);
  Tape tape;
  tape.inputs.reserve(layers_.size());
  tape.preactivations.reserve(layers_.size());
  Vector current = x;
  for (const DenseLayer& layer : layers_) {
    Vector z(layer.bias);
    for (std::size_t r = 0; r < layer.rows; ++r) {
      const double* row = &layer.weights[r * layer.cols];
      double acc = 0.0;
      for (std::size_t c = 0; c < layer.cols; ++c) acc += row[c] * current[c];
      z[r] += acc;
    }
    tape.inputs.push_back(std::move(current));
    current = z;
    if (layer.activation == Activation::kRelu) {
      for (double& v : current) v = v > 0.0 ? v : 0.0;
    }
    tape.preactivations.push_back(std::move(z));
  }
  tape.logits = std::move(current);
  tape.probs = softmax(tape.logits, temperature_);
  return tape;
}

Vector Classifier::backward(const Tape& tape, Vector grad) const {
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const DenseLayer& layer = layers_[li];
    if (layer.activation == Activation::kRelu) {
      // Subgradient of ReLU at 0 is taken as 0.
      const Vector& z = tape.preactivations[li];
      for (std::size_t r = 0; r < layer.rows; ++r) {
        if (!(z[r] > 0.0)) grad[r] = 0.0;
      }
    }
    Vector next(layer.cols, 0.0);
    for (std::size_t r = 0; r < layer.rows; ++r) {
      const double g = grad[r];
      if (g == 0.0) continue;
      const double* row = &layer.weights[r * layer.cols];
      for (std::size_t c = 0; c < layer.cols; ++c) next[c] += g * row[c];
    }
    grad = std::move(next);
  }
  return grad;
}

ForwardResult Classifier::forward(const Vector& x) const {
  Tape tape = record(x);
  return {std::move(tape.logits), std::move(tape.probs)};
}

Vector Classifier::logits(const Vector& x) const { return record(x).logits; }

Vector Classifier::probabilities(const Vector& x) const { return record(x).probs; }

std::size_t Classifier::predict(const Vector& x) const { return argmax(record(x).logits); }

bool Classifier::is_misclassified(const Vector& x, std::size_t c, std::size_t k) const {
  return gaps(x, c, k).back() > 0.0;
}

Vector Classifier::gaps(const Vector& x, std::size_t c, std::size_t k) const {
  check_class(c, k);
  const Vector probs = record(x).probs;
  const std::vector<std::size_t> order = rank_excluding(probs, c);
  Vector out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = probs[order[j]] - probs[c];
  return out;
}

GapGradient Classifier::gap_and_gradient(const Vector& x, std::size_t c, std::size_t k) const {
  check_class(c, k);
  const Tape tape = record(x);
  const Vector& p = tape.probs;
  const std::vector<std::size_t> order = rank_excluding(p, c);

  GapGradient out;
  out.gaps.resize(k);
  out.ranked_classes.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  out.gradients.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t other = order[j];
    out.gaps[j] = p[other] - p[c];
    // d p_i / d z_m = p_i (delta_im - p_m) / T, so for g = p_o - p_c:
    // d g / d z_m = (p_o (delta_om - p_m) - p_c (delta_cm - p_m)) / T.
    Vector grad_logits(num_classes_);
    for (std::size_t m = 0; m < num_classes_; ++m) {
      const double d_other = p[other] * ((m == other ? 1.0 : 0.0) - p[m]);
      const double d_true = p[c] * ((m == c ? 1.0 : 0.0) - p[m]);
      grad_logits[m] = (d_other - d_true) / temperature_;
    }
    out.gradients.push_back(backward(tape, std::move(grad_logits)));
  }
  return out;
}

double Classifier::loss(const Vector& x, std::size_t c) const {
  check_class(c, 1);
  const Vector z = record(x).logits;
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp((v - top) / temperature_);
  return std::log(total) - (z[c] - top) / temperature_;
}

Vector Classifier::loss_gradient(const Vector& x, std::size_t c) const {
  check_class(c, 1);
  const Tape tape = record(x);
  Vector grad_logits(num_classes_);
  for (std::size_t m = 0; m < num_classes_; ++m) {
    grad_logits[m] = (tape.probs[m] - (m == c ? 1.0 : 0.0)) / temperature_;
  }
  return backward(tape, std::move(grad_logits));
}

}  // namespace logbarrier
