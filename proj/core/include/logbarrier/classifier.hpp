#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "logbarrier/types.hpp"

namespace logbarrier {

enum class Activation { kIdentity, kRelu };

std::string_view to_string(Activation activation);
Activation activation_from_string(std::string_view name);

// Dense affine layer y = act(W x + b). Weights are stored row-major with
// `rows` outputs and `cols` inputs.
struct DenseLayer {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector weights;
  Vector bias;
  Activation activation = Activation::kIdentity;

  double weight(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }
};

struct ForwardResult {
  Vector logits;
  Vector probs;
};

// Gaps f_(j) - f_c for the j-th largest probability among classes other than
// c, with the gradient of each gap with respect to the input pixels.
struct GapGradient {
  Vector gaps;
  std::vector<std::size_t> ranked_classes;
  std::vector<Vector> gradients;
};

// Layered dense network with a temperature-scaled softmax head:
// probs = softmax(logits / temperature).
//
// Immutable after construction; every query is a pure function of its
// arguments and may be called concurrently.
class Classifier {
 public:
  Classifier() = default;
  // Throws InvalidModel if the layers do not chain or temperature <= 0.
  Classifier(std::vector<DenseLayer> layers, double temperature = 1.0);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  double temperature() const { return temperature_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  // Same weights, different softmax temperature.
  Classifier with_temperature(double temperature) const;

  ForwardResult forward(const Vector& x) const;
  Vector logits(const Vector& x) const;
  Vector probabilities(const Vector& x) const;

  // Argmax of the logits, ties broken towards the lowest index.
  std::size_t predict(const Vector& x) const;

  // True iff class c is not among the top k classes, i.e. the k-th largest
  // probability among the other classes strictly exceeds f_c.
  bool is_misclassified(const Vector& x, std::size_t c, std::size_t k = 1) const;

  // Gaps are ranked by probability with ties going to the lower index.
  GapGradient gap_and_gradient(const Vector& x, std::size_t c, std::size_t k = 1) const;

  // Gaps only; cheaper than gap_and_gradient when no gradient is needed.
  Vector gaps(const Vector& x, std::size_t c, std::size_t k = 1) const;

  // Cross-entropy -log p_c(x), evaluated through log-softmax.
  double loss(const Vector& x, std::size_t c) const;
  Vector loss_gradient(const Vector& x, std::size_t c) const;

 private:
  struct Tape {
    std::vector<Vector> inputs;       // input to each layer
    std::vector<Vector> preactivations;
    Vector logits;
    Vector probs;
  };

  Tape record(const Vector& x) const;
  // Pull a gradient with respect to the logits back to the input pixels.
  Vector backward(const Tape& tape, Vector grad_logits) const;
  void check_input(const Vector& x) const;
  void check_class(std::size_t c, std::size_t k) const;

  std::vector<DenseLayer> layers_;
  double temperature_ = 1.0;
  std::size_t input_dim_ = 0;
  std::size_t num_classes_ = 0;
};

// Numerically stable softmax of logits / temperature.
Vector softmax(const Vector& logits, double temperature = 1.0);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Vector& values);

// Classes other than c ordered by descending value, ties to lower index.
std::vector<std::size_t> rank_excluding(const Vector& values, std::size_t c);

}  // namespace logbarrier
