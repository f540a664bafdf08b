#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "logbarrier/classifier.hpp"
#include "logbarrier/types.hpp"

namespace logbarrier {

struct TrainOptions {
  // Hidden layer widths; empty means a single affine (softmax regression) layer.
  std::vector<std::size_t> hidden;
  std::size_t num_classes = 2;
  std::size_t epochs = 500;
  double learning_rate = 0.1;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  Classifier model;
  double train_accuracy = 0.0;
  double final_loss = 0.0;
};

// Full-batch gradient descent on mean cross-entropy. Deterministic for a fixed
// seed. Throws TrainingDiverged if the loss becomes non-finite.
TrainResult train_toy(const std::vector<Sample>& dataset, const TrainOptions& options);

double accuracy(const Classifier& model, const std::vector<Sample>& dataset);

// Isotropic Gaussian blobs in the unit box, one per class, with centres spread
// evenly on a circle around the box centre. Pixels are clamped to [0,1].
std::vector<Sample> make_blobs(std::size_t count, std::size_t num_classes, std::size_t dim,
                               double spread, std::uint64_t seed);

}  // namespace logbarrier
