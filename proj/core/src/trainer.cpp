#include "logbarrier/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "logbarrier/errors.hpp"

namespace logbarrier {
namespace {

struct Workspace {
  std::vector<Vector> activations;  // activations[0] = input
  std::vector<Vector> preactivations;
};

void forward_layer(const DenseLayer& layer, const Vector& in, Vector& pre, Vector& out) {
  pre = layer.bias;
  for (std::size_t r = 0; r < layer.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < layer.cols; ++c) acc += layer.weights[r * layer.cols + c] * in[c];
    pre[r] += acc;
  }
  out = pre;
  if (layer.activation == Activation::kRelu) {
    for (double& v : out) v = v > 0.0 ? v : 0.0;
  }
}

}  // namespace

double accuracy(const Classifier& model, const std::vector<Sample>& dataset) {
  if (dataset.empty()) return 0.0;
  std::size_t correct = 0;
  for (const Sample& s : dataset) correct += model.predict(s.pixels) == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

TrainResult train_toy(const std::vector<Sample>& dataset, const TrainOptions& options) {
  if (dataset.empty()) throw InvalidInput("training set is empty");
  if (options.num_classes < 2) throw InvalidInput("need at least two classes");
  const std::size_t dim = dataset.front().pixels.size();
  if (dim == 0) throw InvalidInput("samples have no pixels");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].pixels.size() != dim) {
      throw InvalidInput("sample " + std::to_string(i) + " has a different dimension");
    }
    if (dataset[i].label >= options.num_classes) {
      throw InvalidInput("sample " + std::to_string(i) + " label out of range");
    }
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::size_t> widths{dim};
  widths.insert(widths.end(), options.hidden.begin(), options.hidden.end());
  widths.push_back(options.num_classes);

  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    DenseLayer layer;
    layer.cols = widths[i];
    layer.rows = widths[i + 1];
    layer.weights.resize(layer.rows * layer.cols);
    layer.bias.assign(layer.rows, 0.0);
    const double scale = std::sqrt(2.0 / static_cast<double>(layer.cols));
    for (double& w : layer.weights) w = scale * normal(rng);
    layer.activation = i + 2 < widths.size() ? Activation::kRelu : Activation::kIdentity;
    layers.push_back(std::move(layer));
  }

  const double inv_n = 1.0 / static_cast<double>(dataset.size());
  const double temperature = options.temperature;
  Workspace ws;
  ws.activations.resize(layers.size() + 1);
  ws.preactivations.resize(layers.size());

  double loss = 0.0;
  for (std::size_t epoch = 0; epoch <= options.epochs; ++epoch) {
    std::vector<Vector> grad_w(layers.size());
    std::vector<Vector> grad_b(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      grad_w[l].assign(layers[l].weights.size(), 0.0);
      grad_b[l].assign(layers[l].bias.size(), 0.0);
    }

    loss = 0.0;
    for (const Sample& s : dataset) {
      ws.activations[0] = s.pixels;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        forward_layer(layers[l], ws.activations[l], ws.preactivations[l], ws.activations[l + 1]);
      }
      const Vector& z = ws.activations.back();
      const Vector p = softmax(z, temperature);
      const double top = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (double v : z) total += std::exp((v - top) / temperature);
      loss += (std::log(total) - (z[s.label] - top) / temperature) * inv_n;

      Vector delta(p.size());
      for (std::size_t m = 0; m < p.size(); ++m) {
        delta[m] = (p[m] - (m == s.label ? 1.0 : 0.0)) / temperature * inv_n;
      }
      for (std::size_t l = layers.size(); l-- > 0;) {
        const DenseLayer& layer = layers[l];
        if (layer.activation == Activation::kRelu) {
          for (std::size_t r = 0; r < layer.rows; ++r) {
            if (!(ws.preactivations[l][r] > 0.0)) delta[r] = 0.0;
          }
        }
        const Vector& in = ws.activations[l];
        Vector prev(layer.cols, 0.0);
        for (std::size_t r = 0; r < layer.rows; ++r) {
          grad_b[l][r] += delta[r];
          for (std::size_t c = 0; c < layer.cols; ++c) {
            grad_w[l][r * layer.cols + c] += delta[r] * in[c];
            prev[c] += delta[r] * layer.weights[r * layer.cols + c];
          }
        }
        delta = std::move(prev);
      }
    }

    if (!std::isfinite(loss)) {
      throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch));
    }
    // The last pass only measures the final loss.
    if (epoch == options.epochs) break;

    for (std::size_t l = 0; l < layers.size(); ++l) {
      for (std::size_t i = 0; i < layers[l].weights.size(); ++i) {
        layers[l].weights[i] -= options.learning_rate * grad_w[l][i];
      }
      for (std::size_t i = 0; i < layers[l].bias.size(); ++i) {
        layers[l].bias[i] -= options.learning_rate * grad_b[l][i];
      }
    }
  }

  TrainResult result{Classifier(std::move(layers), temperature), 0.0, loss};
  result.train_accuracy = accuracy(result.model, dataset);
  return result;
}

std::vector<Sample> make_blobs(std::size_t count, std::size_t num_classes, std::size_t dim,
                               double spread, std::uint64_t seed) {
  if (num_classes < 2 || dim == 0) throw InvalidInput("make_blobs needs >= 2 classes and dim >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, spread);

  std::vector<Vector> centres(num_classes, Vector(dim, 0.5));
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(num_classes);
    centres[k][0] = 0.5 + 0.25 * std::cos(angle);
    if (dim > 1) centres[k][1] = 0.5 + 0.25 * std::sin(angle);
  }

  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Sample s;
    s.label = i % num_classes;
    s.pixels.resize(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      s.pixels[d] = std::clamp(centres[s.label][d] + normal(rng), 0.0, 1.0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace logbarrier
