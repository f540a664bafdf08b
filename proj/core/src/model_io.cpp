#include "logbarrier/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "logbarrier/errors.hpp"

namespace logbarrier {
namespace {

using nlohmann::json;

const json& require(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key)) {
    throw ParseError(where + "." + key + ": missing field");
  }
  return node.at(key);
}

std::size_t read_size(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_number_unsigned()) {
    throw ParseError(where + "." + key + ": expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

double read_real(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

Vector read_reals(const json& node, const char* key, const std::string& where) {
  const json& v = require(node, key, where);
  if (!v.is_array()) throw ParseError(where + "." + key + ": expected an array");
  Vector out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw ParseError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace

std::string model_to_string(const Classifier& model) {
  json doc;
  doc["input_dim"] = model.input_dim();
  doc["num_classes"] = model.num_classes();
  doc["temperature"] = model.temperature();
  json layers = json::array();
  for (const DenseLayer& layer : model.layers()) {
    layers.push_back({{"rows", layer.rows},
                      {"cols", layer.cols},
                      {"weights", layer.weights},
                      {"bias", layer.bias},
                      {"activation", std::string(to_string(layer.activation))}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(1) + "\n";
}

Classifier model_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model document: ") + e.what());
  }
  const std::string root = "model";
  const std::size_t input_dim = read_size(doc, "input_dim", root);
  const std::size_t num_classes = read_size(doc, "num_classes", root);
  const double temperature = read_real(doc, "temperature", root);
  const json& layer_nodes = require(doc, "layers", root);
  if (!layer_nodes.is_array()) throw ParseError("model.layers: expected an array");

  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i < layer_nodes.size(); ++i) {
    const std::string where = "model.layers[" + std::to_string(i) + "]";
    const json& node = layer_nodes[i];
    DenseLayer layer;
    layer.rows = read_size(node, "rows", where);
    layer.cols = read_size(node, "cols", where);
    layer.weights = read_reals(node, "weights", where);
    layer.bias = read_reals(node, "bias", where);
    const json& act = require(node, "activation", where);
    if (!act.is_string()) throw ParseError(where + ".activation: expected a string");
    try {
      layer.activation = activation_from_string(act.get<std::string>());
    } catch (const InvalidInput& e) {
      throw ParseError(where + ".activation: " + e.what());
    }
    layers.push_back(std::move(layer));
  }

  Classifier model(std::move(layers), temperature);
  if (model.input_dim() != input_dim || model.num_classes() != num_classes) {
    throw InvalidModel("declared input_dim/num_classes (" + std::to_string(input_dim) + ", " +
                       std::to_string(num_classes) + ") disagree with the layers (" +
                       std::to_string(model.input_dim()) + ", " +
                       std::to_string(model.num_classes()) + ")");
  }
  return model;
}

void save_model(const Classifier& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << model_to_string(model);
  if (!out) throw IoError("failed writing " + path.string());
}

Classifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_string(buffer.str());
}

}  // namespace logbarrier
