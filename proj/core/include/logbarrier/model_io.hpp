#pragma once

#include <filesystem>
#include <string>

#include "logbarrier/classifier.hpp"

namespace logbarrier {

// JSON model document:
//
//   {
//     "input_dim": M, "num_classes": N, "temperature": T,
//     "layers": [ { "rows": R, "cols": C, "weights": [... R*C row-major ...],
//                   "bias": [... R ...], "activation": "relu" | "identity" } ]
//   }
//
// Reals are written with round-trip precision.
std::string model_to_string(const Classifier& model);
Classifier model_from_string(const std::string& text);

void save_model(const Classifier& model, const std::filesystem::path& path);
Classifier load_model(const std::filesystem::path& path);

}  // namespace logbarrier
