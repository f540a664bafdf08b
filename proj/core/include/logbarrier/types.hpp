#pragma once

#include <cstddef>
#include <vector>

namespace logbarrier {

using Vector = std::vector<double>;

// A flat pixel vector in the unit box together with its true class.
struct Sample {
  Vector pixels;
  std::size_t label = 0;
};

// Throws InvalidInput if a pixel lies outside [0,1] or is not finite.
void validate_sample(const Sample& sample);

}  // namespace logbarrier
