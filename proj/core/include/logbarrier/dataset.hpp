#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <vector>

#include "logbarrier/types.hpp"

namespace logbarrier {

// CSV dataset: one row per sample, pixel columns followed by an integer label.
// A header row is skipped when its first cell is not numeric.
//
// Ragged rows or unparsable cells raise ParseError; pixels outside [0,1]
// raise ValidationError. Both name the offending line.
std::vector<Sample> read_dataset(std::istream& in, std::optional<std::size_t> expected_dim = {});
std::vector<Sample> load_dataset(const std::filesystem::path& path,
                                 std::optional<std::size_t> expected_dim = {});

void save_dataset(const std::vector<Sample>& samples, const std::filesystem::path& path);

}  // namespace logbarrier
