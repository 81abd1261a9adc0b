#pragma once

#include <filesystem>
#include <string>

#include "landscape/network.hpp"

namespace landscape {

// JSON documents, matrices row-major, layers ascending:
//   network: {"dims":[...],"activation":"sigmoid","weights":[[[...]]],"biases":[[...]]}
//   dataset: {"inputs":[[...]],"targets":[...]}
// Doubles are written with round-trip precision. Malformed input raises
// FormatError; shape problems surface as ShapeError from the constructors.

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

std::string dataset_to_json(const Dataset& data);
Dataset dataset_from_json(const std::string& text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace landscape
