#pragma once

// Debug serialization of a Dataset as a directory:
//   A.csv     edge list "i,j" with i<j, one edge per line
//   X.csv     N rows x d columns, 17 significant digits
//   y.csv     one label per line
//   meta.json model inputs, derived parameters, seed and mu

#include <filesystem>

#include <nlohmann/json.hpp>

#include "csbm/model.hpp"

namespace csbm {

nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(const nlohmann::json& j);

void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace csbm
