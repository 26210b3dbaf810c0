#pragma once

#include <string>

#include "credkit/hybrid.hpp"

namespace credkit::model {

// Versioned JSON document: trees as nested objects, MLP weights as row-major
// arrays, the ensemble weight, a config echo, and the seed.
void save_hybrid(const HybridModel& model, const TrainConfig& config, const std::string& path);

struct LoadedHybrid {
  HybridModel model;
  TrainConfig config;
};
LoadedHybrid load_hybrid(const std::string& path);

}  // namespace credkit::model
