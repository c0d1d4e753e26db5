#pragma once

#include <cstdint>
#include <filesystem>

#include "json.hpp"
#include "plumesr/dataset.hpp"
#include "plumesr/scene.hpp"
#include "plumesr/wind.hpp"

namespace plumesr {

/// Everything needed to reproduce a corpus, as one JSON document:
///   {"layout": {...}, "wind": {..., "seed": N}, "dataset": {...}}
/// Missing keys take the defaults below.
struct PipelineConfig {
  SceneLayout layout;
  WindParams wind;
  std::uint64_t wind_seed = 2021;
  DatasetConfig dataset;

  WindModel make_wind() const;

  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace plumesr
