#include "plumesr/config.hpp"

#include <fstream>
#include <stdexcept>

namespace plumesr {

using nlohmann::json;

WindModel PipelineConfig::make_wind() const {
  Rng64 rng(wind_seed);
  return sample_wind(rng, wind);
}

json PipelineConfig::to_json() const {
  return {{"layout", layout.to_json()},
          {"wind",
           {{"u0", wind.u0}, {"n_terms", wind.n_terms}, {"max_amp_ratio", wind.max_amp_ratio},
            {"period", wind.period}, {"seed", wind_seed}}},
          {"dataset", dataset.to_json()}};
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  if (j.contains("layout")) c.layout = SceneLayout::from_json(j.at("layout"));
  if (j.contains("wind")) {
    const json& w = j.at("wind");
    c.wind.u0 = w.value("u0", c.wind.u0);
    c.wind.n_terms = w.value("n_terms", c.wind.n_terms);
    c.wind.max_amp_ratio = w.value("max_amp_ratio", c.wind.max_amp_ratio);
    c.wind.period = w.value("period", c.wind.period);
    c.wind_seed = w.value("seed", c.wind_seed);
  }
  if (j.contains("dataset")) c.dataset = DatasetConfig::from_json(j.at("dataset"));
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  return from_json(json::parse(is));
}

}  // namespace plumesr
