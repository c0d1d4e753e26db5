#include "plumesr/wind.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plumesr {

using nlohmann::json;

WindModel::WindModel(double u0, double period, std::vector<WindTerm> terms)
    : u0_(u0), period_(period), terms_(std::move(terms)) {
  if (!(period_ > 0.0)) throw std::invalid_argument("wind period must be positive");
  const double bound = kMaxAmplitudeRatio * std::abs(u0_);
  for (const auto& term : terms_) {
    if (term.harmonic_x < 1 || term.harmonic_y < 1) {
      throw std::invalid_argument("wind harmonic indices must be >= 1");
    }
    if (std::abs(term.amplitude_x) > bound || std::abs(term.amplitude_y) > bound) {
      throw std::invalid_argument("wind fluctuation amplitude exceeds 0.2*u0");
    }
  }
}

Vec2 WindModel::at(double t) const {
  const double omega = 2.0 * std::numbers::pi / period_;
  Vec2 v{u0_, 0.0};
  for (const auto& term : terms_) {
    v.x += term.amplitude_x * std::cos(omega * term.harmonic_x * t + term.phase_x);
    v.y += term.amplitude_y * std::cos(omega * term.harmonic_y * t + term.phase_y);
  }
  return v;
}

double WindModel::max_speed() const {
  double ax = std::abs(u0_);
  double ay = 0.0;
  for (const auto& term : terms_) {
    ax += std::abs(term.amplitude_x);
    ay += std::abs(term.amplitude_y);
  }
  return std::max(ax, ay);
}

json WindModel::to_json() const {
  json terms = json::array();
  for (const auto& t : terms_) {
    terms.push_back({{"amplitude_x", t.amplitude_x},
                     {"amplitude_y", t.amplitude_y},
                     {"harmonic_x", t.harmonic_x},
                     {"harmonic_y", t.harmonic_y},
                     {"phase_x", t.phase_x},
                     {"phase_y", t.phase_y}});
  }
  return {{"u0", u0_}, {"period", period_}, {"terms", terms}};
}

WindModel WindModel::from_json(const json& j) {
  std::vector<WindTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({t.at("amplitude_x").get<double>(), t.at("amplitude_y").get<double>(),
                     t.at("harmonic_x").get<int>(), t.at("harmonic_y").get<int>(),
                     t.at("phase_x").get<double>(), t.at("phase_y").get<double>()});
  }
  return WindModel(j.at("u0").get<double>(), j.at("period").get<double>(), std::move(terms));
}

WindModel sample_wind(Rng64& rng, const WindParams& params) {
  if (params.max_amp_ratio > WindModel::kMaxAmplitudeRatio || params.max_amp_ratio < 0.0) {
    throw std::invalid_argument("max_amp_ratio must lie in [0, 0.2]");
  }
  if (params.n_terms < 0) throw std::invalid_argument("n_terms must be >= 0");
  const double amp_max = params.max_amp_ratio * std::abs(params.u0);
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<WindTerm> terms;
  terms.reserve(static_cast<std::size_t>(params.n_terms));
  for (int i = 0; i < params.n_terms; ++i) {
    WindTerm t;
    t.amplitude_x = amp_max * rng.next_f64();
    t.amplitude_y = amp_max * rng.next_f64();
    t.harmonic_x = static_cast<int>(rng.uniform_int(1, 4));
    t.harmonic_y = static_cast<int>(rng.uniform_int(1, 4));
    t.phase_x = two_pi * rng.next_f64();
    t.phase_y = two_pi * rng.next_f64();
    terms.push_back(t);
  }
  return WindModel(params.u0, params.period, std::move(terms));
}

}  // namespace plumesr
