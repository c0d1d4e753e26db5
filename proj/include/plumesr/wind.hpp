#pragma once

#include <vector>

#include "json.hpp"
#include "plumesr/rng.hpp"

namespace plumesr {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// One harmonic of the wind fluctuation. Wavenumbers are 2*pi*n/period.
struct WindTerm {
  double amplitude_x = 0.0;
  double amplitude_y = 0.0;
  int harmonic_x = 1;
  int harmonic_y = 1;
  double phase_x = 0.0;
  double phase_y = 0.0;
  friend bool operator==(const WindTerm&, const WindTerm&) = default;
};

/// Spatially constant wind: mean u0 along x plus harmonic fluctuations in time.
/// Integer harmonics make the velocity exactly `period`-periodic.
class WindModel {
public:
  static constexpr double kMaxAmplitudeRatio = 0.2;

  WindModel() = default;
  WindModel(double u0, double period, std::vector<WindTerm> terms = {});

  double u0() const { return u0_; }
  double period() const { return period_; }
  const std::vector<WindTerm>& terms() const { return terms_; }

  Vec2 at(double t) const;
  /// Upper bound on |u_x| and |u_y| over all t (for CFL checks).
  double max_speed() const;

  nlohmann::json to_json() const;
  static WindModel from_json(const nlohmann::json& j);

  friend bool operator==(const WindModel&, const WindModel&) = default;

private:
  double u0_ = 0.0;
  double period_ = 1.0;
  std::vector<WindTerm> terms_;
};

inline Vec2 wind_at(const WindModel& m, double t) { return m.at(t); }

struct WindParams {
  double u0 = 0.5;
  int n_terms = 3;
  double max_amp_ratio = 0.1;
  double period = 200.0;
};

/// Amplitudes uniform in [0, max_amp_ratio*u0], phases uniform in [0, 2pi),
/// harmonic indices uniform in [1, 4].
WindModel sample_wind(Rng64& rng, const WindParams& params);

}  // namespace plumesr
