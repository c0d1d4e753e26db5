#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "plumesr/field.hpp"
#include "plumesr/rng.hpp"
#include "plumesr/solver.hpp"
#include "plumesr/source.hpp"
#include "plumesr/wind.hpp"

namespace plumesr {

/// Raised by compose when a scene cannot be assembled from the bank.
class CompositionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Grids, time line and source shape shared by the LR and HR simulations.
///
/// Sources switch on at `phase * period / n_phases + m * period` for integer
/// m >= 0 and stay active for `source_duration`. While active a source emits
/// in pulses of `pulse_on` followed by `pulse_off` of silence; pulse_off = 0
/// means continuous emission. Centres sit on LR cell centres.
struct SceneLayout {
  int lr_width = 100;
  int lr_height = 50;
  double lr_dx = 1.0;
  int refinement = 4;
  double lr_dt = 0.2;
  double hr_dt = 0.05;
  double kappa = 0.04;
  double dt_snap = 5.0;
  int n_phases = 4;
  int run_snapshots = 80;
  double source_radius = 1.0;
  double source_duration = 200.0;
  double pulse_on = 200.0;
  double pulse_off = 0.0;

  SolverConfig lr_config() const;
  SolverConfig hr_config() const;
  int hr_width() const { return lr_width * refinement; }
  int hr_height() const { return lr_height * refinement; }
  double hr_dx() const { return lr_dx / refinement; }
  double domain_width() const { return lr_width * lr_dx; }
  double domain_height() const { return lr_height * lr_dx; }

  /// Snapshots per wind period; throws unless the period is a whole number of snapshots.
  int snapshots_per_period(const WindModel& wind) const;
  /// Snapshot offset between consecutive phases.
  int phase_stride(const WindModel& wind) const;
  /// Start time for a (phase, period-shift) pair.
  double start_time(const WindModel& wind, int phase, int shift) const;
  /// On/off intervals of a source that first switches on at t_on.
  std::vector<Interval> schedule_from(double t_on) const;
  /// Reference source centre used by the bank (centre of the middle LR cell).
  Vec2 reference_center() const;

  void validate(const WindModel& wind) const;

  nlohmann::json to_json() const;
  static SceneLayout from_json(const nlohmann::json& j);

  friend bool operator==(const SceneLayout&, const SceneLayout&) = default;
};

/// Random scene: centres uniform over LR cells, flux uniform in [0, max_flux],
/// start times uniform over the phase/period grid that fits in the run.
SceneSpec sample_scene(Rng64& rng, int n_sources, double max_flux, const SceneLayout& layout,
                       const WindModel& wind);

/// Unit-flux single-source runs at the reference centre, one per start phase,
/// at both resolutions. lr[p][k] / hr[p][k] is snapshot k of phase p.
struct SolutionBank {
  SceneLayout layout;
  WindModel wind;
  std::vector<std::vector<Field>> lr;
  std::vector<std::vector<Field>> hr;

  int n_phases() const { return static_cast<int>(lr.size()); }
  /// Largest value over every snapshot of either resolution.
  double peak() const;
  /// Reference source of a phase, as simulated.
  SourceSpec reference_source(int phase) const;
};

SolutionBank build_bank(const SceneLayout& layout, const WindModel& wind);

/// Saves / loads a bank as a container with f64 arrays "lr" and "hr".
void write_bank(const std::filesystem::path& path, const SolutionBank& bank);
SolutionBank read_bank(const std::filesystem::path& path);

struct ComposedPair {
  SnapshotStack lr;
  SnapshotStack hr;
  int t_index = 0;
  double t_center = 0.0;
};

/// Channels are snapshots t_index-1, t_index, t_index+1 of the superposed
/// field, each source contributing flux * (bank run of its phase shifted by
/// its cell offset and by whole wind periods), all multiplied by `scale`.
ComposedPair compose(const SceneSpec& scene, const SolutionBank& bank, int t_index, double scale = 1.0);

}  // namespace plumesr
