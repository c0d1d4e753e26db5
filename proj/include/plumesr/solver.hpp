#pragma once

#include <stdexcept>
#include <vector>

#include "plumesr/field.hpp"
#include "plumesr/source.hpp"
#include "plumesr/wind.hpp"

namespace plumesr {

class CflError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Grid and time-stepping parameters. Diffusion is isotropic: K = kappa * I.
struct SolverConfig {
  int width = 100;
  int height = 50;
  double dx = 1.0;
  double dt = 0.2;
  double kappa = 0.04;
  double t0 = 0.0;

  /// Throws CflError unless dt <= 0.5*dx/u_max and dt <= 0.25*dx^2/kappa.
  void check_cfl(const WindModel& wind) const;
  void validate() const;
};

/// Per-term breakdown of dC/dt; dcdt = advection + diffusion + source.
struct PdeTerms {
  Field advection;
  Field diffusion;
  Field source;
  Field dcdt;
};

/// Right-hand side terms with 4th-order periodic stencils. Requires >= 5 cells per axis.
PdeTerms pde_terms(const Field& c, Vec2 wind_velocity, const Field& source, double kappa);
PdeTerms pde_terms(const Field& c, Vec2 wind_velocity, const SourceRaster& sources, double t,
                   double kappa);

/// Classical RK4 stepper with reusable work buffers.
class Rk4Stepper {
public:
  Rk4Stepper(SolverConfig config, WindModel wind, SourceRaster sources);

  /// Advances `c` in place from t to t + dt.
  void step(Field& c, double t);

  const SolverConfig& config() const { return config_; }

private:
  void rhs(const Field& c, double t, std::vector<double>& out);

  SolverConfig config_;
  WindModel wind_;
  SourceRaster sources_;
  std::vector<double> k1_, k2_, k3_, k4_;
  Field stage_;
};

Field step_rk4(const Field& c, double t, const SolverConfig& config, const WindModel& wind,
               const SceneSpec& scene);

/// Snapshots at steps 0, snapshot_every, 2*snapshot_every, ... <= n_steps.
/// Snapshot k is at time t0 + k*snapshot_every*dt. Starts from `initial`
/// (zero field when omitted).
std::vector<Field> integrate(const SolverConfig& config, const WindModel& wind, const SceneSpec& scene,
                             int n_steps, int snapshot_every, const Field* initial = nullptr);

}  // namespace plumesr
