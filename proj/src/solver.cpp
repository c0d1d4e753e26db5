#include "plumesr/solver.hpp"

#include <string>

#include "plumesr/kernels.hpp"

namespace plumesr {

namespace {

constexpr int kStencilMin = 5;

void require_stencil_extent(const Field& c) {
  if (c.width() < kStencilMin || c.height() < kStencilMin) {
    throw DimensionError("4th-order stencil needs at least 5 cells per axis, got " +
                         std::to_string(c.width()) + "x" + std::to_string(c.height()));
  }
}

kernels::GridShape shape_of(const Field& f) { return {f.width(), f.height(), f.dx()}; }

}  // namespace

void SolverConfig::validate() const {
  if (width < kStencilMin || height < kStencilMin) throw DimensionError("solver grid below 5x5");
  if (!(dx > 0.0) || !(dt > 0.0)) throw std::invalid_argument("dx and dt must be positive");
  if (kappa < 0.0) throw std::invalid_argument("kappa must be non-negative");
}

void SolverConfig::check_cfl(const WindModel& wind) const {
  validate();
  const double u_max = wind.max_speed();
  if (u_max > 0.0 && dt > 0.5 * dx / u_max) {
    throw CflError("advective CFL violated: dt=" + std::to_string(dt) + " > 0.5*dx/u_max=" +
                   std::to_string(0.5 * dx / u_max));
  }
  if (kappa > 0.0 && dt > 0.25 * dx * dx / kappa) {
    throw CflError("diffusive CFL violated: dt=" + std::to_string(dt) + " > 0.25*dx^2/kappa=" +
                   std::to_string(0.25 * dx * dx / kappa));
  }
}

PdeTerms pde_terms(const Field& c, Vec2 u, const Field& source, double kappa) {
  require_stencil_extent(c);
  require_same_grid(c, source, "pde_terms source");
  PdeTerms t{Field(c.width(), c.height(), c.dx()), Field(c.width(), c.height(), c.dx()), source,
             Field(c.width(), c.height(), c.dx())};
  kernels::omp::transport_terms(c.values(), shape_of(c), {u.x, u.y, kappa}, t.advection.values(),
                                t.diffusion.values());
  for (std::size_t i = 0; i < c.size(); ++i) {
    t.dcdt[i] = t.advection[i] + t.diffusion[i] + t.source[i];
  }
  return t;
}

PdeTerms pde_terms(const Field& c, Vec2 u, const SourceRaster& sources, double t, double kappa) {
  return pde_terms(c, u, sources.evaluate(t), kappa);
}

Rk4Stepper::Rk4Stepper(SolverConfig config, WindModel wind, SourceRaster sources)
    : config_(config), wind_(std::move(wind)), sources_(std::move(sources)) {
  config_.check_cfl(wind_);
  if (!sources_.empty() && (sources_.width() != config_.width || sources_.height() != config_.height ||
                            sources_.dx() != config_.dx)) {
    throw DimensionError("source raster grid differs from solver grid");
  }
  const std::size_t n = static_cast<std::size_t>(config_.width) * config_.height;
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  stage_ = Field(config_.width, config_.height, config_.dx);
}

void Rk4Stepper::rhs(const Field& c, double t, std::vector<double>& out) {
  const Vec2 u = wind_.at(t);
  kernels::omp::transport_rhs(c.values(), shape_of(c), {u.x, u.y, config_.kappa}, out);
  sources_.accumulate(t, out);
}

void Rk4Stepper::step(Field& c, double t) {
  if (c.width() != config_.width || c.height() != config_.height || c.dx() != config_.dx) {
    throw DimensionError("field grid differs from solver grid");
  }
  const double h = config_.dt;
  // A zero field with no emission anywhere in [t, t+h] stays exactly zero.
  if (!sources_.any_active(t) && !sources_.any_active(t + 0.5 * h) && !sources_.any_active(t + h) &&
      c.all_zero()) {
    return;
  }
  rhs(c, t, k1_);
  kernels::omp::axpy(c.values(), 0.5 * h, k1_, stage_.values());
  rhs(stage_, t + 0.5 * h, k2_);
  kernels::omp::axpy(c.values(), 0.5 * h, k2_, stage_.values());
  rhs(stage_, t + 0.5 * h, k3_);
  kernels::omp::axpy(c.values(), h, k3_, stage_.values());
  rhs(stage_, t + h, k4_);
  kernels::omp::rk4_combine(c.values(), h, k1_, k2_, k3_, k4_, c.values());
}

Field step_rk4(const Field& c, double t, const SolverConfig& config, const WindModel& wind,
               const SceneSpec& scene) {
  Rk4Stepper stepper(config, wind, SourceRaster(scene, config.width, config.height, config.dx));
  Field out = c;
  stepper.step(out, t);
  return out;
}

std::vector<Field> integrate(const SolverConfig& config, const WindModel& wind, const SceneSpec& scene,
                             int n_steps, int snapshot_every, const Field* initial) {
  if (n_steps < 0) throw std::invalid_argument("n_steps must be >= 0");
  if (snapshot_every < 1) throw std::invalid_argument("snapshot_every must be >= 1");
  Rk4Stepper stepper(config, wind, SourceRaster(scene, config.width, config.height, config.dx));
  Field c = initial ? *initial : Field(config.width, config.height, config.dx);
  std::vector<Field> snapshots{c};
  for (int n = 0; n < n_steps; ++n) {
    stepper.step(c, config.t0 + n * config.dt);
    if ((n + 1) % snapshot_every == 0) snapshots.push_back(c);
  }
  return snapshots;
}

}  // namespace plumesr
