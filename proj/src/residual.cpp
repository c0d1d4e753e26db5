#include "plumesr/residual.hpp"

#include <cmath>
#include <string>

#include "plumesr/kernels.hpp"

namespace plumesr {

using nlohmann::json;

namespace {

constexpr int kResidualMin = 3;

void check_stack(const SnapshotStack& s, const PhysicsMeta& meta) {
  if (s.width() < kResidualMin || s.height() < kResidualMin) {
    throw DimensionError("residual needs at least 3 cells per axis");
  }
  if (std::abs(s.dx() - meta.dx) > 1e-12 * meta.dx) {
    throw DimensionError("stack spacing " + std::to_string(s.dx()) + " differs from metadata spacing " +
                         std::to_string(meta.dx));
  }
}

Field apply_operator(const std::array<const Field*, 3>& ch, const PhysicsMeta& meta) {
  const Field& mid = *ch[1];
  Field out(mid.width(), mid.height(), mid.dx());
  const Vec2 u = meta.wind.at(meta.t_center);
  kernels::omp::residual_operator(ch[0]->values(), mid.values(), ch[2]->values(),
                                  {mid.width(), mid.height(), mid.dx()}, {u.x, u.y, meta.kappa},
                                  meta.dt_snap, out.values());
  return out;
}

}  // namespace

void PhysicsMeta::validate() const {
  if (!(dx > 0.0) || !(dt_snap > 0.0)) throw std::invalid_argument("physics metadata needs dx, dt_snap > 0");
  if (kappa < 0.0) throw std::invalid_argument("physics metadata needs kappa >= 0");
}

json PhysicsMeta::to_json() const {
  return {{"wind", wind.to_json()}, {"scene", scene.to_json()}, {"kappa", kappa},        {"dx", dx},
          {"dt_snap", dt_snap},     {"t_center", t_center},     {"source_scale", source_scale}};
}

PhysicsMeta PhysicsMeta::from_json(const json& j) {
  PhysicsMeta m;
  m.wind = WindModel::from_json(j.at("wind"));
  m.scene = SceneSpec::from_json(j.at("scene"));
  m.kappa = j.at("kappa").get<double>();
  m.dx = j.at("dx").get<double>();
  m.dt_snap = j.at("dt_snap").get<double>();
  m.t_center = j.at("t_center").get<double>();
  m.source_scale = j.value("source_scale", 1.0);
  m.validate();
  return m;
}

Field residual_field(const SnapshotStack& stack, const PhysicsMeta& meta) {
  meta.validate();
  check_stack(stack, meta);
  Field r = apply_operator({&stack.channels[0], &stack.channels[1], &stack.channels[2]}, meta);
  SourceRaster sources(meta.scene, stack.width(), stack.height(), stack.dx());
  sources.accumulate(meta.t_center, r.values(), -meta.source_scale);
  return r;
}

double physics_loss(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta) {
  meta.validate();
  require_same_grid(sr, hr, "physics_loss");
  check_stack(sr, meta);
  std::array<Field, 3> diff{sr.channels[0] - hr.channels[0], sr.channels[1] - hr.channels[1],
                            sr.channels[2] - hr.channels[2]};
  const Field r = apply_operator({&diff[0], &diff[1], &diff[2]}, meta);
  double acc = 0.0;
  for (double v : r.values()) acc += std::abs(v);
  return acc / static_cast<double>(r.size());
}

double pixel_loss(const SnapshotStack& sr, const SnapshotStack& hr) {
  require_same_grid(sr, hr, "pixel_loss");
  double acc = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < 3; ++c) {
    const auto a = sr.channels[c].values();
    const auto b = hr.channels[c].values();
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    n += a.size();
  }
  return acc / static_cast<double>(n);
}

double total_loss(std::span<const SnapshotStack> sr, std::span<const SnapshotStack> hr,
                  std::span<const PhysicsMeta> meta, const LossWeights& weights) {
  if (weights.eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  if (weights.batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  const auto n = static_cast<std::size_t>(weights.batch_size);
  if (sr.size() != n || hr.size() != n || meta.size() != n) {
    throw DimensionError("total_loss: batch lists must all have batch_size entries");
  }
  double pix = 0.0;
  double phys = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    pix += pixel_loss(sr[i], hr[i]);
    if (weights.eta != 0.0) phys += physics_loss(sr[i], hr[i], meta[i]);
  }
  return pix / static_cast<double>(n) + weights.eta * (phys / static_cast<double>(n));
}

double total_loss(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta,
                  const LossWeights& weights) {
  LossWeights single = weights;
  single.batch_size = 1;
  return total_loss(std::span(&sr, 1), std::span(&hr, 1), std::span(&meta, 1), single);
}

}  // namespace plumesr
