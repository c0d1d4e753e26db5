#pragma once

#include <span>

#include "json.hpp"
#include "plumesr/field.hpp"
#include "plumesr/source.hpp"
#include "plumesr/wind.hpp"

namespace plumesr {

/// Physical context for evaluating the advection-diffusion residual of a stack.
struct PhysicsMeta {
  WindModel wind;
  SceneSpec scene;
  double kappa = 0.0;
  double dx = 1.0;          // spacing of the grid the residual is evaluated on
  double dt_snap = 1.0;
  double t_center = 0.0;    // time of the middle channel
  double source_scale = 1.0;  // stored values = concentration * source_scale

  void validate() const;
  nlohmann::json to_json() const;
  static PhysicsMeta from_json(const nlohmann::json& j);
};

struct LossWeights {
  double eta = 100.0;
  int batch_size = 1;
};

/// R = (C+ - C-)/(2 dt) + div(C u) - kappa lap(C) - S, all at the middle
/// snapshot, second-order centered differences, periodic wrap.
Field residual_field(const SnapshotStack& stack, const PhysicsMeta& meta);

/// Mean |R(sr) - R(hr)|. Evaluated as the linear operator applied to sr - hr,
/// where the source term cancels identically.
double physics_loss(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta);

/// Mean |sr - hr| over all pixels and channels.
double pixel_loss(const SnapshotStack& sr, const SnapshotStack& hr);

/// Batch mean of pixel_loss + eta * physics_loss.
double total_loss(std::span<const SnapshotStack> sr, std::span<const SnapshotStack> hr,
                  std::span<const PhysicsMeta> meta, const LossWeights& weights);

double total_loss(const SnapshotStack& sr, const SnapshotStack& hr, const PhysicsMeta& meta,
                  const LossWeights& weights);

}  // namespace plumesr
