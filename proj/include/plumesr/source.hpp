#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "plumesr/field.hpp"
#include "plumesr/wind.hpp"

namespace plumesr {

/// Emission window (t_on, t_off]: off at t_on itself, on at t_off.
struct Interval {
  double t_on = 0.0;
  double t_off = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Disc-shaped emitter, constant `flux` (concentration/time) while switched on.
struct SourceSpec {
  Vec2 center;
  double radius = 2.0;
  double flux = 1.0;
  std::vector<Interval> schedule;

  bool active(double t) const;
  void validate() const;

  nlohmann::json to_json() const;
  static SourceSpec from_json(const nlohmann::json& j);

  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct SceneSpec {
  std::vector<SourceSpec> sources;
  std::uint64_t scene_seed = 0;

  nlohmann::json to_json() const;
  static SceneSpec from_json(const nlohmann::json& j);

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// Area of the disc of radius r centred at the origin that lies inside the
/// rectangle [x0,x1]x[y0,y1]. Closed form, no sampling.
double disc_rect_overlap(double r, double x0, double x1, double y0, double y1);

/// Sparse raster of a unit disc on a periodic grid: weight = covered area / dx^2.
struct DiscStamp {
  std::vector<std::size_t> index;
  std::vector<double> weight;
};

/// The stamp depends only on the centre's offset within its cell, so centres
/// that differ by whole cells give stamps that differ by an exact index shift.
DiscStamp rasterize_disc(Vec2 center, double radius, int width, int height, double dx);

/// A scene bound to one grid: per-source stamps ready for repeated evaluation.
class SourceRaster {
public:
  SourceRaster() = default;
  SourceRaster(const SceneSpec& scene, int width, int height, double dx);

  /// out[i] += scale * S(x_i, t).
  void accumulate(double t, std::span<double> out, double scale = 1.0) const;
  Field evaluate(double t) const;
  bool any_active(double t) const;
  bool empty() const { return sources_.empty(); }

  int width() const { return width_; }
  int height() const { return height_; }
  double dx() const { return dx_; }

private:
  struct Entry {
    DiscStamp stamp;
    double flux;
    std::vector<Interval> schedule;
    bool active(double t) const;
  };
  std::vector<Entry> sources_;
  int width_ = 0;
  int height_ = 0;
  double dx_ = 1.0;
};

}  // namespace plumesr
