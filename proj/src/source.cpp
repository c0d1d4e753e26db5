#include "plumesr/source.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace plumesr {

using nlohmann::json;

namespace {

// Schedules are snapped to snapshot boundaries, which are integer multiples of
// the step; the slack absorbs the rounding in t0 + k*dt.
constexpr double kTimeSlack = 1e-9;

// Left-open window: a step that ends exactly at t_on sees no emission. A run
// that starts at t_on and one that reaches t_on from earlier then take
// identical steps, which is what lets period-shifted bank entries stand in for
// later start times.
bool in_schedule(const std::vector<Interval>& schedule, double t) {
  return std::any_of(schedule.begin(), schedule.end(), [t](const Interval& iv) {
    return t > iv.t_on + kTimeSlack && t <= iv.t_off + kTimeSlack;
  });
}

// Area of {0 <= X <= x, 0 <= Y <= y} inside the disc, for x, y >= 0.
double quadrant_area(double r, double x, double y) {
  if (x <= 0.0 || y <= 0.0) return 0.0;
  const double r2 = r * r;
  const auto primitive = [&](double t) {
    return 0.5 * (t * std::sqrt(std::max(r2 - t * t, 0.0)) + r2 * std::asin(std::clamp(t / r, -1.0, 1.0)));
  };
  const double x_end = std::min(x, r);
  // Chord height sqrt(r^2 - t^2) drops below y for t > x_cross.
  const double x_cross = y >= r ? 0.0 : std::sqrt(r2 - y * y);
  const double flat = std::min(x_end, x_cross);
  double area = y * flat;
  if (x_end > flat) area += primitive(x_end) - primitive(flat);
  return area;
}

double signed_quadrant_area(double r, double x, double y) {
  const double sx = x < 0.0 ? -1.0 : 1.0;
  const double sy = y < 0.0 ? -1.0 : 1.0;
  return sx * sy * quadrant_area(r, std::abs(x), std::abs(y));
}

int wrap(int i, int n) {
  const int m = i % n;
  return m < 0 ? m + n : m;
}

}  // namespace

bool SourceSpec::active(double t) const { return in_schedule(schedule, t); }

void SourceSpec::validate() const {
  if (!(radius > 0.0)) throw std::invalid_argument("source radius must be positive");
  if (flux < 0.0) throw std::invalid_argument("source flux must be non-negative");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i].t_off > schedule[i].t_on)) {
      throw std::invalid_argument("source schedule interval must have t_off > t_on");
    }
    if (i > 0 && schedule[i].t_on < schedule[i - 1].t_off) {
      throw std::invalid_argument("source schedule intervals must be disjoint and ordered");
    }
  }
}

json SourceSpec::to_json() const {
  json sched = json::array();
  for (const auto& iv : schedule) sched.push_back({iv.t_on, iv.t_off});
  return {{"cx", center.x}, {"cy", center.y}, {"r", radius}, {"flux", flux}, {"schedule", sched}};
}

SourceSpec SourceSpec::from_json(const json& j) {
  SourceSpec s;
  s.center = {j.at("cx").get<double>(), j.at("cy").get<double>()};
  s.radius = j.at("r").get<double>();
  s.flux = j.at("flux").get<double>();
  for (const auto& iv : j.at("schedule")) s.schedule.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
  s.validate();
  return s;
}

json SceneSpec::to_json() const {
  json src = json::array();
  for (const auto& s : sources) src.push_back(s.to_json());
  return {{"sources", src}, {"scene_seed", scene_seed}};
}

SceneSpec SceneSpec::from_json(const json& j) {
  SceneSpec s;
  for (const auto& e : j.at("sources")) s.sources.push_back(SourceSpec::from_json(e));
  s.scene_seed = j.at("scene_seed").get<std::uint64_t>();
  return s;
}

double disc_rect_overlap(double r, double x0, double x1, double y0, double y1) {
  return signed_quadrant_area(r, x1, y1) - signed_quadrant_area(r, x0, y1) -
         signed_quadrant_area(r, x1, y0) + signed_quadrant_area(r, x0, y0);
}

DiscStamp rasterize_disc(Vec2 center, double radius, int width, int height, double dx) {
  const int ax = static_cast<int>(std::floor(center.x / dx));
  const int ay = static_cast<int>(std::floor(center.y / dx));
  const double fx = center.x - ax * dx;
  const double fy = center.y - ay * dx;
  const int reach = static_cast<int>(std::ceil(radius / dx)) + 1;
  const double cell_area = dx * dx;

  std::vector<double> dense(static_cast<std::size_t>(width) * height, 0.0);
  std::vector<std::uint8_t> touched(dense.size(), 0);
  for (int j = -reach; j <= reach; ++j) {
    const double y0 = j * dx - fy;
    for (int i = -reach; i <= reach; ++i) {
      const double x0 = i * dx - fx;
      const double w = disc_rect_overlap(radius, x0, x0 + dx, y0, y0 + dx) / cell_area;
      if (w <= 0.0) continue;
      const std::size_t idx = static_cast<std::size_t>(wrap(ay + j, height)) * width + wrap(ax + i, width);
      dense[idx] += w;
      touched[idx] = 1;
    }
  }
  DiscStamp stamp;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (touched[i]) {
      stamp.index.push_back(i);
      stamp.weight.push_back(dense[i]);
    }
  }
  return stamp;
}

SourceRaster::SourceRaster(const SceneSpec& scene, int width, int height, double dx)
    : width_(width), height_(height), dx_(dx) {
  sources_.reserve(scene.sources.size());
  for (const auto& s : scene.sources) {
    s.validate();
    sources_.push_back({rasterize_disc(s.center, s.radius, width, height, dx), s.flux, s.schedule});
  }
}

bool SourceRaster::Entry::active(double t) const { return in_schedule(schedule, t); }

bool SourceRaster::any_active(double t) const {
  return std::any_of(sources_.begin(), sources_.end(),
                     [t](const Entry& e) { return e.flux != 0.0 && e.active(t); });
}

void SourceRaster::accumulate(double t, std::span<double> out, double scale) const {
  for (const auto& e : sources_) {
    if (!e.active(t)) continue;
    const double a = scale * e.flux;
    for (std::size_t k = 0; k < e.stamp.index.size(); ++k) out[e.stamp.index[k]] += a * e.stamp.weight[k];
  }
}

Field SourceRaster::evaluate(double t) const {
  Field f(width_, height_, dx_);
  accumulate(t, f.values());
  return f;
}

}  // namespace plumesr
