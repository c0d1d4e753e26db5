#include "plumesr/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plumesr/container.hpp"
#include "plumesr/raster_io.hpp"

namespace plumesr {

using nlohmann::json;

namespace {

constexpr double kAlignTol = 1e-9;

int whole_multiple(double value, double unit, const char* what) {
  const double r = value / unit;
  const double n = std::round(r);
  if (std::abs(r - n) > kAlignTol) {
    throw std::invalid_argument(std::string(what) + " is not a whole multiple");
  }
  return static_cast<int>(n);
}

// Adds scale * shift(src, sx, sy) into dst on the periodic grid.
void add_shifted(std::span<double> dst, const Field& src, int sx, int sy, double scale) {
  const int w = src.width();
  const int h = src.height();
  sx = ((sx % w) + w) % w;
  sy = ((sy % h) + h) % h;
  for (int y = 0; y < h; ++y) {
    const int ty = (y + sy) % h;
    double* out = dst.data() + static_cast<std::size_t>(ty) * w;
    const double* in = src.values().data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w - sx; ++x) out[x + sx] += scale * in[x];
    for (int x = w - sx; x < w; ++x) out[x + sx - w] += scale * in[x];
  }
}

struct Placement {
  int offset_x;
  int offset_y;
  int phase;
  int shift;  // whole wind periods after the bank's start time
};

Placement locate(const SourceSpec& s, const SolutionBank& bank) {
  const SceneLayout& L = bank.layout;
  const double gx = s.center.x / L.lr_dx - 0.5;
  const double gy = s.center.y / L.lr_dx - 0.5;
  if (std::abs(gx - std::round(gx)) > kAlignTol || std::abs(gy - std::round(gy)) > kAlignTol) {
    throw CompositionError("source centre (" + std::to_string(s.center.x) + ", " +
                           std::to_string(s.center.y) + ") is not on an LR cell centre");
  }
  if (std::abs(s.radius - L.source_radius) > kAlignTol) {
    throw CompositionError("source radius differs from the bank's reference radius");
  }
  if (s.schedule.empty()) throw CompositionError("source has an empty schedule");
  const auto expected = L.schedule_from(s.schedule[0].t_on);
  bool same = expected.size() == s.schedule.size();
  for (std::size_t i = 0; same && i < expected.size(); ++i) {
    same = std::abs(expected[i].t_on - s.schedule[i].t_on) <= kAlignTol &&
           std::abs(expected[i].t_off - s.schedule[i].t_off) <= kAlignTol;
  }
  if (!same) throw CompositionError("source schedule does not follow the bank's emission pattern");
  const double stride = L.phase_stride(bank.wind) * L.dt_snap;
  const double r = s.schedule[0].t_on / stride;
  const double n = std::round(r);
  if (n < 0 || std::abs(r - n) > kAlignTol) {
    throw CompositionError("source start time " + std::to_string(s.schedule[0].t_on) +
                           " does not map to a bank phase");
  }
  const int slot = static_cast<int>(n);
  const int phase = slot % L.n_phases;
  if (phase >= bank.n_phases()) throw CompositionError("bank lacks phase " + std::to_string(phase));
  const Vec2 ref = L.reference_center();
  return {static_cast<int>(std::round(gx)) - static_cast<int>(std::round(ref.x / L.lr_dx - 0.5)),
          static_cast<int>(std::round(gy)) - static_cast<int>(std::round(ref.y / L.lr_dx - 0.5)), phase,
          slot / L.n_phases};
}

}  // namespace

SolverConfig SceneLayout::lr_config() const {
  return {lr_width, lr_height, lr_dx, lr_dt, kappa, 0.0};
}

SolverConfig SceneLayout::hr_config() const {
  return {hr_width(), hr_height(), hr_dx(), hr_dt, kappa, 0.0};
}

int SceneLayout::snapshots_per_period(const WindModel& wind) const {
  return whole_multiple(wind.period(), dt_snap, "wind period / snapshot interval");
}

int SceneLayout::phase_stride(const WindModel& wind) const {
  const int spp = snapshots_per_period(wind);
  if (n_phases < 1 || spp % n_phases != 0) {
    throw std::invalid_argument("snapshots per period must be divisible by n_phases");
  }
  return spp / n_phases;
}

double SceneLayout::start_time(const WindModel& wind, int phase, int shift) const {
  return (phase * phase_stride(wind) + shift * snapshots_per_period(wind)) * dt_snap;
}

std::vector<Interval> SceneLayout::schedule_from(double t_on) const {
  const double t_end = t_on + source_duration;
  if (!(pulse_off > 0.0)) return {{t_on, t_end}};
  std::vector<Interval> out;
  for (double t = t_on; t < t_end; t += pulse_on + pulse_off) out.push_back({t, std::min(t + pulse_on, t_end)});
  return out;
}

Vec2 SceneLayout::reference_center() const {
  return {(lr_width / 2 + 0.5) * lr_dx, (lr_height / 2 + 0.5) * lr_dx};
}

void SceneLayout::validate(const WindModel& wind) const {
  if (refinement < 1) throw std::invalid_argument("refinement must be >= 1");
  if (run_snapshots < 2) throw std::invalid_argument("run_snapshots must be >= 2");
  phase_stride(wind);
  whole_multiple(dt_snap, lr_dt, "snapshot interval / LR step");
  whole_multiple(dt_snap, hr_dt, "snapshot interval / HR step");
  whole_multiple(source_duration, dt_snap, "source duration / snapshot interval");
  if (!(pulse_on > 0.0) || pulse_off < 0.0) throw std::invalid_argument("pulse_on must be > 0 and pulse_off >= 0");
  whole_multiple(pulse_on, dt_snap, "pulse on-time / snapshot interval");
  if (pulse_off > 0.0) whole_multiple(pulse_off, dt_snap, "pulse off-time / snapshot interval");
  lr_config().check_cfl(wind);
  hr_config().check_cfl(wind);
}

json SceneLayout::to_json() const {
  return {{"lr_width", lr_width},       {"lr_height", lr_height},   {"lr_dx", lr_dx},
          {"refinement", refinement},   {"lr_dt", lr_dt},           {"hr_dt", hr_dt},
          {"kappa", kappa},             {"dt_snap", dt_snap},       {"n_phases", n_phases},
          {"run_snapshots", run_snapshots}, {"source_radius", source_radius},
          {"source_duration", source_duration}, {"pulse_on", pulse_on},
          {"pulse_off", pulse_off}};
}

SceneLayout SceneLayout::from_json(const json& j) {
  SceneLayout L;
  L.lr_width = j.value("lr_width", L.lr_width);
  L.lr_height = j.value("lr_height", L.lr_height);
  L.lr_dx = j.value("lr_dx", L.lr_dx);
  L.refinement = j.value("refinement", L.refinement);
  L.lr_dt = j.value("lr_dt", L.lr_dt);
  L.hr_dt = j.value("hr_dt", L.hr_dt);
  L.kappa = j.value("kappa", L.kappa);
  L.dt_snap = j.value("dt_snap", L.dt_snap);
  L.n_phases = j.value("n_phases", L.n_phases);
  L.run_snapshots = j.value("run_snapshots", L.run_snapshots);
  L.source_radius = j.value("source_radius", L.source_radius);
  L.source_duration = j.value("source_duration", L.source_duration);
  L.pulse_on = j.value("pulse_on", L.pulse_on);
  L.pulse_off = j.value("pulse_off", L.pulse_off);
  return L;
}

SceneSpec sample_scene(Rng64& rng, int n_sources, double max_flux, const SceneLayout& layout,
                       const WindModel& wind) {
  if (n_sources < 1) throw std::invalid_argument("n_sources must be >= 1");
  if (max_flux < 0.0) throw std::invalid_argument("max_flux must be >= 0");
  const int stride = layout.phase_stride(wind);
  // Start slots (phase + whole periods) whose start lies inside the run.
  const int n_slots = (layout.run_snapshots + stride - 1) / stride;

  SceneSpec scene;
  scene.scene_seed = rng.state();
  scene.sources.reserve(static_cast<std::size_t>(n_sources));
  for (int i = 0; i < n_sources; ++i) {
    SourceSpec s;
    const auto ix = rng.uniform_int(0, layout.lr_width - 1);
    const auto iy = rng.uniform_int(0, layout.lr_height - 1);
    s.center = {(static_cast<double>(ix) + 0.5) * layout.lr_dx, (static_cast<double>(iy) + 0.5) * layout.lr_dx};
    s.radius = layout.source_radius;
    s.flux = max_flux * rng.next_f64();
    const int slot = static_cast<int>(rng.uniform_int(0, n_slots - 1));
    const double t_on = layout.start_time(wind, slot % layout.n_phases, slot / layout.n_phases);
    s.schedule = layout.schedule_from(t_on);
    scene.sources.push_back(std::move(s));
  }
  return scene;
}

double SolutionBank::peak() const {
  double m = 0.0;
  for (const auto* set : {&lr, &hr}) {
    for (const auto& run : *set) {
      for (const auto& f : run) m = std::max(m, f.max());
    }
  }
  return m;
}

SourceSpec SolutionBank::reference_source(int phase) const {
  SourceSpec s;
  s.center = layout.reference_center();
  s.radius = layout.source_radius;
  s.flux = 1.0;
  const double t_on = layout.start_time(wind, phase, 0);
  s.schedule = layout.schedule_from(t_on);
  return s;
}

SolutionBank build_bank(const SceneLayout& layout, const WindModel& wind) {
  layout.validate(wind);
  SolutionBank bank;
  bank.layout = layout;
  bank.wind = wind;
  bank.lr.resize(static_cast<std::size_t>(layout.n_phases));
  bank.hr.resize(static_cast<std::size_t>(layout.n_phases));

  const int lr_every = whole_multiple(layout.dt_snap, layout.lr_dt, "snapshot interval / LR step");
  const int hr_every = whole_multiple(layout.dt_snap, layout.hr_dt, "snapshot interval / HR step");
  const int jobs = 2 * layout.n_phases;
#pragma omp parallel for schedule(dynamic, 1)
  for (int job = 0; job < jobs; ++job) {
    const int phase = job / 2;
    const bool hr = (job % 2) == 1;
    SceneSpec scene{{bank.reference_source(phase)}, 0};
    if (hr) {
      bank.hr[phase] = integrate(layout.hr_config(), wind, scene, layout.run_snapshots * hr_every, hr_every);
    } else {
      bank.lr[phase] = integrate(layout.lr_config(), wind, scene, layout.run_snapshots * lr_every, lr_every);
    }
  }
  return bank;
}

void write_bank(const std::filesystem::path& path, const SolutionBank& bank) {
  Container c;
  c.metadata = {{"kind", "solution_bank"}, {"layout", bank.layout.to_json()}, {"wind", bank.wind.to_json()},
                {"n_phases", bank.n_phases()}, {"n_snapshots", bank.layout.run_snapshots + 1}};
  for (const auto* which : {&bank.lr, &bank.hr}) {
    NamedArray a;
    a.name = which == &bank.lr ? "lr" : "hr";
    const Field& first = (*which).at(0).at(0);
    std::size_t planes = 0;
    std::vector<double> data;
    for (const auto& run : *which) {
      for (const auto& f : run) {
        data.insert(data.end(), f.values().begin(), f.values().end());
        ++planes;
      }
    }
    a.shape = {planes, static_cast<std::uint64_t>(first.height()), static_cast<std::uint64_t>(first.width())};
    a.data = std::move(data);
    c.arrays.push_back(std::move(a));
  }
  write_container(path, c);
}

SolutionBank read_bank(const std::filesystem::path& path) {
  const Container c = read_container(path);
  if (c.metadata.value("kind", "") != "solution_bank") {
    throw ContainerError(ContainerErrc::shape_mismatch, path.string() + " is not a solution bank");
  }
  SolutionBank bank;
  bank.layout = SceneLayout::from_json(c.metadata.at("layout"));
  bank.wind = WindModel::from_json(c.metadata.at("wind"));
  const int n_phases = c.metadata.at("n_phases").get<int>();
  const int n_snap = c.metadata.at("n_snapshots").get<int>();
  for (auto [name, dst, dx] : {std::tuple{"lr", &bank.lr, bank.layout.lr_dx},
                               std::tuple{"hr", &bank.hr, bank.layout.hr_dx()}}) {
    const NamedArray& a = c.array(name);
    if (a.shape.size() != 3 || a.shape[0] != static_cast<std::uint64_t>(n_phases) * n_snap) {
      throw ContainerError(ContainerErrc::shape_mismatch, std::string("bank array '") + name + "' has wrong plane count");
    }
    dst->assign(static_cast<std::size_t>(n_phases), {});
    for (int p = 0; p < n_phases; ++p) {
      for (int k = 0; k < n_snap; ++k) {
        (*dst)[p].push_back(array_to_field(a, dx, static_cast<std::size_t>(p) * n_snap + k));
      }
    }
  }
  return bank;
}

ComposedPair compose(const SceneSpec& scene, const SolutionBank& bank, int t_index, double scale) {
  const SceneLayout& L = bank.layout;
  if (t_index < 1 || t_index + 1 > L.run_snapshots) {
    throw CompositionError("t_index " + std::to_string(t_index) + " outside [1, " +
                           std::to_string(L.run_snapshots - 1) + "]");
  }
  const int spp = L.snapshots_per_period(bank.wind);

  std::array<Field, 3> lr{Field(L.lr_width, L.lr_height, L.lr_dx), Field(L.lr_width, L.lr_height, L.lr_dx),
                          Field(L.lr_width, L.lr_height, L.lr_dx)};
  std::array<Field, 3> hr{Field(L.hr_width(), L.hr_height(), L.hr_dx()),
                          Field(L.hr_width(), L.hr_height(), L.hr_dx()),
                          Field(L.hr_width(), L.hr_height(), L.hr_dx())};

  for (const auto& s : scene.sources) {
    const Placement p = locate(s, bank);
    for (int c = 0; c < 3; ++c) {
      const int k = t_index - 1 + c - p.shift * spp;
      if (k < 0) continue;  // not yet switched on
      if (k > L.run_snapshots) throw CompositionError("bank run too short for requested time");
      const double a = scale * s.flux;
      add_shifted(lr[c].values(), bank.lr[p.phase][k], p.offset_x, p.offset_y, a);
      add_shifted(hr[c].values(), bank.hr[p.phase][k], L.refinement * p.offset_x, L.refinement * p.offset_y, a);
    }
  }
  ComposedPair out;
  out.lr = SnapshotStack(std::move(lr), L.dt_snap);
  out.hr = SnapshotStack(std::move(hr), L.dt_snap);
  out.t_index = t_index;
  out.t_center = t_index * L.dt_snap;
  return out;
}

}  // namespace plumesr
