#include "plumesr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "plumesr/raster_io.hpp"
#include "plumesr/resample.hpp"

namespace plumesr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.jsonl";
constexpr const char* kDatasetInfoName = "dataset.json";

// Child-stream indices under a sample seed.
constexpr std::uint64_t kMaskStreamBase = 1;

constexpr std::uint64_t kCalibrationSeed = 0x5EEDCA11B4A7E000ULL;
constexpr int kCalibrationScenes = 8;

std::string sample_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06d", index);
  return buf;
}

SnapshotStack clamp_unit(SnapshotStack s) {
  for (auto& ch : s.channels) {
    for (double& v : ch.values()) v = std::clamp(v, 0.0, 1.0);
  }
  return s;
}

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ContainerError(ContainerErrc::io, "cannot create " + p.string() + ": " + ec.message());
}

std::size_t rate_index(const std::vector<double>& rates, double rate) {
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (std::abs(rates[i] - rate) < 1e-12) return i;
  }
  throw std::invalid_argument("drop rate " + std::to_string(rate) + " not present in corpus");
}

}  // namespace

const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw std::invalid_argument("unknown split '" + s + "'");
}

void DatasetConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (n_sources < 1) throw std::invalid_argument("n_sources must be >= 1");
  if (max_flux < 0.0) throw std::invalid_argument("max_flux must be >= 0");
  if (drop_rates.empty()) throw std::invalid_argument("drop_rates must not be empty");
  for (double r : drop_rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("drop rates must lie in [0, 1]");
  }
  double total = 0.0;
  for (double f : split_fractions) {
    if (f < 0.0) throw std::invalid_argument("split fractions must be >= 0");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");
}

json DatasetConfig::to_json() const {
  return {{"n_samples", n_samples}, {"n_sources", n_sources}, {"max_flux", max_flux},
          {"drop_rates", drop_rates}, {"split", split_fractions}, {"seed", master_seed}};
}

DatasetConfig DatasetConfig::from_json(const json& j) {
  DatasetConfig c;
  c.n_samples = j.value("n_samples", c.n_samples);
  c.n_sources = j.value("n_sources", c.n_sources);
  c.max_flux = j.value("max_flux", c.max_flux);
  if (j.contains("drop_rates")) c.drop_rates = j.at("drop_rates").get<std::vector<double>>();
  if (j.contains("split")) c.split_fractions = j.at("split").get<std::array<double, 3>>();
  c.master_seed = j.value("seed", c.master_seed);
  c.validate();
  return c;
}

std::pair<int, int> sample_time_range(const SceneLayout& layout, const WindModel& wind) {
  const int first = layout.snapshots_per_period(wind);
  const int last = std::min(static_cast<int>(std::ceil(0.9 * layout.run_snapshots)), layout.run_snapshots);
  if (first < 1 || last <= first) {
    throw std::invalid_argument("run too short: need snapshots after one wind period and before 90% of the run");
  }
  return {first, last};
}

SampleDraw draw_sample(const DatasetConfig& cfg, const SolutionBank& bank, int index) {
  SampleDraw d;
  d.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  Rng64 rng(d.seed);
  d.scene = sample_scene(rng, cfg.n_sources, cfg.max_flux, bank.layout, bank.wind);
  d.scene.scene_seed = d.seed;
  const auto [first, last] = sample_time_range(bank.layout, bank.wind);
  d.t_index = static_cast<int>(rng.uniform_int(first, last - 1));
  const double u = rng.next_f64();
  const auto& f = cfg.split_fractions;
  d.split = u < f[0] ? Split::train : (u < f[0] + f[1] ? Split::val : Split::test);
  return d;
}

json ManifestEntry::to_json() const {
  return {{"path", path}, {"seed", seed}, {"drop_rate", drop_rate}, {"split", to_string(split)},
          {"mask_index", mask_index}};
}

ManifestEntry ManifestEntry::from_json(const json& j) {
  ManifestEntry e;
  e.path = j.at("path").get<std::string>();
  e.seed = j.at("seed").get<std::uint64_t>();
  e.drop_rate = j.at("drop_rate").get<double>();
  e.split = split_from_string(j.at("split").get<std::string>());
  e.mask_index = j.value("mask_index", 0);
  return e;
}

std::vector<ManifestEntry> read_manifest(const fs::path& root) {
  std::ifstream is(root / kManifestName);
  if (!is) throw ContainerError(ContainerErrc::io, "cannot open " + (root / kManifestName).string());
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty()) out.push_back(ManifestEntry::from_json(json::parse(line)));
  }
  return out;
}

void write_manifest(const fs::path& root, const std::vector<ManifestEntry>& entries) {
  ensure_dir(root);
  std::ofstream os(root / kManifestName, std::ios::binary | std::ios::trunc);
  if (!os) throw ContainerError(ContainerErrc::io, "cannot write manifest in " + root.string());
  for (const auto& e : entries) os << e.to_json().dump() << '\n';
}

std::string scene_hash(const SceneSpec& scene) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : scene.to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Container build_sample_container(const DatasetConfig& cfg, const SolutionBank& bank, double normalization,
                                 int index) {
  const SampleDraw d = draw_sample(cfg, bank, index);
  const ComposedPair pair = compose(d.scene, bank, d.t_index, 1.0 / normalization);
  const SceneLayout& L = bank.layout;

  PhysicsMeta meta{bank.wind, d.scene, L.kappa, L.hr_dx(), L.dt_snap, pair.t_center, 1.0 / normalization};

  Container c;
  c.metadata = {{"kind", "sample"},
                {"id", sample_id(index)},
                {"index", index},
                {"seed", d.seed},
                {"split", to_string(d.split)},
                {"t_index", d.t_index},
                {"drop_rates", cfg.drop_rates},
                {"lr_dx", L.lr_dx},
                {"lr_source", "native"},
                {"normalization", normalization},
                {"scene_hash", scene_hash(d.scene)},
                {"physics", meta.to_json()}};
  c.arrays.push_back(stack_to_array("lr", clamp_unit(pair.lr)));
  c.arrays.push_back(stack_to_array("hr", clamp_unit(pair.hr)));

  NamedArray masks;
  masks.name = "masks";
  masks.shape = {cfg.drop_rates.size(), static_cast<std::uint64_t>(L.lr_height),
                 static_cast<std::uint64_t>(L.lr_width)};
  std::vector<std::uint8_t> bits;
  for (std::size_t r = 0; r < cfg.drop_rates.size(); ++r) {
    const Mask m = drop_mask(L.lr_width, L.lr_height, cfg.drop_rates[r], derive_seed(d.seed, kMaskStreamBase + r));
    bits.insert(bits.end(), m.bits.begin(), m.bits.end());
  }
  masks.data = std::move(bits);
  c.arrays.push_back(std::move(masks));
  return c;
}

double calibrate_normalization(const DatasetConfig& cfg, const SolutionBank& bank) {
  if (!(cfg.max_flux > 0.0)) return 1.0;
  const auto [first, last] = sample_time_range(bank.layout, bank.wind);
  std::vector<double> peaks(kCalibrationScenes, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < kCalibrationScenes; ++k) {
    Rng64 rng(derive_seed(kCalibrationSeed, static_cast<std::uint64_t>(k)));
    SceneSpec scene = sample_scene(rng, cfg.n_sources, cfg.max_flux, bank.layout, bank.wind);
    for (auto& s : scene.sources) s.flux = cfg.max_flux;
    // Each composition covers three consecutive snapshots, so a stride of
    // three visits every usable time index.
    for (int t = first; t <= last; t += 3) {
      const ComposedPair p = compose(scene, bank, std::min(t, last - 1));
      for (int c = 0; c < 3; ++c) {
        peaks[k] = std::max({peaks[k], p.lr.channels[c].max(), p.hr.channels[c].max()});
      }
    }
  }
  const double worst = *std::max_element(peaks.begin(), peaks.end());
  return worst > 0.0 ? 1.1 * worst : 1.0;
}

std::vector<ManifestEntry> generate_dataset(const DatasetConfig& cfg, const SolutionBank& bank, const fs::path& root) {
  cfg.validate();
  const double norm = calibrate_normalization(cfg, bank);
  ensure_dir(root / "samples");

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.n_samples));
  std::vector<Split> splits(seeds.size());
  std::string first_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < cfg.n_samples; ++i) {
    try {
      const Container c = build_sample_container(cfg, bank, norm, i);
      seeds[i] = c.metadata.at("seed").get<std::uint64_t>();
      splits[i] = split_from_string(c.metadata.at("split").get<std::string>());
      write_container(root / "samples" / (sample_id(i) + ".plm"), c);
    } catch (const std::exception& e) {
#pragma omp critical(plumesr_dataset_error)
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error("dataset generation failed: " + first_error);

  std::vector<ManifestEntry> entries;
  for (int i = 0; i < cfg.n_samples; ++i) {
    for (std::size_t r = 0; r < cfg.drop_rates.size(); ++r) {
      entries.push_back({"samples/" + sample_id(i) + ".plm", seeds[i], cfg.drop_rates[r], splits[i],
                         static_cast<int>(r)});
    }
  }
  write_manifest(root, entries);

  const json info = {{"dataset", cfg.to_json()},
                     {"layout", bank.layout.to_json()},
                     {"wind", bank.wind.to_json()},
                     {"normalization", norm},
                     {"bank_peak", bank.peak()}};
  std::ofstream os(root / kDatasetInfoName, std::ios::binary | std::ios::trunc);
  os << info.dump(2) << '\n';
  return entries;
}

SamplePair load_sample(const fs::path& root, const ManifestEntry& entry) {
  const Container c = read_container(root / entry.path);
  const json& md = c.metadata;
  SamplePair s;
  s.meta = PhysicsMeta::from_json(md.at("physics"));
  s.id = md.value("id", fs::path(entry.path).stem().string());
  s.seed = md.at("seed").get<std::uint64_t>();
  s.split = split_from_string(md.at("split").get<std::string>());
  s.t_index = md.at("t_index").get<int>();
  s.scene_hash = md.value("scene_hash", "");
  s.lr_source = md.value("lr_source", "native");
  s.drop_rate = entry.drop_rate;

  const double lr_dx = md.at("lr_dx").get<double>();
  s.hr = array_to_stack(c.array("hr"), s.meta.dx, s.meta.dt_snap);
  if (c.has_array("masks")) {
    const auto rates = md.at("drop_rates").get<std::vector<double>>();
    const std::size_t idx = rate_index(rates, entry.drop_rate);
    s.lr_clean = array_to_stack(c.array("lr"), lr_dx, s.meta.dt_snap);
    s.mask = array_to_mask(c.array("masks"), idx);
    s.lr = apply_mask(s.lr_clean, s.mask);
  } else {
    s.lr = array_to_stack(c.array("lr"), lr_dx, s.meta.dt_snap);
    s.mask = array_to_mask(c.array("mask"));
    s.lr_clean = s.lr;  // clean values are not kept in view files
    if (md.contains("drop_rate")) s.drop_rate = md.at("drop_rate").get<double>();
  }
  if (s.hr.width() != 4 * s.lr.width() || s.hr.height() != 4 * s.lr.height()) {
    throw DimensionError("sample " + s.id + ": HR dims are not 4x LR dims");
  }
  return s;
}

Container view_container(const SamplePair& s) {
  Container c;
  c.metadata = {{"kind", "sample_view"},
                {"id", s.id},
                {"seed", s.seed},
                {"split", to_string(s.split)},
                {"t_index", s.t_index},
                {"drop_rate", s.drop_rate},
                {"lr_dx", s.lr.dx()},
                {"lr_source", s.lr_source},
                {"scene_hash", s.scene_hash},
                {"physics", s.meta.to_json()}};
  c.arrays.push_back(stack_to_array("lr", s.lr));
  c.arrays.push_back(mask_to_array("mask", s.mask));
  c.arrays.push_back(stack_to_array("hr", s.hr));
  return c;
}

std::vector<ManifestEntry> materialize_drop_view(const fs::path& root, double rate, const fs::path& out) {
  std::vector<ManifestEntry> selected;
  for (const auto& e : read_manifest(root)) {
    if (std::abs(e.drop_rate - rate) < 1e-12) selected.push_back(e);
  }
  if (selected.empty()) throw std::invalid_argument("no samples at drop rate " + std::to_string(rate));
  ensure_dir(out / "samples");
  std::vector<ManifestEntry> written(selected.size());
  std::string first_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < selected.size(); ++i) {
    try {
      const SamplePair s = load_sample(root, selected[i]);
      const std::string rel = "samples/" + s.id + ".plm";
      write_container(out / rel, view_container(s));
      written[i] = {rel, s.seed, s.drop_rate, s.split, 0};
    } catch (const std::exception& e) {
#pragma omp critical(plumesr_view_error)
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error("drop view failed: " + first_error);
  write_manifest(out, written);
  return written;
}

SamplePair make_dwn_hr_input(const SamplePair& s) {
  SamplePair d = s;
  d.lr_clean = bicubic_downsample(s.hr, 4);
  d.lr = apply_mask(d.lr_clean, s.mask);
  d.lr_source = "downsampled_hr";
  return d;
}

std::vector<ManifestEntry> make_dwn_hr_inputs(const fs::path& root, const fs::path& out) {
  const auto manifest = read_manifest(root);
  ensure_dir(out / "samples");
  std::vector<ManifestEntry> written(manifest.size());
  std::string first_error;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    try {
      const SamplePair d = make_dwn_hr_input(load_sample(root, manifest[i]));
      char rate_tag[16];
      std::snprintf(rate_tag, sizeof rate_tag, "_r%03d", static_cast<int>(std::lround(d.drop_rate * 100)));
      const std::string rel = "samples/" + d.id + rate_tag + ".plm";
      write_container(out / rel, view_container(d));
      written[i] = {rel, d.seed, d.drop_rate, d.split, 0};
    } catch (const std::exception& e) {
#pragma omp critical(plumesr_dwn_error)
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error("Dwn-HR derivation failed: " + first_error);
  write_manifest(out, written);
  return written;
}

PatchPair extract_patch_at(const SamplePair& s, int x, int y, int lr_patch) {
  const int factor = s.hr.width() / s.lr.width();
  if (lr_patch > s.lr.width() || lr_patch > s.lr.height()) {
    throw DimensionError("patch of " + std::to_string(lr_patch) + " exceeds LR frame");
  }
  if (x < 0 || y < 0 || x + lr_patch > s.lr.width() || y + lr_patch > s.lr.height()) {
    throw DimensionError("patch origin (" + std::to_string(x) + ", " + std::to_string(y) + ") out of frame");
  }
  const auto crop = [](const Field& f, int ox, int oy, int n) {
    Field out(n, n, f.dx());
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) out(i, j) = f(ox + i, oy + j);
    }
    return out;
  };
  const int hp = factor * lr_patch;
  PatchPair p;
  p.lr_x = x;
  p.lr_y = y;
  p.hr_x = factor * x;
  p.hr_y = factor * y;
  p.lr = SnapshotStack({crop(s.lr.channels[0], x, y, lr_patch), crop(s.lr.channels[1], x, y, lr_patch),
                        crop(s.lr.channels[2], x, y, lr_patch)},
                       s.lr.dt_snap);
  p.hr = SnapshotStack({crop(s.hr.channels[0], p.hr_x, p.hr_y, hp), crop(s.hr.channels[1], p.hr_x, p.hr_y, hp),
                        crop(s.hr.channels[2], p.hr_x, p.hr_y, hp)},
                       s.hr.dt_snap);
  p.mask = Mask(lr_patch, lr_patch);
  for (int j = 0; j < lr_patch; ++j) {
    for (int i = 0; i < lr_patch; ++i) {
      p.mask.bits[static_cast<std::size_t>(j) * lr_patch + i] = s.mask.present(x + i, y + j) ? 1 : 0;
    }
  }
  return p;
}

PatchPair extract_patch(const SamplePair& s, Rng64& rng, int lr_patch) {
  if (lr_patch > s.lr.width() || lr_patch > s.lr.height()) {
    throw DimensionError("patch of " + std::to_string(lr_patch) + " exceeds LR frame");
  }
  const int x = static_cast<int>(rng.uniform_int(0, s.lr.width() - lr_patch));
  const int y = static_cast<int>(rng.uniform_int(0, s.lr.height() - lr_patch));
  return extract_patch_at(s, x, y, lr_patch);
}

}  // namespace plumesr
