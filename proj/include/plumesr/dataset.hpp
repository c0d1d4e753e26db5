#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "plumesr/container.hpp"
#include "plumesr/field.hpp"
#include "plumesr/residual.hpp"
#include "plumesr/rng.hpp"
#include "plumesr/scene.hpp"

namespace plumesr {

enum class Split { train, val, test };
const char* to_string(Split s);
Split split_from_string(const std::string& s);

struct DatasetConfig {
  int n_samples = 2000;
  int n_sources = 20;
  double max_flux = 1.0;
  std::vector<double> drop_rates{0.0, 0.2, 0.4, 0.6};
  std::array<double, 3> split_fractions{0.8, 0.1, 0.1};  // train, val, test
  std::uint64_t master_seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static DatasetConfig from_json(const nlohmann::json& j);
};

/// Per-sample draws that follow from (master_seed, index) alone.
struct SampleDraw {
  std::uint64_t seed = 0;
  SceneSpec scene;
  int t_index = 0;
  Split split = Split::train;
};

SampleDraw draw_sample(const DatasetConfig& cfg, const SolutionBank& bank, int index);

/// Range of snapshot indices a sample may be centred on: [first, last).
std::pair<int, int> sample_time_range(const SceneLayout& layout, const WindModel& wind);

/// One training/evaluation record. `lr` is corrupted for `drop_rate`.
struct SamplePair {
  std::string id;
  SnapshotStack lr;
  SnapshotStack lr_clean;
  Mask mask;
  SnapshotStack hr;
  PhysicsMeta meta;  // HR grid
  std::uint64_t seed = 0;
  double drop_rate = 0.0;
  Split split = Split::train;
  int t_index = 0;
  std::string scene_hash;
  std::string lr_source = "native";
};

struct ManifestEntry {
  std::string path;  // relative to the dataset root
  std::uint64_t seed = 0;
  double drop_rate = 0.0;
  Split split = Split::train;
  int mask_index = 0;

  nlohmann::json to_json() const;
  static ManifestEntry from_json(const nlohmann::json& j);
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& root);
void write_manifest(const std::filesystem::path& root, const std::vector<ManifestEntry>& entries);

/// Stable hex digest of a scene's canonical JSON.
std::string scene_hash(const SceneSpec& scene);

/// Corpus-wide scale: 1.1 x the largest pixel seen when composing a fixed set
/// of calibration scenes with every source at max_flux, over all snapshot
/// times a sample can use. Depends on the bank and the source count, never on
/// the master seed, so corpora drawn with different seeds share one scale.
double calibrate_normalization(const DatasetConfig& cfg, const SolutionBank& bank);

/// Builds the full sample record for `index` (all drop rates' masks, clean LR).
Container build_sample_container(const DatasetConfig& cfg, const SolutionBank& bank, double normalization,
                                 int index);

/// Writes samples/, manifest.jsonl and dataset.json under `root`.
std::vector<ManifestEntry> generate_dataset(const DatasetConfig& cfg, const SolutionBank& bank,
                                            const std::filesystem::path& root);

/// Loads a sample at one drop rate. Handles multi-rate corpus files and
/// single-rate view files alike.
SamplePair load_sample(const std::filesystem::path& root, const ManifestEntry& entry);

/// Writes a single-rate view: arrays lr (corrupted), mask, hr.
Container view_container(const SamplePair& s);

/// Materialises the view of every sample at `rate` under `out`.
std::vector<ManifestEntry> materialize_drop_view(const std::filesystem::path& root, double rate,
                                                 const std::filesystem::path& out);

/// Replaces each LR input by the 4x bicubic downsample of its HR stack; the
/// drop masks are reused and the files are flagged lr_source = "downsampled_hr".
SamplePair make_dwn_hr_input(const SamplePair& s);
std::vector<ManifestEntry> make_dwn_hr_inputs(const std::filesystem::path& root,
                                              const std::filesystem::path& out);

struct PatchPair {
  SnapshotStack lr;
  Mask mask;
  SnapshotStack hr;
  int lr_x = 0;
  int lr_y = 0;
  int hr_x = 0;
  int hr_y = 0;
};

/// Patch with LR origin (x, y); the HR origin is 4x that.
PatchPair extract_patch_at(const SamplePair& s, int x, int y, int lr_patch = 16);
/// Uniformly random origin over all positions where the patch fits.
PatchPair extract_patch(const SamplePair& s, Rng64& rng, int lr_patch = 16);

}  // namespace plumesr
