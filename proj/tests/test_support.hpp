#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <unistd.h>

#include "plumesr/field.hpp"
#include "plumesr/rng.hpp"
#include "plumesr/scene.hpp"
#include "plumesr/wind.hpp"

namespace plumesr::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("plumesr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
  std::filesystem::path path_;
};

inline std::vector<char> read_bytes(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline Field random_field(int w, int h, double dx, std::uint64_t seed) {
  Rng64 rng(seed);
  Field f(w, h, dx);
  for (double& v : f.values()) v = rng.next_f64();
  return f;
}

inline SnapshotStack random_stack(int w, int h, double dx, std::uint64_t seed, double dt = 1.0) {
  return SnapshotStack({random_field(w, h, dx, seed), random_field(w, h, dx, seed + 1),
                        random_field(w, h, dx, seed + 2)},
                       dt);
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Small layout that keeps bank builds to well under a second:
/// LR 24x16, HR 96x64, eight snapshots per wind period, two phases.
inline SceneLayout small_layout() {
  SceneLayout L;
  L.lr_width = 24;
  L.lr_height = 16;
  L.run_snapshots = 16;
  L.n_phases = 2;
  L.source_duration = 40.0;
  return L;
}

inline WindModel small_wind() {
  return WindModel(0.5, 40.0, {{0.04, 0.05, 1, 2, 0.3, 1.1}, {0.02, 0.03, 3, 1, 2.0, 0.4}});
}

}  // namespace plumesr::testing
