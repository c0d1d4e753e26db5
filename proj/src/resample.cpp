#include "plumesr/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "plumesr/rng.hpp"

namespace plumesr {

namespace {

constexpr double kKeysA = -0.5;

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

struct Taps {
  std::vector<int> index;
  std::vector<double> weight;
};

// One output sample per entry: the input indices and weights that feed it.
using TapTable = std::vector<Taps>;

TapTable upsample_taps(int n_in, int factor) {
  TapTable table(static_cast<std::size_t>(n_in) * factor);
  for (int i = 0; i < n_in * factor; ++i) {
    const double x = (i + 0.5) / factor - 0.5;
    const double base = std::floor(x);
    const double t = x - base;
    auto& taps = table[i];
    for (int k = -1; k <= 2; ++k) {
      taps.index.push_back(wrap(static_cast<int>(base) + k, n_in));
      taps.weight.push_back(keys_kernel(t - k));
    }
  }
  return table;
}

TapTable downsample_taps(int n_in, int factor) {
  const int n_out = n_in / factor;
  TapTable table(static_cast<std::size_t>(n_out));
  for (int i = 0; i < n_out; ++i) {
    const double c = (i + 0.5) * factor - 0.5;
    auto& taps = table[i];
    const int lo = static_cast<int>(std::ceil(c - 2.0 * factor));
    const int hi = static_cast<int>(std::floor(c + 2.0 * factor));
    double total = 0.0;
    for (int j = lo; j <= hi; ++j) {
      const double w = keys_kernel((j - c) / factor);
      if (w == 0.0) continue;
      taps.index.push_back(wrap(j, n_in));
      taps.weight.push_back(w);
      total += w;
    }
    for (double& w : taps.weight) w /= total;
  }
  return table;
}

// Separable resampling: rows with `tx`, then columns with `ty`.
Field resample(const Field& f, const TapTable& tx, const TapTable& ty, double dx_out) {
  const int w_out = static_cast<int>(tx.size());
  const int h_out = static_cast<int>(ty.size());
  const int h_in = f.height();
  std::vector<double> tmp(static_cast<std::size_t>(h_in) * w_out);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h_in; ++y) {
    for (int x = 0; x < w_out; ++x) {
      const auto& t = tx[x];
      double acc = 0.0;
      for (std::size_t k = 0; k < t.index.size(); ++k) acc += t.weight[k] * f(t.index[k], y);
      tmp[static_cast<std::size_t>(y) * w_out + x] = acc;
    }
  }
  Field out(w_out, h_out, dx_out);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h_out; ++y) {
    const auto& t = ty[y];
    for (int x = 0; x < w_out; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < t.index.size(); ++k) {
        acc += t.weight[k] * tmp[static_cast<std::size_t>(t.index[k]) * w_out + x];
      }
      out(x, y) = acc;
    }
  }
  return out;
}

// Periodic separable convolution with w(d) = K(d/s)/s, |d| < 2s.
std::vector<double> keys_blur(const std::vector<double>& v, int w, int h, int scale) {
  const int reach = 2 * scale - 1;
  std::vector<double> kernel(static_cast<std::size_t>(2 * reach + 1));
  for (int d = -reach; d <= reach; ++d) kernel[d + reach] = keys_kernel(static_cast<double>(d) / scale) / scale;

  std::vector<double> tmp(v.size()), out(v.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -reach; d <= reach; ++d) acc += kernel[d + reach] * v[static_cast<std::size_t>(y) * w + wrap(x + d, w)];
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -reach; d <= reach; ++d) acc += kernel[d + reach] * tmp[static_cast<std::size_t>(wrap(y + d, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

}  // namespace

double keys_kernel(double x) {
  const double a = kKeysA;
  const double t = std::abs(x);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

Field bicubic_upsample(const Field& f, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample factor must be >= 1");
  return resample(f, upsample_taps(f.width(), factor), upsample_taps(f.height(), factor), f.dx() / factor);
}

SnapshotStack bicubic_upsample(const SnapshotStack& s, int factor) {
  return SnapshotStack({bicubic_upsample(s.channels[0], factor), bicubic_upsample(s.channels[1], factor),
                        bicubic_upsample(s.channels[2], factor)},
                       s.dt_snap);
}

Field bicubic_downsample(const Field& f, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  if (f.width() % factor != 0 || f.height() % factor != 0) {
    throw DimensionError("downsample: " + std::to_string(f.width()) + "x" + std::to_string(f.height()) +
                         " not divisible by " + std::to_string(factor));
  }
  return resample(f, downsample_taps(f.width(), factor), downsample_taps(f.height(), factor), f.dx() * factor);
}

SnapshotStack bicubic_downsample(const SnapshotStack& s, int factor) {
  return SnapshotStack({bicubic_downsample(s.channels[0], factor), bicubic_downsample(s.channels[1], factor),
                        bicubic_downsample(s.channels[2], factor)},
                       s.dt_snap);
}

Mask drop_mask(int width, int height, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("drop rate must lie in [0, 1]");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  const auto n_drop = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  std::vector<std::size_t> sites(n);
  std::iota(sites.begin(), sites.end(), std::size_t{0});
  Rng64 rng(seed);
  Mask m(width, height, true);
  for (std::size_t i = 0; i < n_drop; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n - 1)));
    std::swap(sites[i], sites[j]);
    m.bits[sites[i]] = 0;
  }
  return m;
}

SnapshotStack apply_mask(const SnapshotStack& s, const Mask& m) {
  if (m.width != s.width() || m.height != s.height()) throw DimensionError("mask dims differ from stack");
  SnapshotStack out = s;
  for (auto& ch : out.channels) {
    for (std::size_t i = 0; i < m.bits.size(); ++i) {
      if (!m.bits[i]) ch[i] = kDroppedSentinel;
    }
  }
  return out;
}

std::pair<SnapshotStack, Mask> drop_pixels(const SnapshotStack& s, double rate, std::uint64_t seed) {
  Mask m = drop_mask(s.width(), s.height(), rate, seed);
  return {apply_mask(s, m), std::move(m)};
}

SnapshotStack fill_missing(const SnapshotStack& s, const Mask& m) {
  if (m.width != s.width() || m.height != s.height()) throw DimensionError("mask dims differ from stack");
  const std::size_t present = m.present_count();
  if (present == 0) throw std::invalid_argument("fill_missing: every pixel is missing");
  SnapshotStack out = s;
  if (present == m.bits.size()) return out;

  const int w = s.width();
  const int h = s.height();
  // Minimum normalised support before a hole is accepted; guards against the
  // kernel's negative lobes producing a tiny or negative denominator.
  constexpr double kMinSupport = 0.05;

  std::vector<double> weight(m.bits.begin(), m.bits.end());
  std::vector<std::uint8_t> open(m.bits.size());
  for (std::size_t i = 0; i < open.size(); ++i) open[i] = m.bits[i] ? 0 : 1;
  std::size_t remaining = m.bits.size() - present;

  for (int scale = 2; remaining > 0 && scale <= 2 * std::max(w, h); scale *= 2) {
    const auto den = keys_blur(weight, w, h, scale);
    std::array<std::vector<double>, 3> num;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> masked(weight.size());
      const auto v = s.channels[c].values();
      for (std::size_t i = 0; i < masked.size(); ++i) masked[i] = weight[i] * v[i];
      num[c] = keys_blur(masked, w, h, scale);
    }
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (!open[i] || den[i] < kMinSupport) continue;
      for (int c = 0; c < 3; ++c) out.channels[c][i] = num[c][i] / den[i];
      open[i] = 0;
      --remaining;
    }
  }
  if (remaining > 0) {
    // Only reachable for pathological masks; fall back to the present mean.
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < weight.size(); ++i) acc += weight[i] * s.channels[c][i];
      const double mean = acc / static_cast<double>(present);
      for (std::size_t i = 0; i < open.size(); ++i) {
        if (open[i]) out.channels[c][i] = mean;
      }
    }
  }
  return out;
}

SnapshotStack bicubic_baseline(const SnapshotStack& lr, const Mask& m) {
  return bicubic_upsample(fill_missing(lr, m), 4);
}

}  // namespace plumesr
