#pragma once

#include <cstdint>
#include <utility>

#include "plumesr/field.hpp"

namespace plumesr {

/// Keys cubic convolution kernel with a = -0.5.
double keys_kernel(double x);

// Sample grids use the align-centers convention: fine cell i maps to coarse
// index (i + 0.5)/factor - 0.5. Edges wrap periodically.

Field bicubic_upsample(const Field& f, int factor);
SnapshotStack bicubic_upsample(const SnapshotStack& s, int factor);

/// Anti-aliased: the kernel is stretched by `factor` and renormalised.
Field bicubic_downsample(const Field& f, int factor);
SnapshotStack bicubic_downsample(const SnapshotStack& s, int factor);

/// Sentinel written into dropped pixels.
inline constexpr double kDroppedSentinel = 0.0;

/// Drops exactly round(rate*W*H) sites (seeded partial Fisher-Yates), the
/// same sites in all three channels.
std::pair<SnapshotStack, Mask> drop_pixels(const SnapshotStack& s, double rate, std::uint64_t seed);
Mask drop_mask(int width, int height, double rate, std::uint64_t seed);
SnapshotStack apply_mask(const SnapshotStack& s, const Mask& m);

/// Normalised convolution with the Keys footprint, widened by doubling until
/// every hole has support. Present pixels are returned unchanged.
SnapshotStack fill_missing(const SnapshotStack& s, const Mask& m);

/// fill_missing followed by 4x bicubic upsampling.
SnapshotStack bicubic_baseline(const SnapshotStack& lr, const Mask& m);

}  // namespace plumesr
