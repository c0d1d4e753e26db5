#include <cmath>

#include "doctest.h"
#include "plumesr/metrics.hpp"
#include "plumesr/resample.hpp"
#include "test_support.hpp"

using namespace plumesr;
using testing::max_abs_diff;

namespace {

Field gaussian(int w, int h, double dx, double sigma_cells) {
  Field f(w, h, dx);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double rx = x - 0.45 * w, ry = y - 0.55 * h;
      f(x, y) = std::exp(-(rx * rx + ry * ry) / (2.0 * sigma_cells * sigma_cells));
    }
  }
  return f;
}

SnapshotStack stack_of(const Field& f) { return SnapshotStack({f, 0.5 * f, 0.25 * f}, 5.0); }

}  // namespace

TEST_CASE("Keys kernel values") {
  CHECK(keys_kernel(0.0) == 1.0);
  CHECK(keys_kernel(1.0) == 0.0);
  CHECK(keys_kernel(-2.0) == 0.0);
  CHECK(keys_kernel(2.5) == 0.0);
  CHECK(keys_kernel(0.5) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(keys_kernel(1.5) == doctest::Approx(-0.0625).epsilon(1e-15));
  CHECK(keys_kernel(-0.3) == keys_kernel(0.3));
  // Partition of unity at any offset.
  for (double t : {0.0, 0.1, 0.37, 0.5, 0.99}) {
    CHECK(keys_kernel(t + 1) + keys_kernel(t) + keys_kernel(t - 1) + keys_kernel(t - 2) ==
          doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("upsampling keeps constants and reproduces ramps") {
  const Field c(10, 6, 1.0, 0.42);
  const Field up = bicubic_upsample(c, 4);
  CHECK(up.width() == 40);
  CHECK(up.height() == 24);
  CHECK(up.dx() == 0.25);
  for (double v : up.values()) CHECK(v == doctest::Approx(0.42).epsilon(1e-14));

  Field ramp(16, 8, 1.0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 16; ++x) ramp(x, y) = 0.3 + 0.05 * x - 0.02 * y;
  }
  const Field r = bicubic_upsample(ramp, 4);
  // Away from the periodic seam, fine cell i sits at coarse coordinate (i + 0.5)/4 - 0.5.
  for (int y = 8; y < 24; ++y) {
    for (int x = 8; x < 56; ++x) {
      const double cx = (x + 0.5) / 4 - 0.5, cy = (y + 0.5) / 4 - 0.5;
      CHECK(std::abs(r(x, y) - (0.3 + 0.05 * cx - 0.02 * cy)) < 1e-12);
    }
  }

  CHECK(bicubic_upsample(ramp, 1) == ramp);
}

TEST_CASE("upsampling is linear") {
  const Field f = testing::random_field(12, 8, 1.0, 4);
  const Field g = testing::random_field(12, 8, 1.0, 5);
  const Field lhs = bicubic_upsample(1.7 * f + -0.4 * g, 4);
  const Field rhs = 1.7 * bicubic_upsample(f, 4) + -0.4 * bicubic_upsample(g, 4);
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("downsampling") {
  const Field c(32, 16, 0.25, 0.8);
  const Field cd = bicubic_downsample(c, 4);
  for (double v : cd.values()) CHECK(v == doctest::Approx(0.8).epsilon(1e-14));

  const Field f = testing::random_field(16, 8, 0.25, 6);
  CHECK(max_abs_diff(bicubic_downsample(f, 1), f) == 0.0);

  const Field big(400, 200, 0.25);
  const Field small = bicubic_downsample(big, 4);
  CHECK(small.width() == 100);
  CHECK(small.height() == 50);
  CHECK(small.dx() == 1.0);

  CHECK_THROWS_AS(bicubic_downsample(Field(18, 8, 0.25), 4), DimensionError);
}

TEST_CASE("downsample then upsample of a smooth Gaussian stays above 40 dB") {
  const Field g = gaussian(96, 64, 0.25, 8.0);
  const Field back = bicubic_upsample(bicubic_downsample(g, 4), 4);
  const double db = psnr(back, g);
  MESSAGE("round-trip PSNR " << db << " dB");
  CHECK(db > 40.0);
}

TEST_CASE("drop_pixels removes an exact count and keeps the rest bit-exact") {
  const SnapshotStack s = testing::random_stack(100, 50, 1.0, 7);
  const auto [dropped, mask] = drop_pixels(s, 0.4, 99);
  CHECK(mask.dropped_count() == 2000);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      if (mask.bits[i]) {
        REQUIRE(dropped.channels[c][i] == s.channels[c][i]);
      } else {
        REQUIRE(dropped.channels[c][i] == kDroppedSentinel);
      }
    }
  }

  CHECK(drop_mask(100, 50, 0.4, 99) == mask);
  CHECK(drop_mask(100, 50, 0.4, 100) != mask);
  CHECK(drop_mask(7, 3, 0.5, 1).dropped_count() == 11);  // round(10.5) away from zero

  const auto [same, full] = drop_pixels(s, 0.0, 3);
  CHECK(full.dropped_count() == 0);
  CHECK(same == s);
  CHECK(drop_mask(10, 10, 1.0, 3).present_count() == 0);
  CHECK_THROWS(drop_mask(10, 10, 1.5, 3));
}

TEST_CASE("fill_missing") {
  SUBCASE("full mask is the identity") {
    const SnapshotStack s = testing::random_stack(20, 12, 1.0, 8);
    CHECK(fill_missing(s, Mask(20, 12)) == s);
  }
  SUBCASE("constants stay constant under any mask") {
    const Field c(24, 16, 1.0, 0.6);
    const auto [holes, mask] = drop_pixels(stack_of(c), 0.6, 12);
    const SnapshotStack filled = fill_missing(holes, mask);
    for (double v : filled.channels[0].values()) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
  }
  SUBCASE("present pixels pass through and holes are filled smoothly") {
    const SnapshotStack truth = stack_of(gaussian(64, 48, 1.0, 4.0));
    const auto [holes, mask] = drop_pixels(truth, 0.2, 21);
    const SnapshotStack filled = fill_missing(holes, mask);
    double se = 0.0;
    for (std::size_t i = 0; i < mask.bits.size(); ++i) {
      if (mask.bits[i]) REQUIRE(filled.channels[1][i] == truth.channels[1][i]);
      const double d = filled.channels[0][i] - truth.channels[0][i];
      se += d * d;
    }
    const double rms = std::sqrt(se / static_cast<double>(mask.bits.size()));
    MESSAGE("fill rms " << rms);
    CHECK(rms < 0.02);
    CHECK(fill_missing(filled, Mask(64, 48)) == filled);
  }
  SUBCASE("large gaps are still covered") {
    const SnapshotStack truth = stack_of(Field(32, 32, 1.0, 0.3));
    Mask m(32, 32);
    for (int y = 4; y < 28; ++y) {
      for (int x = 2; x < 30; ++x) m.bits[static_cast<std::size_t>(y) * 32 + x] = 0;
    }
    const SnapshotStack filled = fill_missing(apply_mask(truth, m), m);
    for (double v : filled.channels[0].values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("an empty mask is rejected") {
    const SnapshotStack s = testing::random_stack(8, 8, 1.0, 1);
    CHECK_THROWS(fill_missing(s, drop_mask(8, 8, 1.0, 1)));
    CHECK_THROWS_AS(fill_missing(s, Mask(8, 9)), DimensionError);
  }
}

TEST_CASE("bicubic baseline") {
  const SnapshotStack lr = stack_of(Field(25, 10, 1.0, 0.2));
  const SnapshotStack sr = bicubic_baseline(lr, Mask(25, 10));
  CHECK(sr.width() == 100);
  CHECK(sr.height() == 40);
  for (double v : sr.channels[0].values()) CHECK(v == doctest::Approx(0.2).epsilon(1e-14));
  for (double v : sr.channels[2].values()) CHECK(v == doctest::Approx(0.05).epsilon(1e-14));
}
