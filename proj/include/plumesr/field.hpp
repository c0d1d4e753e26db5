#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace plumesr {

/// Thrown when two rasters (or a raster and its metadata) disagree in shape.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// 2D scalar raster on a uniform periodic grid, row-major (index = y*width + x).
class Field {
public:
  static constexpr int kMinExtent = 4;

  Field() = default;
  Field(int width, int height, double dx, double fill = 0.0);
  Field(int width, int height, double dx, std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  double dx() const { return dx_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int x, int y) { return values_[index(x, y)]; }
  double operator()(int x, int y) const { return values_[index(x, y)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Periodic access; x and y may be any integer.
  double wrapped(int x, int y) const;

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_grid(const Field& other) const {
    return width_ == other.width_ && height_ == other.height_ && dx_ == other.dx_;
  }

  double sum() const;
  double max() const;
  double min() const;
  bool all_zero() const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(double s);

  friend bool operator==(const Field&, const Field&) = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  double dx_ = 1.0;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Shifts a field by whole cells on the periodic grid: out(x+sx, y+sy) = in(x, y).
Field shift_periodic(const Field& f, int sx, int sy);

void require_same_grid(const Field& a, const Field& b, const char* what);

/// Three consecutive snapshots in (t-1, t, t+1) order.
struct SnapshotStack {
  std::array<Field, 3> channels;
  double dt_snap = 1.0;

  SnapshotStack() = default;
  SnapshotStack(std::array<Field, 3> ch, double dt);

  int width() const { return channels[0].width(); }
  int height() const { return channels[0].height(); }
  double dx() const { return channels[0].dx(); }
  const Field& prev() const { return channels[0]; }
  const Field& mid() const { return channels[1]; }
  const Field& next() const { return channels[2]; }

  bool same_grid(const SnapshotStack& o) const { return channels[0].same_grid(o.channels[0]); }

  /// Adds `c` to every value in every channel.
  SnapshotStack offset(double c) const;
  SnapshotStack scaled(double s) const;

  friend bool operator==(const SnapshotStack&, const SnapshotStack&) = default;
};

void require_same_grid(const SnapshotStack& a, const SnapshotStack& b, const char* what);

/// Per-pixel presence flags; 1 = observed, 0 = dropped.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h, bool present = true)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, present ? 1 : 0) {}

  std::size_t present_count() const;
  std::size_t dropped_count() const { return bits.size() - present_count(); }
  bool present(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }

  friend bool operator==(const Mask&, const Mask&) = default;
};

}  // namespace plumesr
