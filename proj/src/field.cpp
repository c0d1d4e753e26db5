#include "plumesr/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace plumesr {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

void check_extent(int width, int height, double dx) {
  if (width < Field::kMinExtent || height < Field::kMinExtent) {
    throw DimensionError("field extent " + std::to_string(width) + "x" +
                         std::to_string(height) + " below stencil minimum of 4");
  }
  if (!(dx > 0.0) || !std::isfinite(dx)) {
    throw std::invalid_argument("field grid spacing must be positive and finite");
  }
}

}  // namespace

Field::Field(int width, int height, double dx, double fill)
    : width_(width), height_(height), dx_(dx) {
  check_extent(width, height, dx);
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Field::Field(int width, int height, double dx, std::vector<double> values)
    : width_(width), height_(height), dx_(dx), values_(std::move(values)) {
  check_extent(width, height, dx);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw DimensionError("field value count does not equal width*height");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("field values must be finite");
  }
}

double Field::wrapped(int x, int y) const {
  return values_[index(wrap(x, width_), wrap(y, height_))];
}

double Field::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool Field::all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Field& Field::operator+=(const Field& rhs) {
  require_same_grid(*this, rhs, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  require_same_grid(*this, rhs, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field shift_periodic(const Field& f, int sx, int sy) {
  Field out(f.width(), f.height(), f.dx());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      out(wrap(x + sx, f.width()), wrap(y + sy, f.height())) = f(x, y);
    }
  }
  return out;
}

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!a.same_grid(b)) {
    throw DimensionError(std::string(what) + ": grids differ (" + std::to_string(a.width()) +
                         "x" + std::to_string(a.height()) + " vs " +
                         std::to_string(b.width()) + "x" + std::to_string(b.height()) + ")");
  }
}

SnapshotStack::SnapshotStack(std::array<Field, 3> ch, double dt)
    : channels(std::move(ch)), dt_snap(dt) {
  if (!(dt_snap > 0.0)) throw std::invalid_argument("snapshot interval must be positive");
  require_same_grid(channels[0], channels[1], "snapshot stack");
  require_same_grid(channels[0], channels[2], "snapshot stack");
}

SnapshotStack SnapshotStack::offset(double c) const {
  SnapshotStack out = *this;
  for (auto& ch : out.channels) {
    for (double& v : ch.values()) v += c;
  }
  return out;
}

SnapshotStack SnapshotStack::scaled(double s) const {
  SnapshotStack out = *this;
  for (auto& ch : out.channels) ch *= s;
  return out;
}

void require_same_grid(const SnapshotStack& a, const SnapshotStack& b, const char* what) {
  require_same_grid(a.channels[0], b.channels[0], what);
}

std::size_t Mask::present_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

}  // namespace plumesr
