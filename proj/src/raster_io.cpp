#include "plumesr/raster_io.hpp"

namespace plumesr {

namespace {

template <typename T>
void append_values(std::vector<T>& out, const Field& f) {
  for (double v : f.values()) out.push_back(static_cast<T>(v));
}

NamedArray make_array(const std::string& name, std::vector<std::uint64_t> shape, DType t) {
  NamedArray a;
  a.name = name;
  a.shape = std::move(shape);
  switch (t) {
    case DType::f32: a.data = std::vector<float>{}; break;
    case DType::f64: a.data = std::vector<double>{}; break;
    case DType::u8: throw std::invalid_argument("fields cannot be stored as u8");
  }
  return a;
}

void append_field(NamedArray& a, const Field& f) {
  std::visit(
      [&](auto& vec) {
        using T = typename std::decay_t<decltype(vec)>::value_type;
        if constexpr (!std::is_same_v<T, std::uint8_t>) append_values(vec, f);
      },
      a.data);
}

std::pair<int, int> plane_dims(const NamedArray& a, std::size_t rank_expected) {
  if (a.shape.size() != rank_expected && !(rank_expected == 2 && a.shape.size() == 3)) {
    throw ContainerError(ContainerErrc::shape_mismatch,
                         "array '" + a.name + "' has unexpected rank " + std::to_string(a.shape.size()));
  }
  const auto n = a.shape.size();
  return {static_cast<int>(a.shape[n - 1]), static_cast<int>(a.shape[n - 2])};
}

}  // namespace

NamedArray field_to_array(const std::string& name, const Field& f, DType t) {
  auto a = make_array(name, {static_cast<std::uint64_t>(f.height()), static_cast<std::uint64_t>(f.width())}, t);
  append_field(a, f);
  return a;
}

NamedArray stack_to_array(const std::string& name, const SnapshotStack& s, DType t) {
  auto a = make_array(name,
                      {3, static_cast<std::uint64_t>(s.height()), static_cast<std::uint64_t>(s.width())}, t);
  for (const auto& ch : s.channels) append_field(a, ch);
  return a;
}

NamedArray mask_to_array(const std::string& name, const Mask& m) {
  NamedArray a;
  a.name = name;
  a.shape = {static_cast<std::uint64_t>(m.height), static_cast<std::uint64_t>(m.width)};
  a.data = m.bits;
  return a;
}

Field array_to_field(const NamedArray& a, double dx, std::size_t index) {
  const auto [w, h] = plane_dims(a, 2);
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  const std::size_t planes = a.shape.size() == 3 ? a.shape[0] : 1;
  if (index >= planes) {
    throw ContainerError(ContainerErrc::shape_mismatch, "plane index out of range in '" + a.name + "'");
  }
  std::vector<double> v(plane);
  std::visit(
      [&](const auto& vec) {
        for (std::size_t i = 0; i < plane; ++i) v[i] = static_cast<double>(vec[index * plane + i]);
      },
      a.data);
  return Field(w, h, dx, std::move(v));
}

SnapshotStack array_to_stack(const NamedArray& a, double dx, double dt_snap) {
  if (a.shape.size() != 3 || a.shape[0] != 3) {
    throw ContainerError(ContainerErrc::shape_mismatch, "array '" + a.name + "' is not a [3,H,W] stack");
  }
  return SnapshotStack({array_to_field(a, dx, 0), array_to_field(a, dx, 1), array_to_field(a, dx, 2)},
                       dt_snap);
}

Mask array_to_mask(const NamedArray& a, std::size_t index) {
  if (a.dtype() != DType::u8) {
    throw ContainerError(ContainerErrc::shape_mismatch, "mask '" + a.name + "' must be u8");
  }
  const auto [w, h] = plane_dims(a, 2);
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  Mask m(w, h);
  const auto& src = a.u8();
  if ((index + 1) * plane > src.size()) {
    throw ContainerError(ContainerErrc::shape_mismatch, "mask plane index out of range");
  }
  std::copy(src.begin() + static_cast<std::ptrdiff_t>(index * plane),
            src.begin() + static_cast<std::ptrdiff_t>((index + 1) * plane), m.bits.begin());
  return m;
}

Field quantize_f32(const Field& f) {
  Field out = f;
  for (double& v : out.values()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

SnapshotStack quantize_f32(const SnapshotStack& s) {
  SnapshotStack out = s;
  for (auto& ch : out.channels) ch = quantize_f32(ch);
  return out;
}

}  // namespace plumesr
