#pragma once

#include <string>

#include "plumesr/container.hpp"
#include "plumesr/field.hpp"

namespace plumesr {

// Conversions between in-memory rasters and container arrays. Fields are
// widened to double on read; f32 storage rounds on write.

NamedArray field_to_array(const std::string& name, const Field& f, DType t = DType::f32);
NamedArray stack_to_array(const std::string& name, const SnapshotStack& s, DType t = DType::f32);
NamedArray mask_to_array(const std::string& name, const Mask& m);

/// Reads a [H, W] array (or slice `index` of a [N, H, W] array).
Field array_to_field(const NamedArray& a, double dx, std::size_t index = 0);
/// Reads a [3, H, W] array.
SnapshotStack array_to_stack(const NamedArray& a, double dx, double dt_snap);
/// Reads a [H, W] u8 array (or slice `index` of [N, H, W]).
Mask array_to_mask(const NamedArray& a, std::size_t index = 0);

/// Rounds every value through float32 (the storage precision).
Field quantize_f32(const Field& f);
SnapshotStack quantize_f32(const SnapshotStack& s);

}  // namespace plumesr
