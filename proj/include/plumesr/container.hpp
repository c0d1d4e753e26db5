#pragma once

// "PLM1" binary container:
//   magic "PLM1" | u32 version (=1) | u64 json_len | UTF-8 JSON | arrays
// All integers and array elements are little-endian; arrays are row-major and
// stored back-to-back in the order listed under the JSON key "arrays".

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace plumesr {

enum class ContainerErrc {
  bad_magic,
  version_mismatch,
  truncated,
  shape_mismatch,
  io,
};

const char* to_string(ContainerErrc e);

class ContainerError : public std::runtime_error {
public:
  ContainerError(ContainerErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ContainerErrc code() const { return code_; }

private:
  ContainerErrc code_;
};

enum class DType { f32, u8, f64 };

const char* to_string(DType t);
DType dtype_from_string(const std::string& s);
std::size_t dtype_size(DType t);

struct NamedArray {
  using Storage = std::variant<std::vector<float>, std::vector<std::uint8_t>, std::vector<double>>;

  std::string name;
  std::vector<std::uint64_t> shape;
  Storage data;

  DType dtype() const;
  std::size_t element_count() const;
  std::uint64_t shape_product() const;

  const std::vector<float>& f32() const { return std::get<std::vector<float>>(data); }
  const std::vector<std::uint8_t>& u8() const { return std::get<std::vector<std::uint8_t>>(data); }
  const std::vector<double>& f64() const { return std::get<std::vector<double>>(data); }

  friend bool operator==(const NamedArray&, const NamedArray&) = default;
};

struct Container {
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<NamedArray> arrays;

  const NamedArray& array(const std::string& name) const;
  bool has_array(const std::string& name) const;

  friend bool operator==(const Container&, const Container&) = default;
};

inline constexpr std::uint32_t kContainerVersion = 1;

/// Serializes to bytes. The "arrays" metadata key is (re)written from `c.arrays`.
std::vector<std::uint8_t> encode_container(const Container& c);
Container decode_container(const std::vector<std::uint8_t>& bytes);

/// Writes atomically (temp file + rename).
void write_container(const std::filesystem::path& path, const Container& c);
Container read_container(const std::filesystem::path& path);

}  // namespace plumesr
