#include "plumesr/container.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace plumesr {

using nlohmann::json;

const char* to_string(ContainerErrc e) {
  switch (e) {
    case ContainerErrc::bad_magic: return "bad magic";
    case ContainerErrc::version_mismatch: return "version mismatch";
    case ContainerErrc::truncated: return "truncated payload";
    case ContainerErrc::shape_mismatch: return "shape/descriptor disagreement";
    case ContainerErrc::io: return "i/o failure";
  }
  return "unknown";
}

const char* to_string(DType t) {
  switch (t) {
    case DType::f32: return "f32";
    case DType::u8: return "u8";
    case DType::f64: return "f64";
  }
  return "?";
}

DType dtype_from_string(const std::string& s) {
  if (s == "f32") return DType::f32;
  if (s == "u8") return DType::u8;
  if (s == "f64") return DType::f64;
  throw ContainerError(ContainerErrc::shape_mismatch, "unknown dtype '" + s + "'");
}

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::f32: return 4;
    case DType::u8: return 1;
    case DType::f64: return 8;
  }
  return 0;
}

DType NamedArray::dtype() const {
  switch (data.index()) {
    case 0: return DType::f32;
    case 1: return DType::u8;
    default: return DType::f64;
  }
}

std::size_t NamedArray::element_count() const {
  return std::visit([](const auto& v) { return v.size(); }, data);
}

std::uint64_t NamedArray::shape_product() const {
  std::uint64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

const NamedArray& Container::array(const std::string& name) const {
  auto it = std::find_if(arrays.begin(), arrays.end(),
                         [&](const NamedArray& a) { return a.name == name; });
  if (it == arrays.end()) {
    throw ContainerError(ContainerErrc::shape_mismatch, "no array named '" + name + "'");
  }
  return *it;
}

bool Container::has_array(const std::string& name) const {
  return std::any_of(arrays.begin(), arrays.end(),
                     [&](const NamedArray& a) { return a.name == name; });
}

namespace {

constexpr char kMagic[4] = {'P', 'L', 'M', '1'};

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

template <typename U>
U get_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

void append_payload(std::vector<std::uint8_t>& out, const NamedArray& a) {
  std::visit(
      [&](const auto& vec) {
        using T = typename std::decay_t<decltype(vec)>::value_type;
        if constexpr (std::is_same_v<T, float>) {
          for (float f : vec) put_le(out, std::bit_cast<std::uint32_t>(f));
        } else if constexpr (std::is_same_v<T, double>) {
          for (double d : vec) put_le(out, std::bit_cast<std::uint64_t>(d));
        } else {
          out.insert(out.end(), vec.begin(), vec.end());
        }
      },
      a.data);
}

NamedArray::Storage read_payload(DType t, const std::uint8_t* p, std::size_t n) {
  switch (t) {
    case DType::f32: {
      std::vector<float> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<float>(get_le<std::uint32_t>(p + 4 * i));
      return v;
    }
    case DType::f64: {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<double>(get_le<std::uint64_t>(p + 8 * i));
      return v;
    }
    case DType::u8:
      return std::vector<std::uint8_t>(p, p + n);
  }
  return {};
}

}  // namespace

std::vector<std::uint8_t> encode_container(const Container& c) {
  json meta = c.metadata.is_object() ? c.metadata : json::object();
  json descriptors = json::array();
  for (const auto& a : c.arrays) {
    if (a.shape_product() != a.element_count()) {
      throw ContainerError(ContainerErrc::shape_mismatch,
                           "array '" + a.name + "' shape does not match element count");
    }
    descriptors.push_back({{"name", a.name}, {"dtype", to_string(a.dtype())}, {"shape", a.shape}});
  }
  meta["arrays"] = descriptors;
  const std::string text = meta.dump();

  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kContainerVersion);
  put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& a : c.arrays) append_payload(out, a);
  return out;
}

Container decode_container(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t kHeader = 4 + 4 + 8;
  if (bytes.size() < 4) throw ContainerError(ContainerErrc::truncated, "missing header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ContainerError(ContainerErrc::bad_magic, "expected \"PLM1\"");
  }
  if (bytes.size() < kHeader) throw ContainerError(ContainerErrc::truncated, "missing header");
  const auto version = get_le<std::uint32_t>(bytes.data() + 4);
  if (version != kContainerVersion) {
    throw ContainerError(ContainerErrc::version_mismatch,
                         "file version " + std::to_string(version) + ", reader supports 1");
  }
  const auto json_len = get_le<std::uint64_t>(bytes.data() + 8);
  if (json_len > bytes.size() - kHeader) {
    throw ContainerError(ContainerErrc::truncated, "metadata extends past end of file");
  }

  Container c;
  const auto* text = reinterpret_cast<const char*>(bytes.data() + kHeader);
  try {
    c.metadata = json::parse(text, text + json_len);
  } catch (const json::exception& e) {
    throw ContainerError(ContainerErrc::shape_mismatch, std::string("metadata: ") + e.what());
  }
  if (!c.metadata.is_object() || !c.metadata.contains("arrays") ||
      !c.metadata["arrays"].is_array()) {
    throw ContainerError(ContainerErrc::shape_mismatch, "metadata lacks an \"arrays\" list");
  }

  std::size_t offset = kHeader + json_len;
  for (const auto& d : c.metadata["arrays"]) {
    NamedArray a;
    try {
      a.name = d.at("name").get<std::string>();
      a.shape = d.at("shape").get<std::vector<std::uint64_t>>();
      const DType t = dtype_from_string(d.at("dtype").get<std::string>());
      const std::uint64_t n = a.shape_product();
      const std::uint64_t nbytes = n * dtype_size(t);
      if (nbytes > bytes.size() - offset) {
        throw ContainerError(ContainerErrc::truncated, "array '" + a.name + "' payload cut short");
      }
      a.data = read_payload(t, bytes.data() + offset, static_cast<std::size_t>(n));
      offset += static_cast<std::size_t>(nbytes);
    } catch (const json::exception& e) {
      throw ContainerError(ContainerErrc::shape_mismatch, std::string("descriptor: ") + e.what());
    }
    c.arrays.push_back(std::move(a));
  }
  if (offset != bytes.size()) {
    throw ContainerError(ContainerErrc::shape_mismatch,
                         std::to_string(bytes.size() - offset) + " trailing bytes not described");
  }
  return c;
}

void write_container(const std::filesystem::path& path, const Container& c) {
  const auto bytes = encode_container(c);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw ContainerError(ContainerErrc::io, "cannot open " + tmp.string());
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw ContainerError(ContainerErrc::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ContainerError(ContainerErrc::io, "rename to " + path.string() + ": " + ec.message());
}

Container read_container(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ContainerError(ContainerErrc::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_container(bytes);
}

}  // namespace plumesr
