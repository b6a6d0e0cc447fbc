#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "deepfeat/core/binary_io.hpp"
#include "deepfeat/tensor/activation_tensor.hpp"

namespace deepfeat {

// .actv layout, all little-endian:
//   "ACTV" | u16 version = 1 | u8 dtype = 1 (f32) | u32 D | u32 M | u32 N | D*M*N f32, channel-major
inline constexpr std::string_view kTensorMagic = "ACTV";
inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint8_t kTensorDtypeF32 = 1;
inline constexpr std::size_t kTensorHeaderBytes = 4 + 2 + 1 + 3 * 4;

inline std::vector<char> encode_tensor(const ActivationTensor& tensor) {
  binary::Writer w;
  w.bytes(kTensorMagic);
  w.uint(kTensorVersion);
  w.uint(kTensorDtypeF32);
  w.uint(tensor.shape().channels);
  w.uint(tensor.shape().height);
  w.uint(tensor.shape().width);
  for (float v : tensor.values()) w.f32(v);
  return w.data();
}

inline ActivationTensor decode_tensor(std::span<const char> bytes, const std::string& context) {
  binary::Reader r(bytes, context);
  if (r.bytes(4) != kTensorMagic) throw FormatError(context + ": bad magic (expected \"ACTV\")");
  if (const auto version = r.uint<std::uint16_t>(); version != kTensorVersion)
    throw FormatError(context + ": unsupported format version " + std::to_string(version));
  if (const auto dtype = r.uint<std::uint8_t>(); dtype != kTensorDtypeF32)
    throw FormatError(context + ": unsupported dtype code " + std::to_string(dtype));
  TensorShape shape;
  shape.channels = r.uint<std::uint32_t>();
  shape.height = r.uint<std::uint32_t>();
  shape.width = r.uint<std::uint32_t>();
  if (shape.channels == 0 || shape.height == 0 || shape.width == 0)
    throw FormatError(context + ": zero dimension in header " + shape.str());
  if (r.remaining() / 4 < shape.size())
    throw LengthError(context + ": payload truncated, header " + shape.str() + " needs " +
                      std::to_string(shape.size() * 4) + " bytes, found " + std::to_string(r.remaining()));
  if (r.remaining() != shape.size() * 4)
    throw LengthError(context + ": " + std::to_string(r.remaining() - shape.size() * 4) +
                      " trailing bytes after payload");
  std::vector<float> values(shape.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = r.f32();
    if (!std::isfinite(values[i]))
      throw ValidationError(context + ": non-finite value at element offset " + std::to_string(i) + " (byte " +
                            std::to_string(kTensorHeaderBytes + 4 * i) + ")");
  }
  return ActivationTensor(shape, std::move(values));
}

inline void write_tensor(const ActivationTensor& tensor, const std::string& destination) {
  const auto bytes = encode_tensor(tensor);
  try {
    binary::write_file_atomic(destination, bytes);
  } catch (const IoError& e) {
    throw IoError("write error for '" + destination + "': " + e.what());
  }
}

inline ActivationTensor read_tensor(const std::string& source) {
  const auto bytes = binary::read_file(source);
  return decode_tensor(bytes, source);
}

}  // namespace deepfeat
