#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "deepfeat/core/error.hpp"

namespace deepfeat::binary {

// Little-endian byte buffer writer. Multi-byte values are emitted byte by byte so
// the output does not depend on host endianness.
class Writer {
 public:
  void bytes(std::string_view raw) { buf_.insert(buf_.end(), raw.begin(), raw.end()); }

  template <std::unsigned_integral U>
  void uint(U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
  }

  void f32(float value) { uint(std::bit_cast<std::uint32_t>(value)); }
  void f64(double value) { uint(std::bit_cast<std::uint64_t>(value)); }

  void str(std::string_view s) {
    uint(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }

  template <typename T>
  void f64_array(std::span<const T> values) {
    uint(static_cast<std::uint64_t>(values.size()));
    for (auto v : values) f64(static_cast<double>(v));
  }

  void index_array(std::span<const std::size_t> values) {
    uint(static_cast<std::uint64_t>(values.size()));
    for (auto v : values) uint(static_cast<std::uint64_t>(v));
  }

  [[nodiscard]] const std::vector<char>& data() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  Reader(std::span<const char> data, std::string context) : data_(data), context_(std::move(context)) {}

  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view out(data_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  template <std::unsigned_integral U>
  U uint() {
    need(sizeof(U));
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      value |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return value;
  }

  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }

  std::string str() {
    const auto n = uint<std::uint32_t>();
    return std::string(bytes(n));
  }

  std::vector<double> f64_array() {
    const auto n = checked_count(uint<std::uint64_t>(), 8);
    std::vector<double> out(n);
    for (auto& v : out) v = f64();
    return out;
  }

  std::vector<std::size_t> index_array() {
    const auto n = checked_count(uint<std::uint64_t>(), 8);
    std::vector<std::size_t> out(n);
    for (auto& v : out) v = static_cast<std::size_t>(uint<std::uint64_t>());
    return out;
  }

  [[nodiscard]] std::size_t position() const { return pos_; }
  [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }
  [[nodiscard]] const std::string& context() const { return context_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n)
      throw LengthError(context_ + ": truncated at byte " + std::to_string(pos_) + " (need " + std::to_string(n) +
                        " more, have " + std::to_string(data_.size() - pos_) + ")");
  }

  std::size_t checked_count(std::uint64_t n, std::size_t elem) const {
    if (n > remaining() / elem) need(static_cast<std::size_t>(n) * elem);
    return static_cast<std::size_t>(n);
  }

  std::span<const char> data_;
  std::size_t pos_ = 0;
  std::string context_;
};

inline std::vector<char> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return data;
}

// Writes to a sibling temp file, then renames over the destination.
inline void write_file_atomic(const std::string& path, std::span<const char> data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("write failure on '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

inline void write_file_atomic(const std::string& path, std::string_view text) {
  write_file_atomic(path, std::span<const char>(text.data(), text.size()));
}

}  // namespace deepfeat::binary
