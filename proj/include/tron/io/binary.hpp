// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tron::io {

/// CRC-32 (IEEE, as used by zlib/PNG).
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Append-only little-endian encoder.
class ByteWriter {
 public:
  void bytes(std::string_view s);
  void u8(std::uint8_t v);
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v);
  void f64(double v);
  void f64s(std::span<const double> values);
  /// u32 length prefix followed by the raw bytes.
  void string(std::string_view s);
  /// Appends the CRC-32 of everything written so far.
  void crc();

  const std::vector<std::uint8_t>& buffer() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Bounds-checked little-endian decoder; throws DataError on truncation.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::string source = "buffer")
      : data_(data), source_(std::move(source)) {}

  /// Verifies the trailing CRC-32 and restricts reading to the bytes before it.
  void verify_crc();
  void expect(std::string_view magic);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64();
  double f64();
  std::vector<double> f64s(std::size_t count);
  std::string string();

  std::size_t remaining() const { return limit() - pos_; }
  void expect_end() const;

 private:
  std::size_t limit() const { return limit_ ? limit_ : data_.size(); }
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> data_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t limit_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// CRC-32 of a file's bytes, as 8 lowercase hex digits.
std::string file_checksum(const std::filesystem::path& path);
std::string hex32(std::uint32_t v);

}  // namespace tron::io
