#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace mfdm {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; add byte swaps for this platform");

inline void put_u32(std::string& out, std::uint32_t v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

inline void put_u64(std::string& out, std::uint64_t v) {
  out.append(reinterpret_cast<const char*>(&v), 8);
}

inline void put_f32(std::string& out, float v) {
  out.append(reinterpret_cast<const char*>(&v), 4);
}

// Cursor over a byte buffer that reports the offset of any truncation.
class ByteReader {
 public:
  ByteReader(const std::string& bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  std::uint32_t u32() { return read<std::uint32_t>(); }
  std::uint64_t u64() { return read<std::uint64_t>(); }
  float f32() { return read<float>(); }

  std::string raw(std::size_t n) {
    require(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }
  std::size_t offset() const { return pos_; }

  void require(std::size_t n);

 private:
  template <typename T>
  T read() {
    require(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

// Whole-file IO. write_file_atomic stages into a sibling temp file and
// renames, so interrupted runs never leave a partial artifact behind.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace mfdm
