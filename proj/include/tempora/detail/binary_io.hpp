#ifndef TEMPORA_DETAIL_BINARY_IO_HPP_
#define TEMPORA_DETAIL_BINARY_IO_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "tempora/error.hpp"

namespace tempora::detail {

// Little-endian primitives shared by the corpus and checkpoint files.

inline void write_u64(std::ostream &out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) {
    b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
  out.write(b.data(), 8);
}

inline void write_u32(std::ostream &out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) {
    b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
  out.write(b.data(), 4);
}

inline void write_f64(std::ostream &out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline void write_string(std::ostream &out, const std::string &s) {
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

class Reader {
public:
  Reader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {}

  void read_bytes(char *dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw Error("'" + source_ + "': unexpected end of file");
    }
  }

  std::uint64_t u64() {
    std::array<unsigned char, 8> b{};
    read_bytes(reinterpret_cast<char *>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | b[i];
    }
    return v;
  }

  std::uint32_t u32() {
    std::array<unsigned char, 4> b{};
    read_bytes(reinterpret_cast<char *>(b.data()), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | b[i];
    }
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string string(std::uint64_t max_len = (1ull << 32)) {
    const auto n = u64();
    if (n > max_len) {
      throw Error("'" + source_ + "': corrupt string length");
    }
    std::string s(n, '\0');
    read_bytes(s.data(), n);
    return s;
  }

  /// Bound for element counts read from the file, so a corrupt header
  /// cannot trigger a huge allocation.
  std::uint64_t count(std::uint64_t max) {
    const auto n = u64();
    if (n > max) {
      throw Error("'" + source_ + "': corrupt element count");
    }
    return n;
  }

  const std::string &source() const { return source_; }

private:
  std::istream &in_;
  std::string source_;
};

} // namespace tempora::detail

#endif // TEMPORA_DETAIL_BINARY_IO_HPP_
