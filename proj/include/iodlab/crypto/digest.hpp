// Copyright 2026 The iod-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IODLAB_CRYPTO_DIGEST_HPP
#define IODLAB_CRYPTO_DIGEST_HPP

#include <openssl/sha.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>

#include "iodlab/crypto/bytes.hpp"
#include "iodlab/error.hpp"

namespace iodlab {

/// A 32-byte SHA-256 output. Every h(.) in the protocol produces one of these.
class Digest {
 public:
  static constexpr std::size_t kSize = 32;

  /// All-zero digest.
  Digest() = default;
  explicit Digest(const std::array<std::uint8_t, kSize>& raw) : raw_(raw) {}

  static Digest from_bytes(ByteView bytes) {
    if (bytes.size() != kSize) {
      throw Error(ErrorKind::encoding,
                  "digest must be 32 bytes, got " + std::to_string(bytes.size()));
    }
    Digest d;
    std::copy(bytes.begin(), bytes.end(), d.raw_.begin());
    return d;
  }

  static Digest from_hex(std::string_view hex) { return from_bytes(iodlab::from_hex(hex)); }

  ByteView encoded() const noexcept { return raw_; }
  const std::array<std::uint8_t, kSize>& raw() const noexcept { return raw_; }
  std::string hex() const { return to_hex(raw_); }

  /// Mutable access for tamper tests that flip bytes in transit.
  std::uint8_t& operator[](std::size_t i) { return raw_.at(i); }
  std::uint8_t operator[](std::size_t i) const { return raw_.at(i); }

  friend auto operator<=>(const Digest&, const Digest&) = default;

 private:
  std::array<std::uint8_t, kSize> raw_{};
};

inline Digest hash(ByteView data) {
  std::array<std::uint8_t, Digest::kSize> out{};
  SHA256(data.data(), data.size(), out.data());
  return Digest(out);
}

inline Digest xor_digests(const Digest& a, const Digest& b) noexcept {
  std::array<std::uint8_t, Digest::kSize> out{};
  for (std::size_t i = 0; i < Digest::kSize; ++i) out[i] = a.raw()[i] ^ b.raw()[i];
  return Digest(out);
}

/// Byte-level XOR for callers holding raw buffers; lengths must agree.
inline Digest xor_bytes(ByteView a, ByteView b) {
  if (a.size() != b.size()) throw Error(ErrorKind::encoding, "xor operands differ in length");
  return xor_digests(Digest::from_bytes(a), Digest::from_bytes(b));
}

template <class T>
concept FieldEncodable = requires(const T& t) {
  { t.encoded() };
};

/// One operand of `||`. Owns a copy of its encoding.
class Field {
 public:
  Field(ByteView bytes) : bytes_(bytes.begin(), bytes.end()) {}

  template <FieldEncodable T>
  Field(const T& value) {
    const auto& e = value.encoded();
    bytes_.assign(e.begin(), e.end());
  }

  ByteView bytes() const noexcept { return bytes_; }

 private:
  Bytes bytes_;
};

/// Injective realization of `||`: each field becomes a 4-byte big-endian
/// length followed by its bytes, in argument order.
inline Bytes concat(std::initializer_list<Field> fields) {
  Bytes out;
  for (const Field& f : fields) {
    auto n = static_cast<std::uint32_t>(f.bytes().size());
    out.push_back(static_cast<std::uint8_t>(n >> 24));
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    out.insert(out.end(), f.bytes().begin(), f.bytes().end());
  }
  return out;
}

/// h(a || b || ...)
inline Digest hash_fields(std::initializer_list<Field> fields) { return hash(concat(fields)); }

}  // namespace iodlab

#endif  // IODLAB_CRYPTO_DIGEST_HPP
