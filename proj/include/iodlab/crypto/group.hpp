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

#ifndef IODLAB_CRYPTO_GROUP_HPP
#define IODLAB_CRYPTO_GROUP_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "iodlab/crypto/bytes.hpp"
#include "iodlab/crypto/rng.hpp"
#include "iodlab/error.hpp"

namespace iodlab {

enum class GroupId { curve, toy };

constexpr std::string_view to_string(GroupId id) noexcept {
  return id == GroupId::curve ? "curve" : "toy";
}

inline GroupId parse_group_id(std::string_view name) {
  if (name == "curve") return GroupId::curve;
  if (name == "toy") return GroupId::toy;
  throw Error(ErrorKind::invalid_argument, "unknown group '" + std::string(name) + "'");
}

/// Exponent in [1, q-1], stored as a fixed-length big-endian string whose
/// length is the active group's scalar size. The same encoding is what
/// gets hashed when a nonce appears inside h(.).
class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(Bytes big_endian) : bytes_(std::move(big_endian)) {}

  ByteView encoded() const noexcept { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  friend auto operator<=>(const Scalar&, const Scalar&) = default;

 private:
  Bytes bytes_;
};

/// Canonical fixed-length encoding of a non-identity group element.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(Bytes encoding) : bytes_(std::move(encoding)) {}

  ByteView encoded() const noexcept { return bytes_; }
  std::string hex() const { return to_hex(bytes_); }

  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  Bytes bytes_;
};

/// Prime-order group with generator P. Implementations are stateless after
/// construction and safe to share across threads.
class Group {
 public:
  virtual ~Group() = default;

  virtual GroupId id() const noexcept = 0;
  virtual std::size_t scalar_size() const noexcept = 0;
  virtual std::size_t element_size() const noexcept = 0;
  /// Big-endian group order q, scalar_size() bytes.
  virtual ByteView order() const noexcept = 0;
  virtual const GroupElement& generator() const noexcept = 0;

  virtual bool is_valid_element(ByteView encoding) const = 0;

  /// k * E. Throws EncodingError if E is not a valid element or k is out of range.
  virtual GroupElement scalar_mult(const Scalar& k, const GroupElement& e) const = 0;

  GroupElement mul_base(const Scalar& k) const { return scalar_mult(k, generator()); }

  bool is_valid_scalar(const Scalar& k) const noexcept {
    ByteView v = k.encoded();
    if (v.size() != scalar_size()) return false;
    bool nonzero = false;
    for (auto b : v) nonzero = nonzero || b != 0;
    if (!nonzero) return false;
    ByteView q = order();
    return std::lexicographical_compare(v.begin(), v.end(), q.begin(), q.end());
  }

  Scalar decode_scalar(ByteView bytes) const {
    Scalar k{Bytes(bytes.begin(), bytes.end())};
    if (!is_valid_scalar(k)) throw Error(ErrorKind::encoding, "scalar out of range [1, q-1]");
    return k;
  }

  GroupElement decode_element(ByteView bytes) const {
    if (!is_valid_element(bytes)) throw Error(ErrorKind::encoding, "not a valid group element");
    return GroupElement{Bytes(bytes.begin(), bytes.end())};
  }

  Scalar scalar_from_u64(std::uint64_t v) const {
    Bytes out(scalar_size(), 0);
    for (std::size_t i = 0; i < out.size() && i < 8; ++i) {
      out[out.size() - 1 - i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
    return decode_scalar(out);
  }

  /// Uniform in [1, q-1] by masked rejection sampling.
  Scalar random_scalar(Rng& rng) const {
    ByteView q = order();
    std::uint8_t mask = 0xff;
    while (mask > 1 && (mask >> 1) >= q[0]) mask >>= 1;
    Bytes buf(scalar_size());
    for (;;) {
      rng.fill(buf);
      buf[0] &= mask;
      Scalar k{buf};
      if (is_valid_scalar(k)) return k;
    }
  }

 protected:
  void check_scalar(const Scalar& k) const {
    if (!is_valid_scalar(k)) throw Error(ErrorKind::encoding, "scalar out of range [1, q-1]");
  }
};

}  // namespace iodlab

#include "iodlab/crypto/detail/curve_group.hpp"
#include "iodlab/crypto/detail/toy_group.hpp"

namespace iodlab {

/// Shared instance for `id`. Lives for the whole program.
inline const Group& group_for(GroupId id) {
  static const CurveGroup curve;
  static const ToyGroup toy;
  if (id == GroupId::curve) return curve;
  return toy;
}

}  // namespace iodlab

#endif  // IODLAB_CRYPTO_GROUP_HPP
