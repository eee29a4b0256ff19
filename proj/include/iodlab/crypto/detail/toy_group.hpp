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

// Included from group.hpp only.

#ifndef IODLAB_CRYPTO_DETAIL_TOY_GROUP_HPP
#define IODLAB_CRYPTO_DETAIL_TOY_GROUP_HPP

namespace iodlab {

/// Order-11 subgroup of (Z/23Z)*, generated by 2. Small enough that tests
/// can brute-force discrete logs. One byte per scalar and per element.
class ToyGroup final : public Group {
 public:
  static constexpr std::uint32_t kModulus = 23;
  static constexpr std::uint32_t kOrder = 11;
  static constexpr std::uint8_t kGenerator = 2;

  ToyGroup() : order_{static_cast<std::uint8_t>(kOrder)}, generator_(Bytes{kGenerator}) {}

  GroupId id() const noexcept override { return GroupId::toy; }
  std::size_t scalar_size() const noexcept override { return 1; }
  std::size_t element_size() const noexcept override { return 1; }
  ByteView order() const noexcept override { return order_; }
  const GroupElement& generator() const noexcept override { return generator_; }

  // The identity is excluded: protocol exponents are nonzero, so it never
  // arises honestly.
  bool is_valid_element(ByteView enc) const override {
    if (enc.size() != 1) return false;
    std::uint32_t x = enc[0];
    return x > 1 && x < kModulus && pow_mod(x, kOrder) == 1;
  }

  GroupElement scalar_mult(const Scalar& k, const GroupElement& e) const override {
    check_scalar(k);
    if (!is_valid_element(e.encoded())) throw Error(ErrorKind::encoding, "not a toy-group element");
    auto r = pow_mod(e.encoded()[0], k.encoded()[0]);
    return GroupElement(Bytes{static_cast<std::uint8_t>(r)});
  }

 private:
  static std::uint32_t pow_mod(std::uint32_t base, std::uint32_t exp) noexcept {
    std::uint32_t result = 1;
    base %= kModulus;
    while (exp > 0) {
      if (exp & 1) result = result * base % kModulus;
      base = base * base % kModulus;
      exp >>= 1;
    }
    return result;
  }

  Bytes order_;
  GroupElement generator_;
};

}  // namespace iodlab

#endif  // IODLAB_CRYPTO_DETAIL_TOY_GROUP_HPP
