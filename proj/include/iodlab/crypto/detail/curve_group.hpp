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

#ifndef IODLAB_CRYPTO_DETAIL_CURVE_GROUP_HPP
#define IODLAB_CRYPTO_DETAIL_CURVE_GROUP_HPP

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>

namespace iodlab {

namespace detail {

struct EcGroupFree {
  void operator()(EC_GROUP* g) const noexcept { EC_GROUP_free(g); }
};
struct EcPointFree {
  void operator()(EC_POINT* p) const noexcept { EC_POINT_free(p); }
};
struct BnFree {
  void operator()(BIGNUM* b) const noexcept { BN_clear_free(b); }
};
struct BnCtxFree {
  void operator()(BN_CTX* c) const noexcept { BN_CTX_free(c); }
};

using EcGroupPtr = std::unique_ptr<EC_GROUP, EcGroupFree>;
using EcPointPtr = std::unique_ptr<EC_POINT, EcPointFree>;
using BnPtr = std::unique_ptr<BIGNUM, BnFree>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxFree>;

}  // namespace detail

/// NIST P-256 (prime order, cofactor 1). Elements use 33-byte compressed
/// SEC1 encoding; scalars are 32 bytes big-endian.
class CurveGroup final : public Group {
 public:
  CurveGroup() : group_(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)) {
    if (!group_) throw Error(ErrorKind::invalid_argument, "P-256 unavailable in libcrypto");
    order_.resize(32);
    BN_bn2binpad(EC_GROUP_get0_order(group_.get()), order_.data(), 32);
    generator_ = GroupElement(encode(EC_GROUP_get0_generator(group_.get()), nullptr));
  }

  GroupId id() const noexcept override { return GroupId::curve; }
  std::size_t scalar_size() const noexcept override { return 32; }
  std::size_t element_size() const noexcept override { return 33; }
  ByteView order() const noexcept override { return order_; }
  const GroupElement& generator() const noexcept override { return generator_; }

  bool is_valid_element(ByteView enc) const override {
    detail::BnCtxPtr ctx(BN_CTX_new());
    return decode(enc, ctx.get()) != nullptr;
  }

  GroupElement scalar_mult(const Scalar& k, const GroupElement& e) const override {
    check_scalar(k);
    detail::BnCtxPtr ctx(BN_CTX_new());
    detail::EcPointPtr point = decode(e.encoded(), ctx.get());
    if (!point) throw Error(ErrorKind::encoding, "not a valid P-256 point");
    detail::BnPtr bn(BN_bin2bn(k.encoded().data(), static_cast<int>(k.encoded().size()), nullptr));
    detail::EcPointPtr out(EC_POINT_new(group_.get()));
    if (!bn || !out ||
        EC_POINT_mul(group_.get(), out.get(), nullptr, point.get(), bn.get(), ctx.get()) != 1) {
      throw Error(ErrorKind::encoding, "P-256 scalar multiplication failed");
    }
    return GroupElement(encode(out.get(), ctx.get()));
  }

 private:
  Bytes encode(const EC_POINT* p, BN_CTX* ctx) const {
    Bytes out(33);
    std::size_t n = EC_POINT_point2oct(group_.get(), p, POINT_CONVERSION_COMPRESSED,
                                       out.data(), out.size(), ctx);
    if (n != out.size()) throw Error(ErrorKind::encoding, "point at infinity has no encoding");
    return out;
  }

  // Null unless `enc` is the canonical compressed encoding of a curve point.
  detail::EcPointPtr decode(ByteView enc, BN_CTX* ctx) const {
    if (enc.size() != 33 || (enc[0] != 0x02 && enc[0] != 0x03)) return nullptr;
    detail::EcPointPtr p(EC_POINT_new(group_.get()));
    if (!p || EC_POINT_oct2point(group_.get(), p.get(), enc.data(), enc.size(), ctx) != 1) {
      return nullptr;
    }
    if (EC_POINT_is_at_infinity(group_.get(), p.get()) ||
        EC_POINT_is_on_curve(group_.get(), p.get(), ctx) != 1) {
      return nullptr;
    }
    Bytes again = encode(p.get(), ctx);
    if (!std::equal(again.begin(), again.end(), enc.begin(), enc.end())) return nullptr;
    return p;
  }

  detail::EcGroupPtr group_;
  Bytes order_;
  GroupElement generator_;
};

}  // namespace iodlab

#endif  // IODLAB_CRYPTO_DETAIL_CURVE_GROUP_HPP
