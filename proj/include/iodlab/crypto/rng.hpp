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

#ifndef IODLAB_CRYPTO_RNG_HPP
#define IODLAB_CRYPTO_RNG_HPP

#include <array>
#include <cstdint>
#include <random>
#include <string_view>

#include "iodlab/crypto/digest.hpp"

namespace iodlab {

/// Seeded, reproducible random source. mt19937_64 output is fixed by the
/// standard, and nothing here goes through the implementation-defined
/// distributions, so draws are identical across standard libraries.
///
/// Not a CSPRNG. This is a simulation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  void fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t word = engine_();
      for (int b = 7; b >= 0 && i < out.size(); --b) {
        out[i++] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
  }

  /// Uniform in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw Error(ErrorKind::invalid_argument, "uniform_below(0)");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Independent child stream named by `label`. Streams derived from the
  /// same root with different labels do not perturb each other.
  Rng derive(std::string_view label) const {
    std::array<std::uint8_t, 8> seed_be{};
    for (int i = 0; i < 8; ++i) seed_be[i] = static_cast<std::uint8_t>(seed_ >> (56 - 8 * i));
    Digest d = hash_fields({ByteView(seed_be), as_byte_view(label)});
    std::uint64_t child = 0;
    for (int i = 0; i < 8; ++i) child = (child << 8) | d.raw()[i];
    return Rng(child);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace iodlab

#endif  // IODLAB_CRYPTO_RNG_HPP
