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

#ifndef IODLAB_SIM_CONFIG_HPP
#define IODLAB_SIM_CONFIG_HPP

#include <cstdint>

#include "iodlab/crypto/group.hpp"
#include "iodlab/protocol/types.hpp"

namespace iodlab {

struct SimConfig {
  std::uint64_t seed = 0;
  GroupId group = GroupId::curve;
  Millis delta_t_ms = kDefaultDeltaT;
  Millis latency_ms = 10;  // per hop

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

}  // namespace iodlab

#endif  // IODLAB_SIM_CONFIG_HPP
