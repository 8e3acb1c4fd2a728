// Copyright 2026 The pdmcf Authors
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

#ifndef PDMCF_INSTANCE_HPP_
#define PDMCF_INSTANCE_HPP_

#include <stdexcept>

#include "pdmcf/graph.hpp"
#include "pdmcf/utilities.hpp"

namespace pdmcf {

// All-pairs flow problem: maximize U(-F A^T) over F >= 0, F^T 1 <= c.
struct ProblemInstance {
  Topology topology;
  UtilitySpec utility;

  std::size_t n() const { return topology.n(); }
  std::size_t m() const { return topology.m(); }

  // Checks everything the solver relies on: at least two nodes, strong
  // connectivity, and an n x n weight matrix with positive off-diagonal.
  void Validate() const {
    if (topology.n() < 2) {
      throw std::invalid_argument("instance needs at least 2 nodes");
    }
    if (!IsStronglyConnected(topology)) {
      throw std::invalid_argument("topology is not strongly connected");
    }
    RequireShape(utility.weights, topology.n(), topology.n(), "weights");
    utility.Validate();
  }
};

}  // namespace pdmcf

#endif  // PDMCF_INSTANCE_HPP_
