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

// Umbrella header for the solver library (file I/O and CLI excluded).

#ifndef PDMCF_PDMCF_HPP_
#define PDMCF_PDMCF_HPP_

#include "pdmcf/generator.hpp"
#include "pdmcf/graph.hpp"
#include "pdmcf/instance.hpp"
#include "pdmcf/matrix.hpp"
#include "pdmcf/projection.hpp"
#include "pdmcf/random.hpp"
#include "pdmcf/residual.hpp"
#include "pdmcf/solver.hpp"
#include "pdmcf/utilities.hpp"

#endif  // PDMCF_PDMCF_HPP_
