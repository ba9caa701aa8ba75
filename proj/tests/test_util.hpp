// tests/test_util.hpp

// Copyright 2026  the ordered-steps authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>

#include "ordsteps/dp_assign.hpp"
#include "ordsteps/rng.hpp"
#include "ordsteps/types.hpp"

namespace testutil {

/// Random costs on a dyadic grid (multiples of 1/256 in [-2, 2]) so that any
/// summation order is exact and optimal costs compare bitwise.
inline ordsteps::dp::CostMatrix dyadic_costs(std::size_t t, std::size_t k,
                                             ordsteps::Rng& rng) {
  ordsteps::dp::CostMatrix s(t, k);
  for (double& v : s.data())
    v = (static_cast<double>(rng.below(1025)) - 512.0) / 256.0;
  return s;
}

/// Random feasible windows: anchor one strictly increasing tuple, then widen
/// each side by a small random margin.
inline ordsteps::ConstraintWindows random_windows(std::size_t t, std::size_t k,
                                                  ordsteps::Rng& rng) {
  std::vector<std::size_t> anchors;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < k; ++i) {
    // leave room for the remaining steps
    std::size_t hi = t - (k - i);
    anchors.push_back(lo + rng.below(hi - lo + 1));
    lo = anchors.back() + 1;
  }
  ordsteps::ConstraintWindows w;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t margin_lo = rng.below(3), margin_hi = rng.below(3);
    std::size_t wl = anchors[i] >= margin_lo ? anchors[i] - margin_lo : 0;
    std::size_t wh = std::min(t - 1, anchors[i] + margin_hi);
    w.windows.push_back(ordsteps::ConstraintWindows::Window{wl, wh});
  }
  return w;
}

/// Scratch directory under the system temp dir, unique per tag.
inline std::string scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ordsteps_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace testutil
