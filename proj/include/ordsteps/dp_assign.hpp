// ordsteps/dp_assign.hpp

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordsteps/rng.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::dp {

// Exact solvers for min_{Y in C} sum_{t,k} S[t,k] Y[t,k] where C is the set
// of assignments satisfying at-least-once and ordering constraints. Window
// constraints enter as +inf entries. Background always costs 0; callers sign
// their step costs relative to that.

using CostMatrix = Matrix;  // T x K, finite or +inf

inline void check_costs(const CostMatrix& s) {
  if (s.rows() < 1 || s.cols() < 1)
    throw std::invalid_argument("cost matrix must be at least 1x1");
  for (double v : s.data())
    if (std::isnan(v) || v == -kInf)
      throw std::invalid_argument("cost matrix entries must be finite or +inf");
}

/// Cost of an assignment re-summed in canonical (t, k) order, so two optimal
/// assignments of the same instance report identical totals.
inline double assignment_cost(const CostMatrix& s, const Assignment& a) {
  double total = 0.0;
  for (std::size_t t = 0; t < a.entries.rows(); ++t)
    for (std::size_t k = 0; k < a.entries.cols(); ++k)
      if (a.entries(t, k)) total += s(t, k);
  return total;
}

/// S'[t,k] = +inf wherever the window of step k excludes t.
inline CostMatrix apply_windows(const CostMatrix& s,
                                const ConstraintWindows& w) {
  w.validate(s.rows());
  CostMatrix out = s;
  for (std::size_t t = 0; t < s.rows(); ++t)
    for (std::size_t k = 0; k < s.cols(); ++k)
      if (!w.allows(t, k)) out(t, k) = kInf;
  return out;
}

/// Greedy left-to-right scan: does an ordered cover with one segment per step
/// exist over the finite entries? The cheapest certificate of feasibility for
/// both modes.
inline bool ordered_cover_exists(const CostMatrix& s) {
  long long prev = -1;
  for (std::size_t k = 0; k < s.cols(); ++k) {
    long long found = -1;
    for (std::size_t t = static_cast<std::size_t>(prev + 1); t < s.rows();
         ++t) {
      if (s(t, k) < kInf) {
        found = static_cast<long long>(t);
        break;
      }
    }
    if (found < 0) return false;
    prev = found;
  }
  return true;
}

/// One segment per step, strictly increasing times, minimal total cost.
/// Ties break toward the lexicographically earliest time tuple.
inline Assignment solve_single_frame(const CostMatrix& s) {
  check_costs(s);
  const std::size_t T = s.rows(), K = s.cols();
  if (T < K)
    throw InfeasibleError("single_frame: " + std::to_string(K) +
                          " steps cannot fit in " + std::to_string(T) +
                          " segments");
  if (!ordered_cover_exists(s))
    throw InfeasibleError("single_frame: no finite-cost ordered cover");

  // suffix[k][t] = min cost of placing steps k..K-1 at times >= t.
  Mat<double> suffix(K + 1, T + 1, kInf);
  for (std::size_t t = 0; t <= T; ++t) suffix(K, t) = 0.0;
  for (std::size_t k = K; k-- > 0;) {
    for (std::size_t t = T; t-- > 0;) {
      double take = s(t, k) + suffix(k + 1, t + 1);
      suffix(k, t) = std::min(suffix(k, t + 1), take);
    }
  }
  if (suffix(0, 0) == kInf)
    throw InfeasibleError("single_frame: no finite-cost ordered cover");

  std::vector<std::size_t> times(K);
  double target = suffix(0, 0);
  std::size_t t = 0;
  for (std::size_t k = 0; k < K; ++k) {
    while (t < T && s(t, k) + suffix(k + 1, t + 1) != target) ++t;
    if (t >= T) throw std::logic_error("single_frame: backtrack lost optimum");
    times[k] = t;
    target = suffix(k + 1, t + 1);
    ++t;
  }
  return Assignment::from_times(times, T);
}

/// Ordered contiguous runs, one per step, minimal total cost. The state at
/// time t is the pair (current label, last non-background step); scanning all
/// 2K+1 states once per segment gives the optimum in O(KT).
inline Assignment solve_runs(const CostMatrix& s) {
  check_costs(s);
  const std::size_t T = s.rows(), K = s.cols();
  if (K < 1) throw std::invalid_argument("runs: need at least one step");
  if (T < K)
    throw InfeasibleError("runs: " + std::to_string(K) +
                          " steps cannot fit in " + std::to_string(T) +
                          " segments");
  if (!ordered_cover_exists(s))
    throw InfeasibleError("runs: no finite-cost ordered cover");

  // State encoding: 0 -> background before any step; 2z-1 -> inside step z;
  // 2z -> background after step z. z is 1-based here.
  const std::size_t S = 2 * K + 1;
  auto state_cost = [&](std::size_t st, std::size_t t) -> double {
    return (st % 2 == 1) ? s(t, (st + 1) / 2 - 1) : 0.0;
  };
  // Successor states in tie-break preference order: entering the next step
  // beats waiting in background beats prolonging the current run, which makes
  // the recovered optimum the lexicographically earliest (start, end) list.
  auto successors = [&](std::size_t st, std::size_t out[3]) -> std::size_t {
    std::size_t n = 0;
    std::size_t z = (st + 1) / 2;  // current z
    if (st % 2 == 1) {             // inside step z
      if (z < K) out[n++] = 2 * z + 1;  // start step z+1
      out[n++] = 2 * z;                 // end run, background
      out[n++] = st;                    // continue run
    } else {  // background after step z (or before any for st == 0)
      if (z < K) out[n++] = 2 * z + 1;  // start step z+1
      out[n++] = st;                    // stay in background
    }
    return n;
  };

  // w(st, t) = min cost of segments t..T-1 given state st at time t, ending
  // in a state with z == K.
  Mat<double> w(S, T, kInf);
  for (std::size_t st : {2 * K - 1, 2 * K}) w(st, T - 1) = state_cost(st, T - 1);
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t st = 0; st < S; ++st) {
      std::size_t succ[3];
      std::size_t n = successors(st, succ);
      double best = kInf;
      for (std::size_t i = 0; i < n; ++i) best = std::min(best, w(succ[i], t + 1));
      w(st, t) = state_cost(st, t) + best;
    }
  }

  // Walk forward from the virtual start state (background, no step yet).
  std::vector<std::size_t> path(T);
  {
    std::size_t start_options[3];
    std::size_t n = successors(0, start_options);
    double target = kInf;
    for (std::size_t i = 0; i < n; ++i)
      target = std::min(target, w(start_options[i], 0));
    if (target == kInf) throw InfeasibleError("runs: no feasible labeling");
    for (std::size_t i = 0; i < n; ++i) {
      if (w(start_options[i], 0) == target) {
        path[0] = start_options[i];
        break;
      }
    }
  }
  for (std::size_t t = 1; t < T; ++t) {
    std::size_t succ[3];
    std::size_t n = successors(path[t - 1], succ);
    double target = kInf;
    for (std::size_t i = 0; i < n; ++i) target = std::min(target, w(succ[i], t));
    for (std::size_t i = 0; i < n; ++i) {
      if (w(succ[i], t) == target) {
        path[t] = succ[i];
        break;
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> runs(
      K, {T, 0});  // placeholder (lo > hi) until seen
  for (std::size_t t = 0; t < T; ++t) {
    if (path[t] % 2 == 1) {
      std::size_t k = (path[t] + 1) / 2 - 1;
      runs[k].first = std::min(runs[k].first, t);
      runs[k].second = std::max(runs[k].second, t);
    }
  }
  return Assignment::from_runs(runs, T);
}

/// Exhaustive oracle. Enumerates every feasible assignment in lexicographic
/// order and keeps the strictly best, so ties resolve exactly like the DP
/// solvers. Refuses instances beyond desk size.
inline Assignment brute_force(const CostMatrix& s, AssignmentMode mode) {
  check_costs(s);
  const std::size_t T = s.rows(), K = s.cols();
  if (T < K) throw InfeasibleError("brute_force: T < K");

  double best_cost = kInf;
  bool found = false;

  if (mode == AssignmentMode::kSingleFrame) {
    double combos = 1.0;
    for (std::size_t i = 0; i < K; ++i)
      combos = combos * static_cast<double>(T - i) / static_cast<double>(i + 1);
    if (combos > 1e6)
      throw std::invalid_argument("brute_force: instance too large");
    std::vector<std::size_t> times(K), best_times;
    auto recurse = [&](auto&& self, std::size_t k, std::size_t t0,
                       double acc) -> void {
      if (k == K) {
        if (acc < best_cost) {
          best_cost = acc;
          best_times = times;
          found = true;
        }
        return;
      }
      for (std::size_t t = t0; t + (K - k - 1) < T; ++t) {
        double c = s(t, k);
        if (c == kInf) continue;
        times[k] = t;
        self(self, k + 1, t + 1, acc + c);
      }
    };
    recurse(recurse, 0, 0, 0.0);
    if (!found) throw InfeasibleError("brute_force: infeasible instance");
    return Assignment::from_times(best_times, T);
  }

  if (T > 10 || K > 3)
    throw std::invalid_argument("brute_force: runs instance too large");
  std::vector<std::pair<std::size_t, std::size_t>> runs(K), best_runs;
  auto recurse = [&](auto&& self, std::size_t k, std::size_t t0,
                     double acc) -> void {
    if (k == K) {
      if (acc < best_cost) {
        best_cost = acc;
        best_runs = runs;
        found = true;
      }
      return;
    }
    for (std::size_t start = t0; start + (K - k - 1) < T; ++start) {
      double acc2 = acc;
      for (std::size_t end = start; end + (K - k - 1) < T; ++end) {
        double c = s(end, k);
        if (c == kInf) break;  // a run cannot cross a forbidden segment
        acc2 += c;
        runs[k] = {start, end};
        self(self, k + 1, end + 1, acc2);
      }
    }
  };
  recurse(recurse, 0, 0, 0.0);
  if (!found) throw InfeasibleError("brute_force: infeasible instance");
  return Assignment::from_runs(best_runs, T);
}

/// A random single-frame assignment satisfying all constraints: solve the
/// ordered assignment on i.i.d. uniform(0,1) costs masked by the windows.
inline Assignment sample_feasible(std::size_t num_segments,
                                  std::size_t num_steps,
                                  const ConstraintWindows& windows,
                                  std::uint64_t seed) {
  CostMatrix s(num_segments, num_steps);
  Rng rng(seed);
  for (std::size_t t = 0; t < num_segments; ++t)
    for (std::size_t k = 0; k < num_steps; ++k) s(t, k) = rng.uniform01();
  return solve_single_frame(apply_windows(s, windows));
}

}  // namespace ordsteps::dp
