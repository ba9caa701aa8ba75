// ordsteps/types.hpp

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

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ordsteps {

/// Raised when an input file is malformed. Carries the byte offset at which
/// parsing failed so callers can point at the defect.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (byte offset " +
                           std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Raised when a constrained assignment problem has no feasible solution.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what)
      : std::runtime_error(what) {}
};

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense row-major matrix. Small and dumb on purpose; every consumer in this
/// library iterates rows sequentially.
template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(std::size_t rows, std::size_t cols, T fill = T())
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  T* row(std::size_t r) { return data_.data() + r * cols_; }
  const T* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           data_ == other.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<T> data_;
};

using Matrix = Mat<double>;
using BinaryMatrix = Mat<std::uint8_t>;

/// A task identifier with its ordered list of natural-language steps. Step
/// order is significant and never reshuffled.
struct TaskSpec {
  std::string id;
  std::string title;
  std::vector<std::string> steps;  // non-empty, lowercase

  std::size_t num_steps() const { return steps.size(); }

  void validate() const {
    if (steps.empty())
      throw std::invalid_argument("task '" + id + "' has no steps");
    for (const auto& s : steps)
      if (s.empty())
        throw std::invalid_argument("task '" + id + "' has an empty step");
  }
};

/// Per-video feature sequence: one row per temporal segment.
struct FeatureSequence {
  Matrix values;  // T x D
  double seconds_per_segment = 1.0;

  std::size_t num_segments() const { return values.rows(); }
  std::size_t dim() const { return values.cols(); }

  void validate() const {
    if (values.rows() < 1 || values.cols() < 1)
      throw std::invalid_argument("feature sequence must be at least 1x1");
    for (double v : values.data())
      if (!std::isfinite(v))
        throw std::invalid_argument("feature sequence has non-finite values");
  }
};

/// Per-step inclusive segment interval, or unconstrained.
struct ConstraintWindows {
  struct Window {
    std::size_t lo, hi;  // inclusive
  };
  // windows[k] == nullopt means step k is unconstrained.
  std::vector<std::optional<Window>> windows;

  static ConstraintWindows unconstrained(std::size_t num_steps) {
    ConstraintWindows w;
    w.windows.assign(num_steps, std::nullopt);
    return w;
  }

  std::size_t num_steps() const { return windows.size(); }

  bool allows(std::size_t t, std::size_t k) const {
    if (k >= windows.size() || !windows[k]) return true;
    return t >= windows[k]->lo && t <= windows[k]->hi;
  }

  void validate(std::size_t num_segments) const {
    for (const auto& w : windows) {
      if (!w) continue;
      if (w->lo > w->hi || w->hi >= num_segments)
        throw std::invalid_argument("constraint window out of range");
    }
  }
};

enum class AssignmentMode { kRuns, kSingleFrame };

/// Binary segment-by-step label matrix under the ordering constraints.
/// In runs mode each step occupies one contiguous block of segments; in
/// single-frame mode each step gets exactly one segment.
struct Assignment {
  BinaryMatrix entries;  // T x K
  AssignmentMode mode = AssignmentMode::kSingleFrame;

  std::size_t num_segments() const { return entries.rows(); }
  std::size_t num_steps() const { return entries.cols(); }

  /// Chosen segment per step; requires single-frame mode.
  std::vector<std::size_t> step_times() const {
    std::vector<std::size_t> times;
    times.reserve(entries.cols());
    for (std::size_t k = 0; k < entries.cols(); ++k) {
      for (std::size_t t = 0; t < entries.rows(); ++t) {
        if (entries(t, k)) {
          times.push_back(t);
          break;
        }
      }
    }
    return times;
  }

  /// First/last assigned segment per step (inclusive).
  std::vector<std::pair<std::size_t, std::size_t>> step_runs() const {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    runs.reserve(entries.cols());
    for (std::size_t k = 0; k < entries.cols(); ++k) {
      std::size_t lo = entries.rows(), hi = 0;
      for (std::size_t t = 0; t < entries.rows(); ++t) {
        if (entries(t, k)) {
          lo = std::min(lo, t);
          hi = std::max(hi, t);
        }
      }
      runs.emplace_back(lo, hi);
    }
    return runs;
  }

  static Assignment from_times(const std::vector<std::size_t>& times,
                               std::size_t num_segments) {
    Assignment a;
    a.mode = AssignmentMode::kSingleFrame;
    a.entries = BinaryMatrix(num_segments, times.size(), 0);
    for (std::size_t k = 0; k < times.size(); ++k) a.entries(times[k], k) = 1;
    return a;
  }

  static Assignment from_runs(
      const std::vector<std::pair<std::size_t, std::size_t>>& runs,
      std::size_t num_segments) {
    Assignment a;
    a.mode = AssignmentMode::kRuns;
    a.entries = BinaryMatrix(num_segments, runs.size(), 0);
    for (std::size_t k = 0; k < runs.size(); ++k)
      for (std::size_t t = runs[k].first; t <= runs[k].second; ++t)
        a.entries(t, k) = 1;
    return a;
  }

  /// Checks at-least-once, ordering, per-mode shape and (optionally) window
  /// membership. Throws on violation.
  void validate(const ConstraintWindows* windows = nullptr) const {
    const std::size_t T = entries.rows(), K = entries.cols();
    long long prev_last = -1;
    for (std::size_t k = 0; k < K; ++k) {
      long long first = -1, last = -1;
      std::size_t count = 0;
      for (std::size_t t = 0; t < T; ++t) {
        std::uint8_t e = entries(t, k);
        if (e != 0 && e != 1)
          throw std::invalid_argument("assignment entries must be 0/1");
        if (!e) continue;
        if (first < 0) first = static_cast<long long>(t);
        last = static_cast<long long>(t);
        ++count;
        if (windows && !windows->allows(t, k))
          throw std::invalid_argument("assignment violates window of step " +
                                      std::to_string(k));
      }
      if (count == 0)
        throw std::invalid_argument("step " + std::to_string(k) +
                                    " never assigned (at-least-once)");
      if (first <= prev_last)
        throw std::invalid_argument("assignment violates step ordering at " +
                                    std::to_string(k));
      if (mode == AssignmentMode::kRuns) {
        if (static_cast<long long>(count) != last - first + 1)
          throw std::invalid_argument("step " + std::to_string(k) +
                                      " is not one contiguous run");
      } else if (count != 1) {
        throw std::invalid_argument("step " + std::to_string(k) +
                                    " must have exactly one segment");
      }
      prev_last = last;
    }
  }
};

}  // namespace ordsteps
