// ordsteps/core.hpp

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

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ordsteps/stem.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps {

/// How step classifiers are factored. Component sharing splits a step into
/// its stemmed words; shared-step shares only exact duplicate step strings;
/// task-step learns an independent classifier per (task, step).
enum class Granularity { kComponent, kSharedStep, kTaskStep };

inline const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::kComponent: return "component";
    case Granularity::kSharedStep: return "shared-step";
    case Granularity::kTaskStep: return "task-step";
  }
  return "?";
}

/// Ordered set of classifier units. For component granularity these are the
/// unique stemmed words over all step descriptions; for the step granularities
/// they are pseudo-components (one per unique step string, or one per
/// (task, step) pair).
struct ComponentVocabulary {
  std::vector<std::string> components;  // first-occurrence order
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return components.size(); }

  bool contains(const std::string& token) const {
    return index.count(token) != 0;
  }

  std::size_t id_of(const std::string& token) const {
    auto it = index.find(token);
    if (it == index.end())
      throw std::invalid_argument("token '" + token + "' not in vocabulary");
    return it->second;
  }

  std::size_t add(const std::string& token) {
    auto it = index.find(token);
    if (it != index.end()) return it->second;
    components.push_back(token);
    index.emplace(token, components.size() - 1);
    return components.size() - 1;
  }
};

namespace detail {
inline std::string task_step_key(const TaskSpec& task, std::size_t k) {
  return task.id + "#" + std::to_string(k);
}
}  // namespace detail

/// Builds the vocabulary over whatever task set is supplied, so models can be
/// trained and deployed on different task subsets against one shared index.
inline ComponentVocabulary build_vocabulary(
    const std::vector<TaskSpec>& tasks,
    Granularity granularity = Granularity::kComponent) {
  if (tasks.empty())
    throw std::invalid_argument("build_vocabulary: empty task list");
  ComponentVocabulary vocab;
  for (const auto& task : tasks) {
    task.validate();
    for (std::size_t k = 0; k < task.steps.size(); ++k) {
      switch (granularity) {
        case Granularity::kComponent:
          for (const auto& s : stem_tokens(task.steps[k])) vocab.add(s);
          break;
        case Granularity::kSharedStep:
          vocab.add(task.steps[k]);
          break;
        case Granularity::kTaskStep:
          vocab.add(detail::task_step_key(task, k));
          break;
      }
    }
  }
  if (vocab.size() == 0)
    throw std::invalid_argument("build_vocabulary: no components");
  return vocab;
}

/// Per-task binary matrix linking each step to the components it involves.
struct StepComponentMatrix {
  BinaryMatrix entries;                 // K x M
  std::vector<std::size_t> row_degrees;  // nonzeros per step, always >= 1

  std::size_t num_steps() const { return entries.rows(); }
  std::size_t num_components() const { return entries.cols(); }

  void validate() const {
    for (std::size_t k = 0; k < entries.rows(); ++k) {
      std::size_t degree = 0;
      for (std::size_t m = 0; m < entries.cols(); ++m)
        degree += entries(k, m) ? 1 : 0;
      if (degree == 0)
        throw std::invalid_argument("step " + std::to_string(k) +
                                    " links to no component");
      if (degree != row_degrees[k])
        throw std::invalid_argument("row_degrees out of sync at step " +
                                    std::to_string(k));
    }
  }
};

inline StepComponentMatrix build_step_component_matrix(
    const TaskSpec& task, const ComponentVocabulary& vocab,
    Granularity granularity = Granularity::kComponent) {
  task.validate();
  const std::size_t K = task.steps.size(), M = vocab.size();
  StepComponentMatrix a;
  a.entries = BinaryMatrix(K, M, 0);
  a.row_degrees.assign(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    switch (granularity) {
      case Granularity::kComponent:
        for (const auto& s : stem_tokens(task.steps[k]))
          a.entries(k, vocab.id_of(s)) = 1;
        break;
      case Granularity::kSharedStep:
        a.entries(k, vocab.id_of(task.steps[k])) = 1;
        break;
      case Granularity::kTaskStep:
        a.entries(k, vocab.id_of(detail::task_step_key(task, k))) = 1;
        break;
    }
    for (std::size_t m = 0; m < M; ++m) a.row_degrees[k] += a.entries(k, m);
    if (a.row_degrees[k] == 0)
      throw std::invalid_argument("step '" + task.steps[k] +
                                  "' has no components");
  }
  return a;
}

}  // namespace ordsteps
