// ordsteps/trainer.hpp

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

#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordsteps/core.hpp"
#include "ordsteps/dp_assign.hpp"
#include "ordsteps/model.hpp"
#include "ordsteps/parallel.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::train {

// Alternating optimization of the joint label/classifier objective: labels by
// constrained DP over the per-term loss table, parameters by minibatch Adam
// (simple mode) or by the single exact gradient step of the quadratic
// upper-bound scheme (majorize mode, monotone by construction).

enum class OptimMode { kSimple, kMajorize };

struct TrainConfig {
  OptimMode mode = OptimMode::kSimple;
  std::size_t init_epochs = 30;
  std::size_t outer_iterations = 30;
  std::size_t inner_epochs = 3;           // simple mode only
  double learning_rate = 1e-5;            // Adam rate and the majorize delta
  std::size_t batch_size = 32;
  bool use_text_constraints = true;
  Granularity granularity = Granularity::kComponent;
  AssignmentMode assignment_mode = AssignmentMode::kSingleFrame;
  double dropout_rate = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (learning_rate <= 0.0)
      throw std::invalid_argument("train config: learning rate must be > 0");
    if (batch_size < 1)
      throw std::invalid_argument("train config: batch size must be >= 1");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0)
      throw std::invalid_argument("train config: dropout must be in [0, 1)");
  }
};

struct VideoData {
  std::string id;
  std::size_t task_index;
  FeatureSequence features;
  // Already clamped to [0, T-1]; all-unconstrained when no narration exists.
  ConstraintWindows windows;
};

struct TrainState {
  model::ComponentClassifierBank bank;
  model::OptimizerState optimizer;
  std::vector<StepComponentMatrix> task_matrices;   // per task
  std::vector<std::optional<Assignment>> assignments;  // per video
  std::vector<char> active;                          // per video
  std::vector<double> objective_history;
};

namespace detail {

inline const ConstraintWindows& effective_windows(
    const VideoData& video, const TrainConfig& config,
    ConstraintWindows& scratch) {
  if (config.use_text_constraints) return video.windows;
  scratch = ConstraintWindows::unconstrained(video.windows.num_steps());
  return scratch;
}

inline bool windows_feasible(std::size_t num_segments, std::size_t num_steps,
                             const ConstraintWindows& windows) {
  if (num_segments < num_steps) return false;
  dp::CostMatrix zeros(num_segments, num_steps, 0.0);
  return dp::ordered_cover_exists(dp::apply_windows(zeros, windows));
}

inline std::vector<model::Example> assigned_examples(
    const TrainState& state, const std::vector<VideoData>& videos) {
  std::vector<model::Example> examples;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    if (!state.active[v] || !state.assignments[v]) continue;
    const Assignment& y = *state.assignments[v];
    const StepComponentMatrix& a = state.task_matrices[videos[v].task_index];
    for (std::size_t t = 0; t < y.entries.rows(); ++t)
      for (std::size_t k = 0; k < y.entries.cols(); ++k)
        if (y.entries(t, k))
          examples.push_back({&videos[v].features.values, t, &a, k});
  }
  return examples;
}

/// One epoch of shuffled minibatch Adam over the given examples.
inline void adam_epoch(TrainState& state, std::vector<model::Example> examples,
                       const TrainConfig& config, std::uint64_t epoch_seed) {
  Rng shuffler(Rng::derive(epoch_seed, 0x5u));
  shuffler.shuffle(examples);
  for (std::size_t start = 0; start < examples.size();
       start += config.batch_size) {
    const std::size_t end =
        std::min(examples.size(), start + config.batch_size);
    std::vector<model::Example> batch(examples.begin() + start,
                                      examples.begin() + end);
    auto [loss, grad] = model::batch_loss_and_grad(
        state.bank, batch, /*training=*/true,
        Rng::derive(epoch_seed, 0xDu, start));
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged: non-finite loss");
    model::adam_step(state.bank, grad, state.optimizer);
  }
}

}  // namespace detail

/// Warm start: for each epoch, draw one random constraint-satisfying
/// assignment per video and run one supervised epoch on the induced labels.
inline TrainState initialize(const std::vector<TaskSpec>& tasks,
                             const ComponentVocabulary& vocab,
                             const std::vector<VideoData>& videos,
                             const TrainConfig& config) {
  config.validate();
  if (videos.empty()) throw std::invalid_argument("initialize: no videos");
  const std::size_t dim = videos.front().features.dim();

  TrainState state;
  state.bank = model::ComponentClassifierBank::zeros(vocab.size(), dim,
                                                     config.dropout_rate);
  state.optimizer =
      model::OptimizerState::fresh(state.bank, config.learning_rate);
  state.task_matrices.reserve(tasks.size());
  for (const auto& task : tasks)
    state.task_matrices.push_back(
        build_step_component_matrix(task, vocab, config.granularity));

  state.assignments.assign(videos.size(), std::nullopt);
  state.active.assign(videos.size(), 0);
  std::size_t n_active = 0;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const VideoData& video = videos[v];
    if (video.task_index >= tasks.size())
      throw std::invalid_argument("initialize: bad task index for video " +
                                  video.id);
    if (video.features.dim() != dim)
      throw std::invalid_argument("initialize: feature dim mismatch in " +
                                  video.id);
    ConstraintWindows scratch;
    const ConstraintWindows& w =
        detail::effective_windows(video, config, scratch);
    const std::size_t k_count = tasks[video.task_index].num_steps();
    if (w.num_steps() != k_count)
      throw std::invalid_argument("initialize: window count mismatch in " +
                                  video.id);
    if (!detail::windows_feasible(video.features.num_segments(), k_count, w)) {
      std::cerr << "warning: skipping video " << video.id
                << ": constraints admit no ordered assignment\n";
      continue;
    }
    state.active[v] = 1;
    ++n_active;
  }
  if (n_active == 0)
    throw InfeasibleError("initialize: every video is infeasible");

  for (std::size_t epoch = 0; epoch < config.init_epochs; ++epoch) {
    std::vector<model::Example> examples;
    for (std::size_t v = 0; v < videos.size(); ++v) {
      if (!state.active[v]) continue;
      const VideoData& video = videos[v];
      ConstraintWindows scratch;
      const ConstraintWindows& w =
          detail::effective_windows(video, config, scratch);
      Assignment y = dp::sample_feasible(
          video.features.num_segments(),
          tasks[video.task_index].num_steps(), w,
          Rng::derive(config.seed, 0xA110C + epoch, v));
      const StepComponentMatrix& a = state.task_matrices[video.task_index];
      const std::vector<std::size_t> times = y.step_times();
      for (std::size_t k = 0; k < times.size(); ++k)
        examples.push_back({&video.features.values, times[k], &a, k});
    }
    detail::adam_epoch(state, std::move(examples), config,
                       Rng::derive(config.seed, 0x1A17, epoch));
  }
  return state;
}

/// Constrained DP labels for every active video with the current bank. The
/// majorize-mode cost subtracts the per-term squared-gradient bonus of the
/// quadratic bound. Pure reads of the bank; runs per-video in parallel.
inline void update_assignments(TrainState& state,
                               const std::vector<VideoData>& videos,
                               const TrainConfig& config) {
  const bool majorize = config.mode == OptimMode::kMajorize;
  const AssignmentMode mode = majorize ? AssignmentMode::kSingleFrame
                                       : config.assignment_mode;
  parallel_for(videos.size(), [&](std::size_t v) {
    if (!state.active[v]) return;
    const VideoData& video = videos[v];
    const StepComponentMatrix& a = state.task_matrices[video.task_index];
    model::LossTable table = model::loss_term_table(
        state.bank, a, video.features, /*with_grad_norms=*/majorize);
    dp::CostMatrix cost = std::move(table.values);
    if (majorize) {
      const double half_delta = 0.5 * config.learning_rate;
      for (std::size_t i = 0; i < cost.data().size(); ++i)
        cost.data()[i] -= half_delta * table.grad_sq_norms->data()[i];
    }
    ConstraintWindows scratch;
    const ConstraintWindows& w =
        detail::effective_windows(video, config, scratch);
    cost = dp::apply_windows(cost, w);
    state.assignments[v] = mode == AssignmentMode::kRuns
                               ? dp::solve_runs(cost)
                               : dp::solve_single_frame(cost);
  });
}

/// Classifier update with assignments held fixed: minibatch Adam epochs in
/// simple mode, exactly one full gradient step with the learning rate in
/// majorize mode.
inline void update_parameters(TrainState& state,
                              const std::vector<VideoData>& videos,
                              const TrainConfig& config,
                              std::uint64_t outer_iteration) {
  std::vector<model::Example> examples =
      detail::assigned_examples(state, videos);
  if (examples.empty())
    throw std::runtime_error("update_parameters: no assigned labels");
  if (config.mode == OptimMode::kMajorize) {
    auto [loss, grad] =
        model::sum_loss_and_grad(state.bank, examples, /*training=*/false);
    if (!std::isfinite(loss))
      throw std::runtime_error("training diverged: non-finite loss");
    model::gradient_step(state.bank, grad, config.learning_rate);
    return;
  }
  for (std::size_t epoch = 0; epoch < config.inner_epochs; ++epoch)
    detail::adam_epoch(
        state, examples, config,
        Rng::derive(config.seed, 0x10000 + outer_iteration, epoch));
}

/// Exact sum of assigned cross-entropy terms, dropout off.
inline double objective(const TrainState& state,
                        const std::vector<VideoData>& videos) {
  std::vector<double> per_video(videos.size(), 0.0);
  parallel_for(videos.size(), [&](std::size_t v) {
    if (!state.active[v] || !state.assignments[v]) return;
    const StepComponentMatrix& a = state.task_matrices[videos[v].task_index];
    model::LossTable table =
        model::loss_term_table(state.bank, a, videos[v].features, false);
    const Assignment& y = *state.assignments[v];
    double sum = 0.0;
    for (std::size_t t = 0; t < y.entries.rows(); ++t)
      for (std::size_t k = 0; k < y.entries.cols(); ++k)
        if (y.entries(t, k)) sum += table.values(t, k);
    per_video[v] = sum;
  });
  double total = 0.0;
  for (double v : per_video) total += v;
  return total;
}

/// Initialization followed by outer alternations of (assignment update,
/// parameter update), recording the objective after each alternation.
inline TrainState train(const std::vector<TaskSpec>& tasks,
                        const ComponentVocabulary& vocab,
                        const std::vector<VideoData>& videos,
                        const TrainConfig& config) {
  TrainState state = initialize(tasks, vocab, videos, config);
  for (std::size_t it = 0; it < config.outer_iterations; ++it) {
    update_assignments(state, videos, config);
    update_parameters(state, videos, config, it);
    state.objective_history.push_back(objective(state, videos));
  }
  return state;
}

}  // namespace ordsteps::train
