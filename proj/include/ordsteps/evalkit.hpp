// ordsteps/evalkit.hpp

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
#include <stdexcept>
#include <vector>

#include "ordsteps/dp_assign.hpp"
#include "ordsteps/io.hpp"
#include "ordsteps/model.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::eval {

// Inference and the evaluation metrics. A segment t (1 s units by default)
// counts as time t + 0.5 s for ground-truth containment; intervals are
// inclusive at both ends. A prediction is one segment per step.

struct Prediction {
  std::vector<std::size_t> step_segments;  // strictly increasing
  Matrix scores;                           // T x K
};

namespace detail {

inline bool segment_in_gt(std::size_t t,
                          const std::vector<io::Interval>& intervals,
                          double seconds_per_segment) {
  const double time = (static_cast<double>(t) + 0.5) * seconds_per_segment;
  for (const auto& iv : intervals)
    if (time >= iv.start_sec && time <= iv.end_sec) return true;
  return false;
}

/// Length of the longest strictly increasing subsequence.
inline std::size_t lis_length(const std::vector<std::size_t>& seq) {
  std::vector<std::size_t> tails;
  for (std::size_t v : seq) {
    auto it = std::lower_bound(tails.begin(), tails.end(), v);
    if (it == tails.end())
      tails.push_back(v);
    else
      *it = v;
  }
  return tails.size();
}

}  // namespace detail

/// Scores every segment (dropout off), then picks the best-scoring ordered
/// labeling with one segment per step. Narration is never consulted here.
inline Prediction infer(const model::ComponentClassifierBank& bank,
                        const StepComponentMatrix& a,
                        const FeatureSequence& features) {
  const std::size_t T = features.num_segments(), K = a.num_steps();
  if (T < K)
    throw InfeasibleError("infer: fewer segments than steps");
  Prediction pred;
  pred.scores = Matrix(T, K, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> g =
        model::forward_components(bank, features.values.row(t), features.dim());
    std::vector<double> f = model::compose_step_scores(g, a);
    for (std::size_t k = 0; k < K; ++k) pred.scores(t, k) = f[k];
  }
  dp::CostMatrix cost(T, K);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t k = 0; k < K; ++k) cost(t, k) = -pred.scores(t, k);
  pred.step_segments = dp::solve_single_frame(cost).step_times();
  return pred;
}

/// Correct step assignments over total steps, across all videos. A step is
/// correct iff its predicted segment's time falls inside any of its
/// ground-truth intervals; missing steps count in the denominator.
inline double recall(const std::vector<Prediction>& predictions,
                     const std::vector<io::VideoGroundTruth>& ground_truth,
                     double seconds_per_segment = 1.0) {
  if (predictions.size() != ground_truth.size())
    throw std::invalid_argument("recall: video sets do not match");
  std::size_t correct = 0, total = 0;
  for (std::size_t v = 0; v < predictions.size(); ++v) {
    const auto& pred = predictions[v];
    const auto& gt = ground_truth[v];
    if (pred.step_segments.size() != gt.size())
      throw std::invalid_argument("recall: step counts do not match");
    total += gt.size();
    for (std::size_t k = 0; k < gt.size(); ++k)
      if (detail::segment_in_gt(pred.step_segments[k], gt[k],
                                seconds_per_segment))
        ++correct;
  }
  if (total == 0) throw std::invalid_argument("recall: no steps to score");
  return static_cast<double>(correct) / static_cast<double>(total);
}

/// Steps at fixed fractions of the timeline: t_k = floor((k - 0.5) T / K),
/// k = 1..K. Collision-free whenever T >= K.
inline Prediction uniform_baseline(std::size_t num_segments,
                                   std::size_t num_steps) {
  if (num_steps < 1)
    throw std::invalid_argument("uniform_baseline: need at least one step");
  if (num_segments < num_steps)
    throw InfeasibleError("uniform_baseline: fewer segments than steps");
  Prediction pred;
  pred.scores = Matrix(num_segments, num_steps, 0.0);
  pred.step_segments.resize(num_steps);
  for (std::size_t k = 1; k <= num_steps; ++k)
    pred.step_segments[k - 1] = static_cast<std::size_t>(
        std::floor((static_cast<double>(k) - 0.5) *
                   static_cast<double>(num_segments) /
                   static_cast<double>(num_steps)));
  return pred;
}

/// One task's videos: full score matrices paired with ground truth.
struct ScoredVideo {
  const Matrix* scores;                // T x K
  const io::VideoGroundTruth* gt;      // K step interval lists
  double seconds_per_segment = 1.0;
};

/// Mean average precision over the task's steps. Per step, every segment of
/// every video is ranked by score; positives are segments inside a
/// ground-truth interval. Steps with no positive segment are skipped; if no
/// step has one, there is nothing to average and this throws.
inline double mean_average_precision(const std::vector<ScoredVideo>& videos) {
  if (videos.empty())
    throw std::invalid_argument("mean_average_precision: no videos");
  const std::size_t K = videos.front().scores->cols();
  double ap_sum = 0.0;
  std::size_t ap_count = 0;
  std::vector<std::pair<double, bool>> ranked;
  for (std::size_t k = 0; k < K; ++k) {
    ranked.clear();
    std::size_t n_pos = 0;
    for (const auto& video : videos) {
      if (video.scores->cols() != K || video.gt->size() != K)
        throw std::invalid_argument("mean_average_precision: K mismatch");
      for (std::size_t t = 0; t < video.scores->rows(); ++t) {
        const bool positive = detail::segment_in_gt(
            t, (*video.gt)[k], video.seconds_per_segment);
        ranked.emplace_back((*video.scores)(t, k), positive);
        n_pos += positive ? 1 : 0;
      }
    }
    if (n_pos == 0) continue;
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       return a.first > b.first;
                     });
    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      if (!ranked[i].second) continue;
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    ap_sum += ap / static_cast<double>(n_pos);
    ++ap_count;
  }
  if (ap_count == 0)
    throw std::invalid_argument(
        "mean_average_precision: no step has a positive segment");
  return ap_sum / static_cast<double>(ap_count);
}

/// Longest strictly increasing subsequence fraction of the observed step
/// order; [2,1,3] -> 2/3.
inline double order_consistency(const std::vector<std::size_t>& occurrences) {
  if (occurrences.empty())
    throw std::invalid_argument("order_consistency: empty sequence");
  return static_cast<double>(detail::lis_length(occurrences)) /
         static_cast<double>(occurrences.size());
}

struct CorpusStats {
  double background_fraction;
  double missing_step_fraction;
  double mean_order_consistency;
};

/// Background share of segments, missing-step share, and the mean per-video
/// order consistency of the annotated corpus.
inline CorpusStats corpus_stats(
    const std::vector<io::VideoGroundTruth>& ground_truth,
    const std::vector<std::size_t>& num_segments,
    double seconds_per_segment = 1.0) {
  if (ground_truth.size() != num_segments.size())
    throw std::invalid_argument("corpus_stats: video sets do not match");
  if (ground_truth.empty())
    throw std::invalid_argument("corpus_stats: empty corpus");
  std::size_t background = 0, segments = 0, missing = 0, steps = 0;
  double consistency_sum = 0.0;
  std::size_t consistency_count = 0;
  for (std::size_t v = 0; v < ground_truth.size(); ++v) {
    const auto& gt = ground_truth[v];
    steps += gt.size();
    for (const auto& intervals : gt) missing += intervals.empty() ? 1 : 0;
    segments += num_segments[v];
    for (std::size_t t = 0; t < num_segments[v]; ++t) {
      bool covered = false;
      for (const auto& intervals : gt)
        covered = covered ||
                  detail::segment_in_gt(t, intervals, seconds_per_segment);
      background += covered ? 0 : 1;
    }
    // Occurrence order: every interval, sorted by start time then step.
    std::vector<std::pair<double, std::size_t>> occurrences;
    for (std::size_t k = 0; k < gt.size(); ++k)
      for (const auto& iv : gt[k]) occurrences.emplace_back(iv.start_sec, k);
    if (!occurrences.empty()) {
      std::sort(occurrences.begin(), occurrences.end());
      std::vector<std::size_t> seq;
      seq.reserve(occurrences.size());
      for (const auto& [start, k] : occurrences) seq.push_back(k);
      consistency_sum += order_consistency(seq);
      ++consistency_count;
    }
  }
  CorpusStats stats;
  stats.background_fraction =
      segments ? static_cast<double>(background) / static_cast<double>(segments)
               : 0.0;
  stats.missing_step_fraction =
      steps ? static_cast<double>(missing) / static_cast<double>(steps) : 0.0;
  stats.mean_order_consistency =
      consistency_count ? consistency_sum /
                              static_cast<double>(consistency_count)
                        : 1.0;
  return stats;
}

}  // namespace ordsteps::eval
