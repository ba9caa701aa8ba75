// ordsteps/text_constraints.hpp

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
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ordsteps/dp_assign.hpp"
#include "ordsteps/stem.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::text {

// Derives per-step temporal windows from timed narration: TF-IDF vectors over
// a sliding word window, cosine similarities against the step descriptions,
// and an ordered assignment to pick one mention per step.

/// Narration as (token, time) pairs with non-decreasing times.
struct TimedTranscript {
  struct Word {
    std::string token;
    double time_sec;
  };
  std::vector<Word> words;

  std::size_t size() const { return words.size(); }

  void validate() const {
    for (std::size_t i = 1; i < words.size(); ++i)
      if (words[i].time_sec < words[i - 1].time_sec)
        throw std::invalid_argument("transcript times must be non-decreasing");
  }
};

using SimilarityMatrix = Matrix;  // L x K, entries in [-1, 1]

inline double cossim(const std::vector<double>& a,
                     const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cossim: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cossim: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// TF-IDF rows for every sliding window of the transcript (U, one row per
/// word, window centered on it and clipped at the edges) and for every step
/// description (V). Documents for the IDF are all L windows plus the K steps;
/// idf = ln((1+N)/(1+df)) + 1 with raw counts as tf. Nonzero rows are
/// L2-normalized; all-zero rows stay zero.
inline std::pair<Matrix, Matrix> sliding_tfidf(
    const TimedTranscript& transcript, const TaskSpec& task,
    std::size_t window) {
  if (window < 1) throw std::invalid_argument("sliding_tfidf: window >= 1");
  if (transcript.words.empty())
    throw std::invalid_argument("sliding_tfidf: empty transcript");
  task.validate();
  transcript.validate();

  const std::size_t L = transcript.size();
  const std::size_t K = task.steps.size();

  std::vector<std::string> word_stems(L);
  for (std::size_t l = 0; l < L; ++l)
    word_stems[l] = stem(transcript.words[l].token);
  std::vector<std::vector<std::string>> step_stems(K);
  for (std::size_t k = 0; k < K; ++k)
    step_stems[k] = stem_tokens(task.steps[k]);

  std::unordered_map<std::string, std::size_t> vocab;
  std::vector<std::string> terms;
  auto intern = [&](const std::string& s) {
    auto it = vocab.find(s);
    if (it != vocab.end()) return it->second;
    vocab.emplace(s, terms.size());
    terms.push_back(s);
    return terms.size() - 1;
  };
  for (const auto& s : word_stems) intern(s);
  for (const auto& stems : step_stems)
    for (const auto& s : stems) intern(s);
  const std::size_t D = terms.size();

  auto window_bounds = [&](std::size_t l) {
    std::size_t lo = l >= (window - 1) / 2 ? l - (window - 1) / 2 : 0;
    std::size_t hi = std::min(L - 1, l + window / 2);
    return std::pair<std::size_t, std::size_t>(lo, hi);
  };

  // Document frequencies over all L windows + K step descriptions.
  std::vector<std::size_t> df(D, 0);
  std::vector<std::size_t> seen(D, static_cast<std::size_t>(-1));
  for (std::size_t l = 0; l < L; ++l) {
    auto [lo, hi] = window_bounds(l);
    for (std::size_t i = lo; i <= hi; ++i) {
      std::size_t d = vocab[word_stems[i]];
      if (seen[d] != l) {
        seen[d] = l;
        ++df[d];
      }
    }
  }
  std::fill(seen.begin(), seen.end(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < K; ++k) {
    for (const auto& s : step_stems[k]) {
      std::size_t d = vocab[s];
      if (seen[d] != k) {
        seen[d] = k;
        ++df[d];
      }
    }
  }

  const double n_docs = static_cast<double>(L + K);
  std::vector<double> idf(D);
  for (std::size_t d = 0; d < D; ++d)
    idf[d] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[d]))) +
             1.0;

  auto normalize_row = [](double* row, std::size_t n) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += row[i] * row[i];
    if (norm == 0.0) return;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) row[i] /= norm;
  };

  Matrix u(L, D, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    auto [lo, hi] = window_bounds(l);
    for (std::size_t i = lo; i <= hi; ++i) u(l, vocab[word_stems[i]]) += 1.0;
    for (std::size_t d = 0; d < D; ++d) u(l, d) *= idf[d];
    normalize_row(u.row(l), D);
  }
  Matrix v(K, D, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    for (const auto& s : step_stems[k]) v(k, vocab[s]) += 1.0;
    for (std::size_t d = 0; d < D; ++d) v(k, d) *= idf[d];
    normalize_row(v.row(k), D);
  }
  return {std::move(u), std::move(v)};
}

/// S = U V^T.
inline SimilarityMatrix similarity(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols())
    throw std::invalid_argument("similarity: dimension mismatch");
  SimilarityMatrix s(u.rows(), v.rows(), 0.0);
  for (std::size_t l = 0; l < u.rows(); ++l)
    for (std::size_t k = 0; k < v.rows(); ++k) {
      double dot = 0.0;
      for (std::size_t d = 0; d < u.cols(); ++d) dot += u(l, d) * v(k, d);
      s(l, k) = dot;
    }
  return s;
}

/// One mention per step, strictly increasing word indices, maximizing total
/// similarity under the ordering constraints (the ordered assignment on -S).
inline std::vector<std::size_t> localize_steps(const SimilarityMatrix& s) {
  if (s.rows() < s.cols())
    throw std::invalid_argument("localize_steps: fewer words than steps");
  dp::CostMatrix cost(s.rows(), s.cols());
  for (std::size_t l = 0; l < s.rows(); ++l)
    for (std::size_t k = 0; k < s.cols(); ++k) cost(l, k) = -s(l, k);
  return dp::solve_single_frame(cost).step_times();
}

/// Segment window [floor(t_k - h), ceil(t_k + h)] around each mention time,
/// clipped to [0, T-1]. Default half-width 4.5 s spans the 9 s average.
inline ConstraintWindows windows_from_mentions(
    const std::vector<std::size_t>& mention_indices,
    const TimedTranscript& transcript, double half_width_sec,
    std::size_t num_segments, double seconds_per_segment = 1.0) {
  if (half_width_sec <= 0.0)
    throw std::invalid_argument("windows_from_mentions: half width must be > 0");
  if (num_segments < 1)
    throw std::invalid_argument("windows_from_mentions: empty timeline");
  ConstraintWindows w;
  long long prev = -1;
  const long long last = static_cast<long long>(num_segments) - 1;
  for (std::size_t idx : mention_indices) {
    if (idx >= transcript.size())
      throw std::invalid_argument("windows_from_mentions: index out of range");
    if (static_cast<long long>(idx) <= prev)
      throw std::invalid_argument(
          "windows_from_mentions: indices must be strictly increasing");
    prev = static_cast<long long>(idx);
    const double t = transcript.words[idx].time_sec;
    long long lo = static_cast<long long>(
        std::floor((t - half_width_sec) / seconds_per_segment));
    long long hi = static_cast<long long>(
        std::ceil((t + half_width_sec) / seconds_per_segment));
    lo = std::min(std::max(lo, 0LL), last);
    hi = std::min(std::max(hi, 0LL), last);
    w.windows.push_back(ConstraintWindows::Window{
        static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)});
  }
  return w;
}

const double kDefaultHalfWidthSec = 4.5;
const std::size_t kDefaultSlidingWindow = 5;
const double kDefaultTripletMargin = 0.1;

/// The whole narration pipeline in one call: TF-IDF rows, cosine
/// similarities, ordered mention localization, and mention-centered windows.
inline ConstraintWindows derive_windows(
    const TimedTranscript& transcript, const TaskSpec& task,
    std::size_t num_segments,
    std::size_t window = kDefaultSlidingWindow,
    double half_width_sec = kDefaultHalfWidthSec,
    double seconds_per_segment = 1.0) {
  auto [u, v] = sliding_tfidf(transcript, task, window);
  auto mentions = localize_steps(similarity(u, v));
  return windows_from_mentions(mentions, transcript, half_width_sec,
                               num_segments, seconds_per_segment);
}

/// Hinge loss pulling the anchor toward every positive and away from every
/// negative: (1/|P|) sum_{j in P, k in N} max(0, cos(a,n_k) - cos(a,p_j) + h).
inline double triplet_margin_loss(
    const std::vector<double>& anchor,
    const std::vector<std::vector<double>>& positives,
    const std::vector<std::vector<double>>& negatives, double margin) {
  if (positives.empty() || negatives.empty())
    throw std::invalid_argument("triplet_margin_loss: need >=1 positive and negative");
  if (margin < 0.0)
    throw std::invalid_argument("triplet_margin_loss: margin must be >= 0");
  double total = 0.0;
  for (const auto& p : positives) {
    const double sim_p = cossim(anchor, p);
    for (const auto& n : negatives) {
      const double sim_n = cossim(anchor, n);
      total += std::max(0.0, sim_n - sim_p + margin);
    }
  }
  return total / static_cast<double>(positives.size());
}

}  // namespace ordsteps::text
