// ordsteps/synth.hpp

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
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordsteps/io.hpp"
#include "ordsteps/rng.hpp"
#include "ordsteps/stem.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::synth {

// Desk-scale stand-in for a narrated instructional-video corpus: ordered
// steps built from a shared component pool, planted feature directions,
// mostly-background timelines, optionally missing steps, and transcripts that
// mention each step's tokens near its true start.

struct SyntheticSpec {
  std::size_t num_tasks = 5;
  std::size_t steps_per_task = 4;
  std::size_t components_per_step = 2;
  std::size_t shared_component_pool_size = 12;
  std::size_t videos_per_task = 10;
  std::size_t video_length = 60;  // segments (1 s each)
  std::size_t feature_dim = 16;
  double signal_strength = 1.0;
  double noise_std = 0.75;
  double missing_step_prob = 0.0;
  double narration_jitter_sec = 2.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (num_tasks < 1 || steps_per_task < 1 || components_per_step < 1 ||
        videos_per_task < 1 || video_length < 1 || feature_dim < 1)
      throw std::invalid_argument("synthetic spec: counts must be positive");
    if (components_per_step > shared_component_pool_size)
      throw std::invalid_argument("synthetic spec: pool smaller than a step");
    if (missing_step_prob < 0.0 || missing_step_prob > 1.0)
      throw std::invalid_argument("synthetic spec: bad missing_step_prob");
    if (signal_strength <= 0.0 || noise_std < 0.0 ||
        narration_jitter_sec < 0.0)
      throw std::invalid_argument("synthetic spec: bad magnitudes");
    if (video_length < steps_per_task)
      throw std::invalid_argument("synthetic spec: video shorter than steps");
  }
};

// Fraction of each timeline left unassigned, mirroring the observed share in
// real instructional footage.
constexpr double kBackgroundFraction = 0.72;

struct SyntheticVideo {
  std::string id;
  std::size_t task_index;
  FeatureSequence features;
  text::TimedTranscript transcript;
  io::VideoGroundTruth ground_truth;
};

struct SyntheticCorpus {
  SyntheticSpec spec;
  std::vector<TaskSpec> tasks;
  std::vector<std::vector<std::vector<std::size_t>>>
      step_pool_components;  // [task][step] -> pool indices
  std::vector<std::vector<double>> pool_directions;  // pool x D, unit rows
  std::vector<SyntheticVideo> videos;
};

namespace detail {

/// Letter-only tokens that the stemmer maps to themselves, so component
/// identity survives the text pipeline.
inline std::vector<std::string> make_pool_tokens(std::size_t count) {
  static const std::string cons = "bcdfgjklmnpqrtvz";
  static const std::string vow = "aeiou";
  static const std::string fin = "kmpbvzx";
  std::vector<std::string> tokens;
  for (std::size_t i = 0; tokens.size() < count; ++i) {
    std::string t;
    t.push_back(cons[i % cons.size()]);
    t.push_back(vow[(i / cons.size()) % vow.size()]);
    t.push_back(fin[(i / (cons.size() * vow.size())) % fin.size()]);
    if (i >= cons.size() * vow.size() * fin.size()) {
      std::size_t j = i / (cons.size() * vow.size() * fin.size());
      t.push_back(vow[j % vow.size()]);
      t.push_back(fin[(j / vow.size()) % fin.size()]);
    }
    if (stem(t) != t) continue;
    if (std::find(tokens.begin(), tokens.end(), t) != tokens.end())
      throw std::logic_error("pool token space exhausted");
    tokens.push_back(t);
  }
  return tokens;
}

inline std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n,
                                                std::size_t count) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = 0; i < count; ++i)
    std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

inline const char* kFillerWords[] = {"um",   "uh",   "okay", "so",   "now",
                                     "well", "then", "just", "here", "going",
                                     "this", "that", "really"};

}  // namespace detail

inline SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticCorpus corpus;
  corpus.spec = spec;
  Rng rng(Rng::derive(spec.seed, 0x5EED));

  const auto pool = detail::make_pool_tokens(spec.shared_component_pool_size);
  corpus.pool_directions.resize(spec.shared_component_pool_size);
  for (auto& dir : corpus.pool_directions) {
    dir.resize(spec.feature_dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : dir) v /= norm;
  }

  corpus.tasks.resize(spec.num_tasks);
  corpus.step_pool_components.resize(spec.num_tasks);
  for (std::size_t ti = 0; ti < spec.num_tasks; ++ti) {
    TaskSpec& task = corpus.tasks[ti];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "task%02zu", ti);
    task.id = buf;
    task.title = "synthetic task " + std::to_string(ti);
    corpus.step_pool_components[ti].resize(spec.steps_per_task);
    for (std::size_t k = 0; k < spec.steps_per_task; ++k) {
      std::string description;
      std::vector<std::size_t> comps;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        comps = detail::sample_distinct(rng, spec.shared_component_pool_size,
                                        spec.components_per_step);
        description.clear();
        for (std::size_t i = 0; i < comps.size(); ++i) {
          if (i) description.push_back(' ');
          description += pool[comps[i]];
        }
        if (std::find(task.steps.begin(), task.steps.end(), description) ==
            task.steps.end())
          break;
        description.clear();
      }
      if (description.empty())
        throw std::invalid_argument(
            "synthetic spec: cannot draw distinct steps from this pool");
      task.steps.push_back(description);
      corpus.step_pool_components[ti][k] = comps;
    }
  }

  const std::size_t T = spec.video_length, D = spec.feature_dim;
  for (std::size_t ti = 0; ti < spec.num_tasks; ++ti) {
    for (std::size_t vi = 0; vi < spec.videos_per_task; ++vi) {
      Rng vrng(Rng::derive(spec.seed, 0xF1DE0, ti * 100000 + vi + 1));
      SyntheticVideo video;
      video.task_index = ti;
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%s_v%02zu", corpus.tasks[ti].id.c_str(),
                    vi);
      video.id = buf;

      const std::size_t K = spec.steps_per_task;
      std::vector<bool> present(K);
      std::size_t n_present = 0;
      for (std::size_t k = 0; k < K; ++k) {
        present[k] = vrng.uniform01() >= spec.missing_step_prob;
        n_present += present[k] ? 1 : 0;
      }

      // Run lengths: aim the covered share at 1 - background fraction.
      std::vector<std::size_t> lengths(K, 0);
      std::size_t covered = 0;
      if (n_present > 0) {
        std::size_t target = static_cast<std::size_t>(
            std::llround((1.0 - kBackgroundFraction) * static_cast<double>(T)));
        target = std::max(target, n_present);
        target = std::min(target, T);
        std::size_t base = target / n_present, extra = target % n_present;
        std::size_t seen = 0;
        for (std::size_t k = 0; k < K; ++k) {
          if (!present[k]) continue;
          lengths[k] = base + (seen < extra ? 1 : 0);
          ++seen;
          covered += lengths[k];
        }
      }

      // Place runs in order with random gaps (stars and bars).
      std::vector<std::size_t> cut(n_present);
      const std::size_t total_gap = T - covered;
      for (auto& c : cut) c = vrng.below(total_gap + 1);
      std::sort(cut.begin(), cut.end());
      std::vector<std::size_t> gaps(n_present + 1);
      std::size_t prev = 0;
      for (std::size_t i = 0; i < n_present; ++i) {
        gaps[i] = cut[i] - prev;
        prev = cut[i];
      }
      gaps[n_present] = total_gap - prev;

      video.ground_truth.assign(K, {});
      std::vector<long long> start_of(K, -1);
      std::size_t cursor = 0, slot = 0;
      for (std::size_t k = 0; k < K; ++k) {
        if (!present[k]) continue;
        cursor += gaps[slot++];
        const std::size_t start = cursor, end = cursor + lengths[k] - 1;
        cursor = end + 1;
        start_of[k] = static_cast<long long>(start);
        video.ground_truth[k].push_back(
            {static_cast<double>(start), static_cast<double>(end + 1)});
      }

      // Features: planted direction mean + isotropic noise, narrowed to f32
      // so the in-memory corpus matches its on-disk round trip bit for bit.
      video.features.values = Matrix(T, D, 0.0);
      video.features.seconds_per_segment = 1.0;
      std::vector<int> segment_step(T, -1);
      for (std::size_t k = 0; k < K; ++k)
        for (const auto& iv : video.ground_truth[k])
          for (std::size_t t = static_cast<std::size_t>(iv.start_sec);
               t < static_cast<std::size_t>(iv.end_sec); ++t)
            segment_step[t] = static_cast<int>(k);
      for (std::size_t t = 0; t < T; ++t) {
        double* row = video.features.values.row(t);
        for (std::size_t d = 0; d < D; ++d)
          row[d] = spec.noise_std * vrng.normal();
        if (segment_step[t] >= 0) {
          const auto& comps =
              corpus.step_pool_components[ti][segment_step[t]];
          const double w =
              spec.signal_strength / static_cast<double>(comps.size());
          for (std::size_t c : comps)
            for (std::size_t d = 0; d < D; ++d)
              row[d] += w * corpus.pool_directions[c][d];
        }
        for (std::size_t d = 0; d < D; ++d)
          row[d] = static_cast<double>(static_cast<float>(row[d]));
      }

      // Transcript: one filler word per second plus each present step's
      // tokens at its start time +- jitter.
      std::vector<text::TimedTranscript::Word> words;
      const std::size_t n_fillers =
          sizeof(detail::kFillerWords) / sizeof(detail::kFillerWords[0]);
      for (std::size_t t = 0; t < T; ++t)
        words.push_back({detail::kFillerWords[vrng.below(n_fillers)],
                         static_cast<double>(t) + 0.5});
      for (std::size_t k = 0; k < K; ++k) {
        if (start_of[k] < 0) continue;
        double mention = static_cast<double>(start_of[k]);
        if (spec.narration_jitter_sec > 0.0)
          mention += vrng.uniform(-spec.narration_jitter_sec,
                                  spec.narration_jitter_sec);
        mention = std::min(std::max(mention, 0.0),
                           static_cast<double>(T) - 0.01);
        for (const auto& tok : tokenize(corpus.tasks[ti].steps[k]))
          words.push_back({tok, mention});
      }
      std::stable_sort(words.begin(), words.end(),
                       [](const auto& a, const auto& b) {
                         return a.time_sec < b.time_sec;
                       });
      video.transcript.words = std::move(words);

      corpus.videos.push_back(std::move(video));
    }
  }
  return corpus;
}

/// Writes tasks.txt, manifest.txt and per-video feature / transcript /
/// annotation files under `out_dir`.
inline void write_corpus(const SyntheticCorpus& corpus,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "features");
  fs::create_directories(fs::path(out_dir) / "transcripts");
  fs::create_directories(fs::path(out_dir) / "annotations");
  io::write_tasks((fs::path(out_dir) / "tasks.txt").string(), corpus.tasks);
  std::string manifest;
  for (const auto& video : corpus.videos) {
    const std::string feat = "features/" + video.id + ".feat";
    const std::string trans = "transcripts/" + video.id + ".txt";
    io::write_feature_file((fs::path(out_dir) / feat).string(),
                           video.features);
    io::write_transcript((fs::path(out_dir) / trans).string(),
                         video.transcript);
    io::write_annotations(
        (fs::path(out_dir) / "annotations" / (video.id + ".txt")).string(),
        video.ground_truth);
    manifest += corpus.tasks[video.task_index].id + "\t" + feat + "\t" +
                trans + "\n";
  }
  io::detail::spit((fs::path(out_dir) / "manifest.txt").string(), manifest);
}

}  // namespace ordsteps::synth
