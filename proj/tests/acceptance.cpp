// tests/acceptance.cpp

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

// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line (SKIP for the optional external-data check); the process exits
// non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ordsteps/core.hpp"
#include "ordsteps/dp_assign.hpp"
#include "ordsteps/evalkit.hpp"
#include "ordsteps/io.hpp"
#include "ordsteps/model.hpp"
#include "ordsteps/synth.hpp"
#include "ordsteps/text_constraints.hpp"
#include "ordsteps/trainer.hpp"

using namespace ordsteps;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool report(int number, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", number,
              detail.c_str());
  std::fflush(stdout);
  return ok;
}

dp::CostMatrix dyadic_costs(std::size_t t, std::size_t k, Rng& rng) {
  dp::CostMatrix s(t, k);
  for (double& v : s.data())
    v = (static_cast<double>(rng.below(1025)) - 512.0) / 256.0;
  return s;
}

ConstraintWindows random_windows(std::size_t t, std::size_t k, Rng& rng) {
  std::vector<std::size_t> anchors;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t hi = t - (k - i);
    anchors.push_back(lo + rng.below(hi - lo + 1));
    lo = anchors.back() + 1;
  }
  ConstraintWindows w;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t margin_lo = rng.below(3), margin_hi = rng.below(3);
    std::size_t wl = anchors[i] >= margin_lo ? anchors[i] - margin_lo : 0;
    std::size_t wh = std::min(t - 1, anchors[i] + margin_hi);
    w.windows.push_back(ConstraintWindows::Window{wl, wh});
  }
  return w;
}

// ----------------------------------------------------------------- corpus

// Shared 12-component pool, one component per step so that the per-segment
// signal direction has unit norm; the pinned noise level (0.75 per dimension)
// otherwise leaves no headroom between a perfect classifier and the uniform
// baseline.
synth::SyntheticCorpus sharing_corpus(std::uint64_t seed) {
  synth::SyntheticSpec spec;
  spec.num_tasks = 10;
  spec.steps_per_task = 4;
  spec.components_per_step = 1;
  spec.shared_component_pool_size = 12;
  spec.videos_per_task = 40;
  spec.video_length = 60;
  spec.feature_dim = 8;
  spec.signal_strength = 1.0;
  spec.noise_std = 0.75;
  spec.missing_step_prob = 0.2;
  spec.narration_jitter_sec = 2.0;
  spec.seed = seed;
  return synth::generate_synthetic(spec);
}

constexpr std::size_t kTrainPerTask = 30;

struct Split {
  std::vector<train::VideoData> train_constrained;
  std::vector<train::VideoData> train_unconstrained;
  std::vector<std::size_t> test_indices;
};

Split split_corpus(const synth::SyntheticCorpus& corpus) {
  Split split;
  for (std::size_t i = 0; i < corpus.videos.size(); ++i) {
    const auto& video = corpus.videos[i];
    const auto& task = corpus.tasks[video.task_index];
    if (i % corpus.spec.videos_per_task >= kTrainPerTask) {
      split.test_indices.push_back(i);
      continue;
    }
    train::VideoData v;
    v.id = video.id;
    v.task_index = video.task_index;
    v.features = video.features;
    try {
      v.windows = text::derive_windows(video.transcript, task,
                                       video.features.num_segments());
    } catch (const std::invalid_argument&) {
      v.windows = ConstraintWindows::unconstrained(task.steps.size());
    }
    auto unconstrained = v;
    unconstrained.windows = ConstraintWindows::unconstrained(task.steps.size());
    split.train_constrained.push_back(std::move(v));
    split.train_unconstrained.push_back(std::move(unconstrained));
  }
  return split;
}

train::TrainConfig sharing_config(std::uint64_t seed) {
  train::TrainConfig config;
  config.mode = train::OptimMode::kSimple;
  config.init_epochs = 30;
  config.outer_iterations = 30;
  config.inner_epochs = 3;
  config.learning_rate = 0.01;
  config.batch_size = 32;
  config.dropout_rate = 0.2;
  config.seed = seed;
  return config;
}

double test_recall(const synth::SyntheticCorpus& corpus, const Split& split,
                   const model::ComponentClassifierBank* bank,
                   Granularity granularity) {
  const auto vocab = build_vocabulary(corpus.tasks, granularity);
  std::vector<eval::Prediction> preds;
  std::vector<io::VideoGroundTruth> gts;
  for (std::size_t i : split.test_indices) {
    const auto& video = corpus.videos[i];
    const auto a = build_step_component_matrix(
        corpus.tasks[video.task_index], vocab, granularity);
    preds.push_back(bank ? eval::infer(*bank, a, video.features)
                         : eval::uniform_baseline(
                               video.features.num_segments(), a.num_steps()));
    gts.push_back(video.ground_truth);
  }
  return eval::recall(preds, gts);
}

double train_and_score(const synth::SyntheticCorpus& corpus,
                       const Split& split, Granularity granularity,
                       bool with_text, std::uint64_t seed) {
  auto config = sharing_config(seed);
  config.granularity = granularity;
  config.use_text_constraints = with_text;
  const auto& videos =
      with_text ? split.train_constrained : split.train_unconstrained;
  const auto vocab = build_vocabulary(corpus.tasks, granularity);
  const auto state = train::train(corpus.tasks, vocab, videos, config);
  return test_recall(corpus, split, &state.bank, granularity);
}

// -------------------------------------------------------------- criteria

bool criterion1() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t checked = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    {
      Rng rng(Rng::derive(0xAC1, trial));
      const std::size_t k = 1 + rng.below(3);
      const std::size_t t = k + rng.below(9 - k);
      auto s = dyadic_costs(t, k, rng);
      if (trial % 2 == 1)
        s = dp::apply_windows(s, random_windows(t, k, rng));
      const auto fast = dp::solve_runs(s);
      const auto slow = dp::brute_force(s, AssignmentMode::kRuns);
      fast.validate();
      if (dp::assignment_cost(s, fast) != dp::assignment_cost(s, slow))
        return report(1, false, "runs-mode cost mismatch at trial " +
                                    std::to_string(trial));
      ++checked;
    }
    {
      Rng rng(Rng::derive(0xAC2, trial));
      const std::size_t k = 1 + rng.below(4);
      const std::size_t t = k + rng.below(13 - k);
      auto s = dyadic_costs(t, k, rng);
      if (trial % 2 == 1)
        s = dp::apply_windows(s, random_windows(t, k, rng));
      const auto fast = dp::solve_single_frame(s);
      const auto slow = dp::brute_force(s, AssignmentMode::kSingleFrame);
      fast.validate();
      if (dp::assignment_cost(s, fast) != dp::assignment_cost(s, slow))
        return report(1, false, "single-frame cost mismatch at trial " +
                                    std::to_string(trial));
      ++checked;
    }
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "DP cost equals brute force exactly on %zu instances "
                "(%.2f s < 10 s)",
                checked, elapsed);
  return report(1, elapsed < 10.0, detail);
}

bool criterion2() {
  const auto start = std::chrono::steady_clock::now();
  double worst_rise = -1e300;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synth::SyntheticSpec spec;
    spec.num_tasks = 5;
    spec.steps_per_task = 4;
    spec.components_per_step = 2;
    spec.shared_component_pool_size = 12;
    spec.videos_per_task = 10;
    spec.video_length = 60;
    spec.feature_dim = 16;
    spec.signal_strength = 1.0;
    spec.noise_std = 0.75;
    spec.missing_step_prob = 0.2;
    spec.narration_jitter_sec = 2.0;
    spec.seed = 7000 + seed;
    const auto corpus = synth::generate_synthetic(spec);
    std::vector<train::VideoData> videos;
    for (const auto& video : corpus.videos) {
      train::VideoData v;
      v.id = video.id;
      v.task_index = video.task_index;
      v.features = video.features;
      const auto& task = corpus.tasks[video.task_index];
      try {
        v.windows = text::derive_windows(video.transcript, task,
                                         video.features.num_segments());
      } catch (const std::invalid_argument&) {
        v.windows = ConstraintWindows::unconstrained(task.steps.size());
      }
      videos.push_back(std::move(v));
    }
    train::TrainConfig config;
    config.mode = train::OptimMode::kMajorize;
    config.init_epochs = 30;
    config.outer_iterations = 30;
    config.learning_rate = 1e-3;
    config.dropout_rate = 0.0;
    config.seed = 500 + seed;
    const auto vocab = build_vocabulary(corpus.tasks);
    const auto state = train::train(corpus.tasks, vocab, videos, config);
    if (state.objective_history.size() != 30)
      return report(2, false, "missing objective history");
    for (std::size_t i = 1; i < state.objective_history.size(); ++i)
      worst_rise = std::max(worst_rise, state.objective_history[i] -
                                            state.objective_history[i - 1]);
  }
  const double elapsed = seconds_since(start);
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "majorize objective non-increasing over 30 iterations x 5 "
                "seeds (worst step %+.3g <= 1e-9; %.1f s < 120 s)",
                worst_rise, elapsed);
  return report(2, worst_rise <= 1e-9 && elapsed < 120.0, detail);
}

bool criterion3() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    Rng rng(Rng::derive(0xFD, trial));
    const std::size_t m = 1 + rng.below(6);  // M <= 6
    const std::size_t d = 1 + rng.below(5);  // D <= 5
    const std::size_t k = 1 + rng.below(4);  // K <= 4
    auto bank = model::ComponentClassifierBank::zeros(m, d, 0.0);
    for (double& v : bank.weights.data()) v = rng.normal() * 0.5;
    for (double& v : bank.biases) v = rng.normal() * 0.1;
    StepComponentMatrix a;
    a.entries = BinaryMatrix(k, m, 0);
    a.row_degrees.assign(k, 0);
    for (std::size_t row = 0; row < k; ++row)
      while (a.row_degrees[row] == 0)
        for (std::size_t col = 0; col < m; ++col)
          if (rng.uniform01() < 0.5 && !a.entries(row, col)) {
            a.entries(row, col) = 1;
            ++a.row_degrees[row];
          }
    Matrix x(3, d);
    for (double& v : x.data()) v = rng.normal();
    std::vector<model::Example> batch;
    for (std::size_t t = 0; t < 3; ++t)
      batch.push_back({&x, t, &a, rng.below(k)});

    const auto [loss, grad] = model::batch_loss_and_grad(bank, batch);
    (void)loss;
    const double h = 1e-6;
    auto probe = [&](double* theta) {
      const double orig = *theta;
      *theta = orig + h;
      const double plus = model::batch_loss_and_grad(bank, batch).first;
      *theta = orig - h;
      const double minus = model::batch_loss_and_grad(bank, batch).first;
      *theta = orig;
      return (plus - minus) / (2.0 * h);
    };
    for (std::size_t i = 0; i < bank.weights.data().size(); ++i) {
      const double fd = probe(&bank.weights.data()[i]);
      const double got = grad.weights.data()[i];
      worst = std::max(worst, std::abs(got - fd) /
                                  std::max(1e-8, std::abs(fd)));
    }
    for (std::size_t i = 0; i < bank.biases.size(); ++i) {
      const double fd = probe(&bank.biases[i]);
      worst = std::max(worst, std::abs(grad.biases[i] - fd) /
                                  std::max(1e-8, std::abs(fd)));
    }
  }
  const double elapsed = seconds_since(start);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "analytic vs central-difference gradients on 50 instances "
                "(worst rel err %.2g < 1e-4; %.1f s < 30 s)",
                worst, elapsed);
  return report(3, worst < 1e-4 && elapsed < 30.0, detail);
}

struct SharingOutcome {
  double component = 0, shared = 0, task = 0, uniform = 0, no_text = 0;
};

SharingOutcome run_sharing_experiments() {
  SharingOutcome mean;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto corpus = sharing_corpus(9000 + seed);
    const auto split = split_corpus(corpus);
    const std::uint64_t train_seed = 31 * seed + 5;
    mean.component += train_and_score(corpus, split, Granularity::kComponent,
                                      true, train_seed);
    mean.shared += train_and_score(corpus, split, Granularity::kSharedStep,
                                   true, train_seed);
    mean.task += train_and_score(corpus, split, Granularity::kTaskStep, true,
                                 train_seed);
    mean.no_text += train_and_score(corpus, split, Granularity::kComponent,
                                    false, train_seed);
    mean.uniform +=
        test_recall(corpus, split, nullptr, Granularity::kComponent);
  }
  mean.component /= 5;
  mean.shared /= 5;
  mean.task /= 5;
  mean.uniform /= 5;
  mean.no_text /= 5;
  return mean;
}

bool criterion4(const SharingOutcome& mean, double elapsed) {
  const double min_trained =
      std::min(std::min(mean.component, mean.shared), mean.task);
  const bool ordered =
      mean.component >= mean.shared && mean.shared >= mean.task;
  const bool gain = (mean.component - mean.task) >= 0.03;
  const bool beats_uniform = (min_trained - mean.uniform) >= 0.15;
  char detail[240];
  std::snprintf(detail, sizeof(detail),
                "mean recall over 5 seeds: component %.3f >= shared %.3f >= "
                "task %.3f; component-task %.1f pts >= 3; min-uniform %.1f "
                "pts >= 15 (uniform %.3f; %.0f s < 600 s)",
                mean.component, mean.shared, mean.task,
                100 * (mean.component - mean.task),
                100 * (min_trained - mean.uniform), mean.uniform, elapsed);
  return report(4, ordered && gain && beats_uniform && elapsed < 600.0,
                detail);
}

bool criterion5(const SharingOutcome& mean) {
  const double gap = mean.component - mean.no_text;
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "text constraints in training: %.3f vs %.3f without "
                "(+%.1f pts >= 3, mean over 5 seeds)",
                mean.component, mean.no_text, 100 * gap);
  return report(5, gap >= 0.03, detail);
}

bool criterion6() {
  std::size_t contained = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto corpus = sharing_corpus(6600 + seed);
    for (const auto& video : corpus.videos) {
      const auto& task = corpus.tasks[video.task_index];
      ConstraintWindows windows;
      try {
        windows = text::derive_windows(
            video.transcript, task, video.features.num_segments(),
            text::kDefaultSlidingWindow, 4.5);
      } catch (const std::invalid_argument&) {
        continue;
      }
      for (std::size_t k = 0; k < task.steps.size(); ++k) {
        if (video.ground_truth[k].empty()) continue;  // missing step
        ++total;
        const auto start_segment =
            static_cast<std::size_t>(video.ground_truth[k][0].start_sec);
        if (windows.allows(start_segment, k)) ++contained;
      }
    }
  }
  const double rate =
      static_cast<double>(contained) / static_cast<double>(total);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "narration windows contain the true start for %.1f%% of "
                "non-missing steps (>= 90%%, jitter 2 s, half-width 4.5 s)",
                100 * rate);
  return report(6, rate >= 0.90, detail);
}

bool criterion7() {
  const bool lis = eval::order_consistency({2, 1, 3}) == 2.0 / 3.0;
  const bool ln_k =
      model::step_cross_entropy({0.0, 0.0, 0.0}, 1).loss == std::log(3.0);
  StepComponentMatrix a;
  a.entries = BinaryMatrix(1, 3, 0);
  a.entries(0, 0) = a.entries(0, 2) = 1;
  a.row_degrees = {2};
  const bool composition =
      model::compose_step_scores({0.2, 9.9, 0.4}, a)[0] == (0.2 + 0.4) / 2.0;
  const bool uniform = eval::uniform_baseline(10, 2).step_segments ==
                       std::vector<std::size_t>{2, 7};
  char detail[200];
  std::snprintf(detail, sizeof(detail),
                "order_consistency([2,1,3])=2/3 %s; zero-weight loss=ln K %s; "
                "composition example 0.3 %s; uniform(10,2)=(2,7) %s (all exact)",
                lis ? "ok" : "BAD", ln_k ? "ok" : "BAD", composition ? "ok" : "BAD",
                uniform ? "ok" : "BAD");
  return report(7, lis && ln_k && composition && uniform, detail);
}

bool criterion8() {
  const char* tasks_path = std::getenv("CROSSTASK_TASKS");
  const char* annot_manifest = std::getenv("CROSSTASK_ANNOTATIONS");
  if (!tasks_path && !annot_manifest) {
    std::printf(
        "SKIP criterion 8: optional external-data check; set CROSSTASK_TASKS "
        "and/or CROSSTASK_ANNOTATIONS to enable\n");
    return true;
  }
  bool ok = true;
  std::string detail;
  if (tasks_path) {
    const auto tasks = io::read_tasks(tasks_path);
    const auto vocab = build_vocabulary(tasks);
    detail += "vocabulary size " + std::to_string(vocab.size()) +
              " (expect 383)";
    ok = ok && vocab.size() == 383;
  }
  if (annot_manifest) {
    // One line per video: task_id<TAB>annotation_file<TAB>num_steps<TAB>
    // num_segments; paths relative to the manifest.
    const auto lines =
        io::detail::split_lines(io::detail::slurp(annot_manifest));
    const auto base = std::filesystem::path(annot_manifest).parent_path();
    std::vector<io::VideoGroundTruth> gts;
    std::vector<std::size_t> lengths;
    for (const auto& line : lines) {
      if (line.text.empty()) continue;
      const auto fields = io::detail::split_tabs(line.text);
      if (fields.size() != 4)
        throw ParseError("annotation manifest: expected 4 fields",
                         line.offset);
      const auto path = (base / fields[1]).string();
      gts.push_back(io::read_annotations(
          path, io::detail::parse_index(fields[2], path, line.offset)));
      lengths.push_back(
          io::detail::parse_index(fields[3], path, line.offset));
    }
    const auto stats = eval::corpus_stats(gts, lengths);
    char buf[120];
    std::snprintf(buf, sizeof(buf),
                  "; background %.1f%% (72+-2), missing %.1f%% (31+-2)",
                  100 * stats.background_fraction,
                  100 * stats.missing_step_fraction);
    detail += buf;
    ok = ok && std::abs(stats.background_fraction - 0.72) <= 0.02 &&
         std::abs(stats.missing_step_fraction - 0.31) <= 0.02;
  }
  return report(8, ok, detail);
}

}  // namespace

int main() {
  bool ok = true;
  ok &= criterion1();
  ok &= criterion2();
  ok &= criterion3();
  const auto start = std::chrono::steady_clock::now();
  const SharingOutcome outcome = run_sharing_experiments();
  const double sharing_elapsed = seconds_since(start);
  ok &= criterion4(outcome, sharing_elapsed);
  ok &= criterion5(outcome);
  ok &= criterion6();
  ok &= criterion7();
  ok &= criterion8();
  return ok ? 0 : 1;
}
