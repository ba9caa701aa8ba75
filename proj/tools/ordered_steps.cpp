// tools/ordered_steps.cpp

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

// Command-line surface: derive text constraints, train, infer, evaluate, and
// generate desk-scale synthetic corpora. Exit codes: 0 success, 1 usage
// error, 2 data error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordsteps/core.hpp"
#include "ordsteps/evalkit.hpp"
#include "ordsteps/io.hpp"
#include "ordsteps/synth.hpp"
#include "ordsteps/text_constraints.hpp"
#include "ordsteps/trainer.hpp"

namespace fs = std::filesystem;
using namespace ordsteps;

namespace {

Granularity parse_granularity(const std::string& name) {
  if (name == "component") return Granularity::kComponent;
  if (name == "shared-step") return Granularity::kSharedStep;
  if (name == "task-step") return Granularity::kTaskStep;
  throw std::runtime_error("unknown granularity '" + name + "'");
}

const TaskSpec& task_by_id(const std::vector<TaskSpec>& tasks,
                           const std::string& id) {
  for (const auto& task : tasks)
    if (task.id == id) return task;
  throw std::runtime_error("task '" + id + "' not found in the task file");
}

/// A transcript file <task>_<video>.txt belongs to the longest task id that
/// prefixes its stem at an underscore (or equals the whole stem).
const TaskSpec& task_for_stem(const std::vector<TaskSpec>& tasks,
                              const std::string& stem) {
  const TaskSpec* best = nullptr;
  for (const auto& task : tasks) {
    const bool matches =
        stem == task.id ||
        (stem.size() > task.id.size() && stem.rfind(task.id, 0) == 0 &&
         stem[task.id.size()] == '_');
    if (matches && (!best || task.id.size() > best->id.size())) best = &task;
  }
  if (!best)
    throw std::runtime_error("no task id prefixes transcript '" + stem + "'");
  return *best;
}

std::vector<std::string> sorted_files(const std::string& dir,
                                      const std::string& extension) {
  std::vector<std::string> files;
  if (!fs::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == extension)
      files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

struct TextConstraintArgs {
  std::string tasks_path, transcripts_dir, out_dir;
  std::size_t window = text::kDefaultSlidingWindow;
  double half_width = text::kDefaultHalfWidthSec;
};

int run_text_constraints(const TextConstraintArgs& args) {
  const auto tasks = io::read_tasks(args.tasks_path);
  fs::create_directories(args.out_dir);
  for (const auto& path : sorted_files(args.transcripts_dir, ".txt")) {
    const std::string stem = fs::path(path).stem().string();
    const TaskSpec& task = task_for_stem(tasks, stem);
    const auto transcript = io::read_transcript(path);
    if (transcript.words.empty()) {
      std::cerr << "warning: empty transcript " << path << ", skipping\n";
      continue;
    }
    // The video length is unknown here, so clip at a cap no window reaches;
    // loaders clamp to the real segment count.
    const double last_time = transcript.words.back().time_sec;
    const std::size_t cap = static_cast<std::size_t>(
        std::ceil(last_time + args.half_width) + 2.0);
    ConstraintWindows windows;
    try {
      windows = text::derive_windows(transcript, task, cap, args.window,
                                     args.half_width);
    } catch (const std::invalid_argument& e) {
      std::cerr << "warning: " << path << ": " << e.what() << ", skipping\n";
      continue;
    }
    io::write_constraints(
        (fs::path(args.out_dir) / (stem + ".txt")).string(), windows);
  }
  return 0;
}

struct TrainArgs {
  std::string tasks_path, manifest_path, out_path;
  std::string mode = "simple";
  std::string granularity = "component";
  bool no_text_constraints = false;
  bool runs_assignments = false;
  std::size_t init_epochs = 30;
  std::size_t outer = 30;
  std::size_t inner = 3;
  double lr = 1e-5;
  std::size_t batch = 32;
  double dropout = 0.5;
  std::uint64_t seed = 0;
  std::size_t window = text::kDefaultSlidingWindow;
  double half_width = text::kDefaultHalfWidthSec;
};

int run_train(const TrainArgs& args) {
  const auto tasks = io::read_tasks(args.tasks_path);
  train::TrainConfig config;
  config.mode = args.mode == "majorize" ? train::OptimMode::kMajorize
                                        : train::OptimMode::kSimple;
  if (args.mode != "simple" && args.mode != "majorize")
    throw std::runtime_error("unknown mode '" + args.mode + "'");
  config.granularity = parse_granularity(args.granularity);
  config.use_text_constraints = !args.no_text_constraints;
  config.assignment_mode = args.runs_assignments ? AssignmentMode::kRuns
                                                 : AssignmentMode::kSingleFrame;
  config.init_epochs = args.init_epochs;
  config.outer_iterations = args.outer;
  config.inner_epochs = args.inner;
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.dropout_rate = args.dropout;
  config.seed = args.seed;

  std::map<std::string, std::size_t> task_index;
  for (std::size_t i = 0; i < tasks.size(); ++i) task_index[tasks[i].id] = i;

  std::vector<train::VideoData> videos;
  for (const auto& entry : io::read_manifest(args.manifest_path)) {
    auto it = task_index.find(entry.task_id);
    if (it == task_index.end())
      throw std::runtime_error("manifest references unknown task '" +
                               entry.task_id + "'");
    train::VideoData video;
    video.id = fs::path(entry.feature_path).stem().string();
    video.task_index = it->second;
    video.features = io::read_feature_file(entry.feature_path);
    const std::size_t num_steps = tasks[it->second].num_steps();
    const std::size_t num_segments = video.features.num_segments();
    video.windows = ConstraintWindows::unconstrained(num_steps);
    if (config.use_text_constraints &&
        entry.kind == io::ManifestEntry::Aux::kTranscript) {
      const auto transcript = io::read_transcript(entry.aux_path);
      try {
        video.windows =
            text::derive_windows(transcript, tasks[it->second], num_segments,
                                 args.window, args.half_width);
      } catch (const std::invalid_argument& e) {
        std::cerr << "warning: " << entry.aux_path << ": " << e.what()
                  << "; training " << video.id << " unconstrained\n";
      }
    } else if (config.use_text_constraints &&
               entry.kind == io::ManifestEntry::Aux::kConstraints) {
      video.windows = io::clamp_windows(
          io::read_constraints(entry.aux_path, num_steps), num_segments);
    }
    videos.push_back(std::move(video));
  }

  const auto vocab = build_vocabulary(tasks, config.granularity);
  auto state = train::train(tasks, vocab, videos, config);
  for (std::size_t i = 0; i < state.objective_history.size(); ++i)
    std::cerr << "iteration " << (i + 1) << ": objective "
              << state.objective_history[i] << "\n";
  io::write_model(args.out_path, state.bank);
  return 0;
}

struct InferArgs {
  std::string model_path, tasks_path, features_path, out_path;
  std::string granularity = "component";
  std::string task_id;  // optional when the task file has exactly one task
};

int run_infer(const InferArgs& args) {
  const auto tasks = io::read_tasks(args.tasks_path);
  const auto bank = io::read_model(args.model_path);
  const TaskSpec& task = args.task_id.empty()
                             ? (tasks.size() == 1
                                    ? tasks.front()
                                    : throw std::runtime_error(
                                          "task file has several tasks; pass "
                                          "--task ID"))
                             : task_by_id(tasks, args.task_id);
  const auto vocab = build_vocabulary(tasks, parse_granularity(args.granularity));
  if (vocab.size() != bank.num_components())
    throw std::runtime_error(
        "model was trained over a different vocabulary (" +
        std::to_string(bank.num_components()) + " components, task file gives " +
        std::to_string(vocab.size()) + ")");
  const auto a =
      build_step_component_matrix(task, vocab, parse_granularity(args.granularity));
  const auto features = io::read_feature_file(args.features_path);
  const auto pred = eval::infer(bank, a, features);
  io::PredictionFile out;
  out.task_id = task.id;
  out.step_segments = pred.step_segments;
  out.scores = pred.scores;
  io::write_prediction(args.out_path, out);
  return 0;
}

struct EvalArgs {
  std::string pred_dir, gt_dir, out_path;
  std::string metric = "recall";
};

int run_eval(const EvalArgs& args) {
  struct VideoEval {
    io::PredictionFile pred;
    io::VideoGroundTruth gt;
  };
  std::map<std::string, std::vector<VideoEval>> by_task;
  for (const auto& path : sorted_files(args.pred_dir, ".pred")) {
    VideoEval v;
    v.pred = io::read_prediction(path);
    const auto gt_path = fs::path(args.gt_dir) /
                         (fs::path(path).stem().string() + ".txt");
    if (!fs::exists(gt_path))
      throw std::runtime_error("no ground truth for " + path);
    v.gt = io::read_annotations(gt_path.string(),
                                v.pred.step_segments.size());
    by_task[v.pred.task_id].push_back(std::move(v));
  }
  if (by_task.empty())
    throw std::runtime_error("no .pred files in " + args.pred_dir);

  std::vector<io::ReportRow> rows;
  if (args.metric == "recall") {
    std::vector<eval::Prediction> all_preds;
    std::vector<io::VideoGroundTruth> all_gt;
    for (const auto& [task_id, videos] : by_task) {
      std::vector<eval::Prediction> preds;
      std::vector<io::VideoGroundTruth> gts;
      for (const auto& v : videos) {
        eval::Prediction p;
        p.step_segments = v.pred.step_segments;
        p.scores = v.pred.scores;
        preds.push_back(p);
        gts.push_back(v.gt);
        all_preds.push_back(std::move(p));
        all_gt.push_back(v.gt);
      }
      rows.push_back({"recall", task_id, eval::recall(preds, gts)});
    }
    rows.push_back({"recall", "all", eval::recall(all_preds, all_gt)});
  } else if (args.metric == "map") {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [task_id, videos] : by_task) {
      std::vector<eval::ScoredVideo> scored;
      for (const auto& v : videos)
        scored.push_back({&v.pred.scores, &v.gt, 1.0});
      try {
        const double task_map = eval::mean_average_precision(scored);
        rows.push_back({"map", task_id, task_map});
        sum += task_map;
        ++count;
      } catch (const std::invalid_argument& e) {
        std::cerr << "warning: task " << task_id << ": " << e.what() << "\n";
      }
    }
    if (count == 0) throw std::runtime_error("no task has positive segments");
    rows.push_back({"map", "all", sum / static_cast<double>(count)});
  } else if (args.metric == "stats") {
    std::vector<io::VideoGroundTruth> all_gt;
    std::vector<std::size_t> all_lengths;
    for (const auto& [task_id, videos] : by_task) {
      std::vector<io::VideoGroundTruth> gts;
      std::vector<std::size_t> lengths;
      for (const auto& v : videos) {
        gts.push_back(v.gt);
        lengths.push_back(v.pred.scores.rows());
        all_gt.push_back(v.gt);
        all_lengths.push_back(v.pred.scores.rows());
      }
      const auto stats = eval::corpus_stats(gts, lengths);
      rows.push_back({"background_fraction", task_id, stats.background_fraction});
      rows.push_back(
          {"missing_step_fraction", task_id, stats.missing_step_fraction});
      rows.push_back(
          {"order_consistency", task_id, stats.mean_order_consistency});
    }
    const auto stats = eval::corpus_stats(all_gt, all_lengths);
    rows.push_back({"background_fraction", "all", stats.background_fraction});
    rows.push_back(
        {"missing_step_fraction", "all", stats.missing_step_fraction});
    rows.push_back({"order_consistency", "all", stats.mean_order_consistency});
  } else {
    throw std::runtime_error("unknown metric '" + args.metric + "'");
  }
  io::write_report(args.out_path, rows);
  return 0;
}

struct GenSynthArgs {
  std::string spec_path, out_dir;
};

int run_gen_synth(const GenSynthArgs& args) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::detail::slurp(args.spec_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(args.spec_path + ": " + e.what(),
                     static_cast<std::size_t>(e.byte));
  }
  synth::SyntheticSpec spec;
  const std::map<std::string, std::function<void(const nlohmann::json&)>>
      setters = {
          {"num_tasks", [&](const auto& v) { spec.num_tasks = v; }},
          {"steps_per_task", [&](const auto& v) { spec.steps_per_task = v; }},
          {"components_per_step",
           [&](const auto& v) { spec.components_per_step = v; }},
          {"shared_component_pool_size",
           [&](const auto& v) { spec.shared_component_pool_size = v; }},
          {"videos_per_task", [&](const auto& v) { spec.videos_per_task = v; }},
          {"video_length", [&](const auto& v) { spec.video_length = v; }},
          {"feature_dim", [&](const auto& v) { spec.feature_dim = v; }},
          {"signal_strength", [&](const auto& v) { spec.signal_strength = v; }},
          {"noise_std", [&](const auto& v) { spec.noise_std = v; }},
          {"missing_step_prob",
           [&](const auto& v) { spec.missing_step_prob = v; }},
          {"narration_jitter_sec",
           [&](const auto& v) { spec.narration_jitter_sec = v; }},
          {"seed", [&](const auto& v) { spec.seed = v; }},
      };
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end())
      throw std::runtime_error(args.spec_path + ": unknown key '" + key + "'");
    it->second(value);
  }
  const auto corpus = synth::generate_synthetic(spec);
  synth::write_corpus(corpus, args.out_dir);
  std::cerr << "wrote " << corpus.videos.size() << " videos for "
            << corpus.tasks.size() << " tasks to " << args.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weakly supervised temporal localization of ordered task steps"};
  app.require_subcommand(1);

  TextConstraintArgs tc;
  auto* tc_cmd = app.add_subcommand(
      "text-constraints", "derive per-step windows from timed narration");
  tc_cmd->add_option("--tasks", tc.tasks_path, "task file")->required();
  tc_cmd->add_option("--transcripts", tc.transcripts_dir, "transcript dir")
      ->required();
  tc_cmd->add_option("--out", tc.out_dir, "output dir")->required();
  tc_cmd->add_option("--window", tc.window, "sliding window in words");
  tc_cmd->add_option("--half-width", tc.half_width, "window half-width (s)");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "alternating weakly supervised training");
  tr_cmd->add_option("--tasks", tr.tasks_path, "task file")->required();
  tr_cmd->add_option("--manifest", tr.manifest_path, "training manifest")
      ->required();
  tr_cmd->add_option("--out", tr.out_path, "model output path")->required();
  tr_cmd->add_option("--mode", tr.mode, "simple|majorize");
  tr_cmd->add_option("--granularity", tr.granularity,
                     "component|shared-step|task-step");
  tr_cmd->add_flag("--no-text-constraints", tr.no_text_constraints,
                   "ignore narration windows during training");
  tr_cmd->add_flag("--runs", tr.runs_assignments,
                   "contiguous-run assignments instead of single frames");
  tr_cmd->add_option("--init-epochs", tr.init_epochs, "initialization epochs");
  tr_cmd->add_option("--outer", tr.outer, "outer alternations");
  tr_cmd->add_option("--inner", tr.inner, "inner epochs per alternation");
  tr_cmd->add_option("--lr", tr.lr, "learning rate");
  tr_cmd->add_option("--batch", tr.batch, "minibatch size");
  tr_cmd->add_option("--dropout", tr.dropout, "input dropout rate");
  tr_cmd->add_option("--seed", tr.seed, "random seed");
  tr_cmd->add_option("--window", tr.window, "sliding window in words");
  tr_cmd->add_option("--half-width", tr.half_width, "window half-width (s)");

  InferArgs in;
  auto* in_cmd = app.add_subcommand("infer", "localize steps in one video");
  in_cmd->add_option("--model", in.model_path, "model file")->required();
  in_cmd->add_option("--tasks", in.tasks_path, "task file")->required();
  in_cmd->add_option("--features", in.features_path, "feature file")
      ->required();
  in_cmd->add_option("--out", in.out_path, "prediction output")->required();
  in_cmd->add_option("--granularity", in.granularity,
                     "component|shared-step|task-step");
  in_cmd->add_option("--task", in.task_id, "task id (when several tasks)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  ev_cmd->add_option("--pred", ev.pred_dir, "prediction dir")->required();
  ev_cmd->add_option("--gt", ev.gt_dir, "annotation dir")->required();
  ev_cmd->add_option("--out", ev.out_path, "report path")->required();
  ev_cmd->add_option("--metric", ev.metric, "recall|map|stats");

  GenSynthArgs gs;
  auto* gs_cmd = app.add_subcommand("gen-synth", "generate a synthetic corpus");
  gs_cmd->add_option("--spec", gs.spec_path, "JSON spec")->required();
  gs_cmd->add_option("--out", gs.out_dir, "output dir")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (tc_cmd->parsed()) return run_text_constraints(tc);
    if (tr_cmd->parsed()) return run_train(tr);
    if (in_cmd->parsed()) return run_infer(in);
    if (ev_cmd->parsed()) return run_eval(ev);
    if (gs_cmd->parsed()) return run_gen_synth(gs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
