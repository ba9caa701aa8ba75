// tests/test_io.cpp

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

#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "ordsteps/io.hpp"
#include "test_util.hpp"

using namespace ordsteps;
namespace fs = std::filesystem;

namespace {

std::string read_bytes(const std::string& path) {
  return io::detail::slurp(path);
}

}  // namespace

TEST_CASE("feature file round trip is bit-identical") {
  auto dir = testutil::scratch_dir("io_feat");
  Rng rng(1);
  FeatureSequence f;
  f.values = Matrix(7, 5);
  for (double& v : f.values.data())
    v = static_cast<double>(static_cast<float>(rng.normal()));
  const auto path = dir + "/a.feat";
  io::write_feature_file(path, f);
  auto back = io::read_feature_file(path);
  CHECK(back.values == f.values);
  io::write_feature_file(dir + "/b.feat", back);
  CHECK(read_bytes(path) == read_bytes(dir + "/b.feat"));
}

TEST_CASE("feature file rejects malformed input with byte offsets") {
  auto dir = testutil::scratch_dir("io_feat_bad");
  FeatureSequence f;
  f.values = Matrix(2, 3, 1.0);
  const auto path = dir + "/a.feat";
  io::write_feature_file(path, f);

  SECTION("truncated payload") {
    auto bytes = read_bytes(path);
    io::detail::spit(path, bytes.substr(0, bytes.size() - 2));
    try {
      io::read_feature_file(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.byte_offset() > 0);
    }
  }
  SECTION("bad magic") {
    auto bytes = read_bytes(path);
    bytes[0] = 'X';
    io::detail::spit(path, bytes);
    CHECK_THROWS_AS(io::read_feature_file(path), ParseError);
  }
  SECTION("zero segments rejected") {
    std::string bytes;
    bytes.append(io::kFeatureMagic, 4);
    io::detail::put_u32(bytes, 0);
    io::detail::put_u32(bytes, 3);
    io::detail::spit(path, bytes);
    CHECK_THROWS_AS(io::read_feature_file(path), ParseError);
  }
  SECTION("trailing bytes rejected") {
    auto bytes = read_bytes(path) + "x";
    io::detail::spit(path, bytes);
    CHECK_THROWS_AS(io::read_feature_file(path), ParseError);
  }
}

TEST_CASE("task file round trip and errors") {
  auto dir = testutil::scratch_dir("io_tasks");
  std::vector<TaskSpec> tasks(2);
  tasks[0].id = "make_latte";
  tasks[0].title = "Make Latte";
  tasks[0].steps = {"pour milk", "steam milk", "serve"};
  tasks[1].id = "jack_car";
  tasks[1].title = "Jack Up Car";
  tasks[1].steps = {"position jack", "jack up car"};
  const auto path = dir + "/tasks.txt";
  io::write_tasks(path, tasks);
  auto back = io::read_tasks(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == tasks[0].id);
  CHECK(back[0].steps == tasks[0].steps);
  CHECK(back[1].steps == tasks[1].steps);

  SECTION("steps are lowercased on read") {
    io::detail::spit(path, "t\tTitle\nsteps:\tPour Milk|SERVE\n");
    auto t = io::read_tasks(path);
    CHECK(t[0].steps == std::vector<std::string>{"pour milk", "serve"});
  }
  SECTION("missing steps line") {
    io::detail::spit(path, "t\tTitle\n");
    CHECK_THROWS_AS(io::read_tasks(path), ParseError);
  }
  SECTION("bad header") {
    io::detail::spit(path, "only_id\nsteps:\ta\n");
    CHECK_THROWS_AS(io::read_tasks(path), ParseError);
  }
}

TEST_CASE("transcript round trip") {
  auto dir = testutil::scratch_dir("io_transcript");
  text::TimedTranscript t;
  t.words = {{"pour", 0.5}, {"the", 1.25}, {"milk", 1.25}, {"now", 3.0}};
  const auto path = dir + "/x.txt";
  io::write_transcript(path, t);
  auto back = io::read_transcript(path);
  REQUIRE(back.words.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.words[i].token == t.words[i].token);
    CHECK(back.words[i].time_sec == t.words[i].time_sec);
  }
  SECTION("decreasing times rejected") {
    io::detail::spit(path, "2.0\tpour\n1.0\tmilk\n");
    CHECK_THROWS_AS(io::read_transcript(path), std::invalid_argument);
  }
}

TEST_CASE("constraint file round trip, unconstrained steps, clamping") {
  auto dir = testutil::scratch_dir("io_constraints");
  ConstraintWindows w = ConstraintWindows::unconstrained(3);
  w.windows[0] = ConstraintWindows::Window{2, 9};
  w.windows[2] = ConstraintWindows::Window{11, 40};
  const auto path = dir + "/c.txt";
  io::write_constraints(path, w);
  auto back = io::read_constraints(path, 3);
  CHECK(back.windows[0]->lo == 2);
  CHECK(back.windows[0]->hi == 9);
  CHECK_FALSE(back.windows[1].has_value());
  CHECK(back.windows[2]->hi == 40);
  auto clamped = io::clamp_windows(back, 20);
  CHECK(clamped.windows[2]->hi == 19);
  CHECK(clamped.windows[0]->hi == 9);

  SECTION("step index out of range") {
    io::detail::spit(path, "7\t0\t3\n");
    CHECK_THROWS_AS(io::read_constraints(path, 3), ParseError);
  }
}

TEST_CASE("annotation round trip") {
  auto dir = testutil::scratch_dir("io_annot");
  io::VideoGroundTruth gt(3);
  gt[0] = {{0.0, 4.0}, {10.0, 12.5}};
  gt[2] = {{20.0, 21.0}};
  const auto path = dir + "/a.txt";
  io::write_annotations(path, gt);
  auto back = io::read_annotations(path, 3);
  REQUIRE(back.size() == 3);
  CHECK(back[0].size() == 2);
  CHECK(back[1].empty());
  CHECK(back[2][0].start_sec == 20.0);
  CHECK(back[0][1].end_sec == 12.5);
}

TEST_CASE("model file round trip is bit-identical") {
  auto dir = testutil::scratch_dir("io_model");
  Rng rng(2);
  auto bank = model::ComponentClassifierBank::zeros(4, 3, 0.25);
  for (double& v : bank.weights.data()) v = rng.normal();
  for (double& v : bank.biases) v = rng.normal();
  const auto path = dir + "/m.bin";
  io::write_model(path, bank);
  auto back = io::read_model(path);
  CHECK(back.weights == bank.weights);
  CHECK(back.biases == bank.biases);
  CHECK(back.dropout_rate == bank.dropout_rate);
  io::write_model(dir + "/m2.bin", back);
  CHECK(read_bytes(path) == read_bytes(dir + "/m2.bin"));

  SECTION("magic is CTMD") {
    auto bytes = read_bytes(path);
    CHECK(bytes.substr(0, 4) == "CTMD");
  }
  SECTION("truncation reported with offset") {
    auto bytes = read_bytes(path);
    io::detail::spit(path, bytes.substr(0, 10));
    CHECK_THROWS_AS(io::read_model(path), ParseError);
  }
}

TEST_CASE("manifest parsing and aux sniffing") {
  auto dir = testutil::scratch_dir("io_manifest");
  io::detail::spit(dir + "/v1.txt", "0.5\tpour\n1.5\tmilk\n");
  io::detail::spit(dir + "/v2.txt", "0\t3\t9\n");
  io::detail::spit(dir + "/manifest.txt",
                   "taskA\tv1.feat\tv1.txt\n"
                   "taskA\tv2.feat\tv2.txt\n"
                   "taskB\tv3.feat\t-\n");
  auto entries = io::read_manifest(dir + "/manifest.txt");
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].kind == io::ManifestEntry::Aux::kTranscript);
  CHECK(entries[1].kind == io::ManifestEntry::Aux::kConstraints);
  CHECK(entries[2].kind == io::ManifestEntry::Aux::kNone);
  CHECK(fs::path(entries[0].feature_path).is_absolute() ==
        fs::path(dir).is_absolute());
  CHECK(entries[0].feature_path == (fs::path(dir) / "v1.feat").string());
}

TEST_CASE("prediction file round trip") {
  auto dir = testutil::scratch_dir("io_pred");
  io::PredictionFile pred;
  pred.task_id = "taskA";
  pred.step_segments = {2, 7, 11};
  pred.scores = Matrix(4, 3);
  Rng rng(3);
  for (double& v : pred.scores.data()) v = rng.normal();
  const auto path = dir + "/v.pred";
  io::write_prediction(path, pred);
  auto back = io::read_prediction(path);
  CHECK(back.task_id == pred.task_id);
  CHECK(back.step_segments == pred.step_segments);
  CHECK(back.scores == pred.scores);  // %.17g round-trips doubles
}

TEST_CASE("readers reject garbage without crashing") {
  auto dir = testutil::scratch_dir("io_garbage");
  const auto path = dir + "/g.bin";
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::string bytes;
    const std::size_t n = rng.below(64);
    for (std::size_t i = 0; i < n; ++i)
      bytes.push_back(static_cast<char>(rng.below(256)));
    io::detail::spit(path, bytes);
    CHECK_THROWS(io::read_feature_file(path));
    CHECK_THROWS(io::read_model(path));
  }
  io::detail::spit(path, "not\ta\tvalid\ttask\tfile\n\n1 2 3");
  CHECK_THROWS_AS(io::read_tasks(path), ParseError);
  io::detail::spit(path, "abc\tdef\tghi\n");
  CHECK_THROWS_AS(io::read_annotations(path, 3), ParseError);
  CHECK_THROWS_AS(io::read_constraints(path, 3), ParseError);
  io::detail::spit(path, "one_field_only\n");
  CHECK_THROWS_AS(io::read_transcript(path), ParseError);
}

TEST_CASE("report writer emits the metric/task/value table") {
  auto dir = testutil::scratch_dir("io_report");
  const auto path = dir + "/r.tsv";
  io::write_report(path, {{"recall", "taskA", 0.5}, {"recall", "all", 0.25}});
  CHECK(read_bytes(path) ==
        "metric\ttask\tvalue\nrecall\ttaskA\t0.5\nrecall\tall\t0.25\n");
}
