// ordsteps/io.hpp

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
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ordsteps/model.hpp"
#include "ordsteps/text_constraints.hpp"
#include "ordsteps/types.hpp"

namespace ordsteps::io {

// On-disk formats. Binary integers are unsigned 32-bit little-endian; floats
// are IEEE-754 little-endian (32-bit in feature files, 64-bit in model
// files). Text files are UTF-8 and tab-separated. All writers are
// deterministic functions of their inputs.

constexpr char kFeatureMagic[4] = {'C', 'T', 'F', 'S'};
constexpr char kModelMagic[4] = {'C', 'T', 'M', 'D'};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i)
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class Reader {
 public:
  Reader(std::string bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void expect_magic(const char magic[4]) {
    if (remaining() < 4 || std::memcmp(bytes_.data() + pos_, magic, 4) != 0)
      throw ParseError(name_ + ": bad magic", pos_);
    pos_ += 4;
  }

  std::uint32_t get_u32(const char* field) {
    if (remaining() < 4)
      throw ParseError(name_ + ": truncated " + field, pos_);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  float get_f32(const char* field) {
    std::uint32_t bits = get_u32(field);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double get_f64(const char* field) {
    if (remaining() < 8)
      throw ParseError(name_ + ": truncated " + field, pos_);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= static_cast<std::uint64_t>(
                  static_cast<unsigned char>(bytes_[pos_ + i]))
              << (8 * i);
    pos_ += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  void expect_end() {
    if (remaining() != 0)
      throw ParseError(name_ + ": trailing bytes", pos_);
  }

 private:
  std::string bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

/// Lines with the byte offset of each line start; handles \n and \r\n.
struct Line {
  std::string text;
  std::size_t offset;
};

inline std::vector<Line> split_lines(const std::string& bytes) {
  std::vector<Line> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= bytes.size(); ++i) {
    if (i == bytes.size() || bytes[i] == '\n') {
      std::string text = bytes.substr(start, i - start);
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (i < bytes.size() || !text.empty()) lines.push_back({text, start});
      start = i + 1;
    }
  }
  return lines;
}

inline std::vector<std::string> split_tabs(const std::string& s) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\t') {
      fields.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

inline double parse_double(const std::string& s, const std::string& name,
                           std::size_t offset) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(name + ": bad number '" + s + "'", offset);
  }
}

inline std::size_t parse_index(const std::string& s, const std::string& name,
                               std::size_t offset) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size() || v < 0) throw std::invalid_argument("bad");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(name + ": bad index '" + s + "'", offset);
  }
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string lowercase(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------- features

inline void write_feature_file(const std::string& path,
                               const FeatureSequence& features) {
  features.validate();
  std::string out;
  out.append(kFeatureMagic, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(features.values.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(features.values.cols()));
  for (double v : features.values.data())
    detail::put_f32(out, static_cast<float>(v));
  detail::spit(path, out);
}

inline FeatureSequence read_feature_file(const std::string& path) {
  detail::Reader r(detail::slurp(path), path);
  r.expect_magic(kFeatureMagic);
  std::uint32_t t = r.get_u32("segment count");
  std::uint32_t d = r.get_u32("feature dim");
  if (t == 0) throw ParseError(path + ": zero segments", 4);
  if (d == 0) throw ParseError(path + ": zero feature dim", 8);
  FeatureSequence f;
  f.values = Matrix(t, d);
  for (std::size_t i = 0; i < f.values.data().size(); ++i)
    f.values.data()[i] = static_cast<double>(r.get_f32("payload"));
  r.expect_end();
  f.validate();
  return f;
}

// ------------------------------------------------------------------- tasks

// One task per block: `id<TAB>title`, then `steps:<TAB>a|b|c`, blank line
// between blocks. Step strings are lowercased on read.

inline void write_tasks(const std::string& path,
                        const std::vector<TaskSpec>& tasks) {
  std::string out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (i) out.push_back('\n');
    out += tasks[i].id + "\t" + tasks[i].title + "\n";
    out += "steps:\t";
    for (std::size_t k = 0; k < tasks[i].steps.size(); ++k) {
      if (k) out.push_back('|');
      out += tasks[i].steps[k];
    }
    out.push_back('\n');
  }
  detail::spit(path, out);
}

inline std::vector<TaskSpec> read_tasks(const std::string& path) {
  auto lines = detail::split_lines(detail::slurp(path));
  std::vector<TaskSpec> tasks;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (lines[i].text.empty()) {
      ++i;
      continue;
    }
    auto head = detail::split_tabs(lines[i].text);
    if (head.size() != 2 || head[0].empty())
      throw ParseError(path + ": expected 'id<TAB>title'", lines[i].offset);
    if (i + 1 >= lines.size())
      throw ParseError(path + ": missing steps line", lines[i].offset);
    auto steps_line = detail::split_tabs(lines[i + 1].text);
    if (steps_line.size() != 2 || steps_line[0] != "steps:")
      throw ParseError(path + ": expected 'steps:<TAB>...'",
                       lines[i + 1].offset);
    TaskSpec task;
    task.id = head[0];
    task.title = head[1];
    std::string current;
    for (char c : steps_line[1] + "|") {
      if (c == '|') {
        if (!current.empty()) task.steps.push_back(detail::lowercase(current));
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    if (task.steps.empty())
      throw ParseError(path + ": task '" + task.id + "' has no steps",
                       lines[i + 1].offset);
    task.validate();
    tasks.push_back(std::move(task));
    i += 2;
  }
  if (tasks.empty()) throw ParseError(path + ": no tasks", 0);
  return tasks;
}

// -------------------------------------------------------------- transcripts

// One word per line: `time_sec<TAB>token`. Tokens are lowercased on read.

inline void write_transcript(const std::string& path,
                             const text::TimedTranscript& transcript) {
  std::string out;
  for (const auto& w : transcript.words)
    out += detail::format_double(w.time_sec) + "\t" + w.token + "\n";
  detail::spit(path, out);
}

inline text::TimedTranscript read_transcript(const std::string& path) {
  auto lines = detail::split_lines(detail::slurp(path));
  text::TimedTranscript t;
  for (const auto& line : lines) {
    if (line.text.empty()) continue;
    auto fields = detail::split_tabs(line.text);
    if (fields.size() != 2)
      throw ParseError(path + ": expected 'time<TAB>token'", line.offset);
    text::TimedTranscript::Word w;
    w.time_sec = detail::parse_double(fields[0], path, line.offset);
    w.token = detail::lowercase(fields[1]);
    if (w.token.empty())
      throw ParseError(path + ": empty token", line.offset);
    t.words.push_back(std::move(w));
  }
  t.validate();
  return t;
}

// -------------------------------------------------------------- constraints

// One line per constrained step: `step_index<TAB>lo_segment<TAB>hi_segment`.
// Steps without a line stay unconstrained. Upper bounds may exceed the video
// length (transcripts do not know it); clamp_windows() fixes them up once the
// segment count is known.

inline void write_constraints(const std::string& path,
                              const ConstraintWindows& windows) {
  std::string out;
  for (std::size_t k = 0; k < windows.windows.size(); ++k) {
    if (!windows.windows[k]) continue;
    out += std::to_string(k) + "\t" + std::to_string(windows.windows[k]->lo) +
           "\t" + std::to_string(windows.windows[k]->hi) + "\n";
  }
  detail::spit(path, out);
}

inline ConstraintWindows read_constraints(const std::string& path,
                                          std::size_t num_steps) {
  auto lines = detail::split_lines(detail::slurp(path));
  ConstraintWindows w = ConstraintWindows::unconstrained(num_steps);
  for (const auto& line : lines) {
    if (line.text.empty()) continue;
    auto fields = detail::split_tabs(line.text);
    if (fields.size() != 3)
      throw ParseError(path + ": expected 'step<TAB>lo<TAB>hi'", line.offset);
    std::size_t k = detail::parse_index(fields[0], path, line.offset);
    if (k >= num_steps)
      throw ParseError(path + ": step index out of range", line.offset);
    std::size_t lo = detail::parse_index(fields[1], path, line.offset);
    std::size_t hi = detail::parse_index(fields[2], path, line.offset);
    if (lo > hi) throw ParseError(path + ": lo > hi", line.offset);
    w.windows[k] = ConstraintWindows::Window{lo, hi};
  }
  return w;
}

/// Clips windows into [0, num_segments-1].
inline ConstraintWindows clamp_windows(const ConstraintWindows& w,
                                       std::size_t num_segments) {
  ConstraintWindows out = w;
  for (auto& win : out.windows) {
    if (!win) continue;
    win->lo = std::min(win->lo, num_segments - 1);
    win->hi = std::min(win->hi, num_segments - 1);
  }
  return out;
}

// -------------------------------------------------------------- annotations

// One line per ground-truth interval: `step_index<TAB>start_sec<TAB>end_sec`,
// inclusive at both ends.

struct Interval {
  double start_sec, end_sec;
};

/// Per-step interval lists for one video; an empty list means the step is
/// missing from the video.
using VideoGroundTruth = std::vector<std::vector<Interval>>;

inline void write_annotations(const std::string& path,
                              const VideoGroundTruth& gt) {
  std::string out;
  for (std::size_t k = 0; k < gt.size(); ++k)
    for (const auto& iv : gt[k])
      out += std::to_string(k) + "\t" + detail::format_double(iv.start_sec) +
             "\t" + detail::format_double(iv.end_sec) + "\n";
  detail::spit(path, out);
}

inline VideoGroundTruth read_annotations(const std::string& path,
                                         std::size_t num_steps) {
  auto lines = detail::split_lines(detail::slurp(path));
  VideoGroundTruth gt(num_steps);
  for (const auto& line : lines) {
    if (line.text.empty()) continue;
    auto fields = detail::split_tabs(line.text);
    if (fields.size() != 3)
      throw ParseError(path + ": expected 'step<TAB>start<TAB>end'",
                       line.offset);
    std::size_t k = detail::parse_index(fields[0], path, line.offset);
    if (k >= num_steps)
      throw ParseError(path + ": step index out of range", line.offset);
    Interval iv;
    iv.start_sec = detail::parse_double(fields[1], path, line.offset);
    iv.end_sec = detail::parse_double(fields[2], path, line.offset);
    if (iv.start_sec > iv.end_sec)
      throw ParseError(path + ": start > end", line.offset);
    gt[k].push_back(iv);
  }
  return gt;
}

// ------------------------------------------------------------------- model

inline void write_model(const std::string& path,
                        const model::ComponentClassifierBank& bank) {
  std::string out;
  out.append(kModelMagic, 4);
  detail::put_u32(out, static_cast<std::uint32_t>(bank.num_components()));
  detail::put_u32(out, static_cast<std::uint32_t>(bank.dim()));
  for (double v : bank.weights.data()) detail::put_f64(out, v);
  for (double v : bank.biases) detail::put_f64(out, v);
  detail::put_f64(out, bank.dropout_rate);
  detail::spit(path, out);
}

inline model::ComponentClassifierBank read_model(const std::string& path) {
  detail::Reader r(detail::slurp(path), path);
  r.expect_magic(kModelMagic);
  std::uint32_t m = r.get_u32("component count");
  std::uint32_t d = r.get_u32("feature dim");
  if (m == 0 || d == 0) throw ParseError(path + ": empty model", 4);
  model::ComponentClassifierBank bank;
  bank.weights = Matrix(m, d);
  for (std::size_t i = 0; i < bank.weights.data().size(); ++i)
    bank.weights.data()[i] = r.get_f64("weights");
  bank.biases.resize(m);
  for (std::size_t i = 0; i < m; ++i) bank.biases[i] = r.get_f64("biases");
  bank.dropout_rate = r.get_f64("dropout rate");
  r.expect_end();
  if (bank.dropout_rate < 0.0 || bank.dropout_rate >= 1.0)
    throw ParseError(path + ": dropout rate out of range", 0);
  return bank;
}

// ---------------------------------------------------------------- manifest

// One video per line: `task_id<TAB>feature_file<TAB>aux`, where aux is a
// transcript file, a precomputed constraint file, or `-` for none. Relative
// paths resolve against the manifest's directory. Transcript vs. constraint
// is decided by the first data line's field count (2 vs. 3).

struct ManifestEntry {
  enum class Aux { kNone, kTranscript, kConstraints };
  std::string task_id;
  std::string feature_path;
  std::string aux_path;  // empty when kind == kNone
  Aux kind = Aux::kNone;
};

inline ManifestEntry::Aux sniff_aux_kind(const std::string& path) {
  auto lines = detail::split_lines(detail::slurp(path));
  for (const auto& line : lines) {
    if (line.text.empty()) continue;
    std::size_t fields = detail::split_tabs(line.text).size();
    if (fields == 2) return ManifestEntry::Aux::kTranscript;
    if (fields == 3) return ManifestEntry::Aux::kConstraints;
    throw ParseError(path + ": unrecognized auxiliary file", line.offset);
  }
  // an empty file constrains nothing
  return ManifestEntry::Aux::kConstraints;
}

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
  auto lines = detail::split_lines(detail::slurp(path));
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };
  std::vector<ManifestEntry> entries;
  for (const auto& line : lines) {
    if (line.text.empty()) continue;
    auto fields = detail::split_tabs(line.text);
    if (fields.size() != 3)
      throw ParseError(path + ": expected 'task<TAB>features<TAB>aux'",
                       line.offset);
    ManifestEntry e;
    e.task_id = fields[0];
    e.feature_path = resolve(fields[1]);
    if (fields[2] == "-") {
      e.kind = ManifestEntry::Aux::kNone;
    } else {
      e.aux_path = resolve(fields[2]);
      e.kind = sniff_aux_kind(e.aux_path);
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ParseError(path + ": empty manifest", 0);
  return entries;
}

// -------------------------------------------------------------- predictions

/// A video's predicted segment per step plus the full score matrix, as
/// written by `infer` and consumed by `eval`.
struct PredictionFile {
  std::string task_id;
  std::vector<std::size_t> step_segments;
  Matrix scores;  // T x K
};

inline void write_prediction(const std::string& path,
                             const PredictionFile& pred) {
  std::string out = "task\t" + pred.task_id + "\n";
  out += "steps\t";
  for (std::size_t k = 0; k < pred.step_segments.size(); ++k) {
    if (k) out.push_back('|');
    out += std::to_string(pred.step_segments[k]);
  }
  out += "\nscores\t" + std::to_string(pred.scores.rows()) + "\t" +
         std::to_string(pred.scores.cols()) + "\n";
  for (std::size_t t = 0; t < pred.scores.rows(); ++t) {
    for (std::size_t k = 0; k < pred.scores.cols(); ++k) {
      if (k) out.push_back('\t');
      out += detail::format_double(pred.scores(t, k));
    }
    out.push_back('\n');
  }
  detail::spit(path, out);
}

inline PredictionFile read_prediction(const std::string& path) {
  auto lines = detail::split_lines(detail::slurp(path));
  if (lines.size() < 3) throw ParseError(path + ": truncated prediction", 0);
  PredictionFile pred;
  auto head = detail::split_tabs(lines[0].text);
  if (head.size() != 2 || head[0] != "task")
    throw ParseError(path + ": expected 'task<TAB>id'", lines[0].offset);
  pred.task_id = head[1];
  auto steps = detail::split_tabs(lines[1].text);
  if (steps.size() != 2 || steps[0] != "steps")
    throw ParseError(path + ": expected 'steps<TAB>...'", lines[1].offset);
  std::string current;
  for (char c : steps[1] + "|") {
    if (c == '|') {
      if (!current.empty())
        pred.step_segments.push_back(
            detail::parse_index(current, path, lines[1].offset));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  auto dims = detail::split_tabs(lines[2].text);
  if (dims.size() != 3 || dims[0] != "scores")
    throw ParseError(path + ": expected 'scores<TAB>T<TAB>K'",
                     lines[2].offset);
  std::size_t t_count = detail::parse_index(dims[1], path, lines[2].offset);
  std::size_t k_count = detail::parse_index(dims[2], path, lines[2].offset);
  if (lines.size() != 3 + t_count)
    throw ParseError(path + ": score row count mismatch", lines[2].offset);
  pred.scores = Matrix(t_count, k_count);
  for (std::size_t t = 0; t < t_count; ++t) {
    auto row = detail::split_tabs(lines[3 + t].text);
    if (row.size() != k_count)
      throw ParseError(path + ": score column count mismatch",
                       lines[3 + t].offset);
    for (std::size_t k = 0; k < k_count; ++k)
      pred.scores(t, k) =
          detail::parse_double(row[k], path, lines[3 + t].offset);
  }
  return pred;
}

// ------------------------------------------------------------------ report

/// Plot-ready `metric<TAB>task<TAB>value` rows.
struct ReportRow {
  std::string metric;
  std::string task;
  double value;
};

inline void write_report(const std::string& path,
                         const std::vector<ReportRow>& rows) {
  std::string out = "metric\ttask\tvalue\n";
  for (const auto& row : rows)
    out += row.metric + "\t" + row.task + "\t" +
           detail::format_double(row.value) + "\n";
  detail::spit(path, out);
}

}  // namespace ordsteps::io
