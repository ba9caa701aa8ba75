// ordsteps/stem.hpp

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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ordsteps {

// Porter suffix-stripping stemmer, original 1980 rule tables. Conditions are
// evaluated on the stem that remains after removing the candidate suffix;
// within a rule set the longest matching suffix decides and no fallthrough
// happens if its condition fails.
namespace porter_detail {

inline bool is_consonant(const std::string& w, std::size_t i) {
  char c = w[i];
  if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
  if (c == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
  return true;
}

/// m in the [C](VC)^m[V] decomposition of `w`'s first `len` letters.
inline int measure(const std::string& w, std::size_t len) {
  int m = 0;
  std::size_t i = 0;
  while (i < len && is_consonant(w, i)) ++i;
  for (;;) {
    while (i < len && !is_consonant(w, i)) ++i;
    if (i >= len) return m;
    while (i < len && is_consonant(w, i)) ++i;
    ++m;
    if (i >= len) return m;
  }
}

inline bool contains_vowel(const std::string& w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i)
    if (!is_consonant(w, i)) return true;
  return false;
}

inline bool ends_double_consonant(const std::string& w) {
  std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1);
}

/// *o: ends consonant-vowel-consonant where the final consonant is not w/x/y.
inline bool ends_cvc(const std::string& w, std::size_t len) {
  if (len < 3) return false;
  if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) ||
      !is_consonant(w, len - 1))
    return false;
  char c = w[len - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  int min_measure;  // condition: m(stem) > min_measure; -1 = unconditional
};

/// Longest matching suffix wins; returns true when a replacement happened.
inline bool apply_rules(std::string& w, const Rule* rules, std::size_t n) {
  const Rule* best = nullptr;
  for (std::size_t i = 0; i < n; ++i) {
    const Rule& r = rules[i];
    if (w.size() >= r.suffix.size() &&
        w.compare(w.size() - r.suffix.size(), r.suffix.size(), r.suffix) == 0)
      if (!best || r.suffix.size() > best->suffix.size()) best = &r;
  }
  if (!best) return false;
  std::size_t stem_len = w.size() - best->suffix.size();
  if (best->min_measure >= 0 && measure(w, stem_len) <= best->min_measure)
    return false;
  w.resize(stem_len);
  w.append(best->replacement);
  return true;
}

inline void step1a(std::string& w) {
  static const Rule rules[] = {
      {"sses", "ss", -1}, {"ies", "i", -1}, {"ss", "ss", -1}, {"s", "", -1}};
  apply_rules(w, rules, 4);
}

inline void step1b(std::string& w) {
  if (w.size() >= 3 && w.compare(w.size() - 3, 3, "eed") == 0) {
    if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);  // eed -> ee
    return;
  }
  bool stripped = false;
  if (w.size() >= 2 && w.compare(w.size() - 2, 2, "ed") == 0 &&
      contains_vowel(w, w.size() - 2)) {
    w.resize(w.size() - 2);
    stripped = true;
  } else if (w.size() >= 3 && w.compare(w.size() - 3, 3, "ing") == 0 &&
             contains_vowel(w, w.size() - 3)) {
    w.resize(w.size() - 3);
    stripped = true;
  }
  if (!stripped) return;
  auto ends = [&](std::string_view s) {
    return w.size() >= s.size() &&
           w.compare(w.size() - s.size(), s.size(), s) == 0;
  };
  if (ends("at") || ends("bl") || ends("iz")) {
    w.push_back('e');
  } else if (ends_double_consonant(w)) {
    char c = w.back();
    if (c != 'l' && c != 's' && c != 'z') w.pop_back();
  } else if (measure(w, w.size()) == 1 && ends_cvc(w, w.size())) {
    w.push_back('e');
  }
}

inline void step1c(std::string& w) {
  if (!w.empty() && w.back() == 'y' && contains_vowel(w, w.size() - 1))
    w.back() = 'i';
}

inline void step2(std::string& w) {
  static const Rule rules[] = {
      {"ational", "ate", 0}, {"tional", "tion", 0}, {"enci", "ence", 0},
      {"anci", "ance", 0},   {"izer", "ize", 0},    {"abli", "able", 0},
      {"alli", "al", 0},     {"entli", "ent", 0},   {"eli", "e", 0},
      {"ousli", "ous", 0},   {"ization", "ize", 0}, {"ation", "ate", 0},
      {"ator", "ate", 0},    {"alism", "al", 0},    {"iveness", "ive", 0},
      {"fulness", "ful", 0}, {"ousness", "ous", 0}, {"aliti", "al", 0},
      {"iviti", "ive", 0},   {"biliti", "ble", 0}};
  apply_rules(w, rules, sizeof(rules) / sizeof(rules[0]));
}

inline void step3(std::string& w) {
  static const Rule rules[] = {{"icate", "ic", 0}, {"ative", "", 0},
                               {"alize", "al", 0}, {"iciti", "ic", 0},
                               {"ical", "ic", 0},  {"ful", "", 0},
                               {"ness", "", 0}};
  apply_rules(w, rules, sizeof(rules) / sizeof(rules[0]));
}

inline void step4(std::string& w) {
  // ION carries the extra *S-or-*T condition, handled after the match.
  static const Rule rules[] = {
      {"al", "", 1},    {"ance", "", 1}, {"ence", "", 1}, {"er", "", 1},
      {"ic", "", 1},    {"able", "", 1}, {"ible", "", 1}, {"ant", "", 1},
      {"ement", "", 1}, {"ment", "", 1}, {"ent", "", 1},  {"ou", "", 1},
      {"ism", "", 1},   {"ate", "", 1},  {"iti", "", 1},  {"ous", "", 1},
      {"ive", "", 1},   {"ize", "", 1}};
  // Longest-match across the whole set including ION.
  std::size_t best_len = 0;
  bool best_is_ion = false;
  const Rule* best = nullptr;
  if (w.size() >= 3 && w.compare(w.size() - 3, 3, "ion") == 0) {
    best_len = 3;
    best_is_ion = true;
  }
  for (const Rule& r : rules) {
    if (w.size() >= r.suffix.size() &&
        w.compare(w.size() - r.suffix.size(), r.suffix.size(), r.suffix) ==
            0 &&
        r.suffix.size() > best_len) {
      best_len = r.suffix.size();
      best_is_ion = false;
      best = &r;
    }
  }
  if (best_len == 0) return;
  std::size_t stem_len = w.size() - best_len;
  if (measure(w, stem_len) <= 1) return;
  if (best_is_ion) {
    if (stem_len == 0 || (w[stem_len - 1] != 's' && w[stem_len - 1] != 't'))
      return;
  }
  (void)best;
  w.resize(stem_len);
}

inline void step5a(std::string& w) {
  if (w.empty() || w.back() != 'e') return;
  std::size_t stem_len = w.size() - 1;
  int m = measure(w, stem_len);
  if (m > 1 || (m == 1 && !ends_cvc(w, stem_len))) w.pop_back();
}

inline void step5b(std::string& w) {
  if (measure(w, w.size()) > 1 && ends_double_consonant(w) && w.back() == 'l')
    w.pop_back();
}

/// One pass over the rule tables; words of length <= 2 are left alone.
inline std::string single_pass(std::string w) {
  if (w.size() <= 2) return w;
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

}  // namespace porter_detail

/// Deterministic lowercase stem of a letters-only token. One rule pass is not
/// idempotent for a handful of words (coffee -> coffe -> coff), so the pass
/// iterates to its fixed point; vocabulary identity then survives re-stemming.
inline std::string stem(const std::string& word) {
  if (word.empty()) throw std::invalid_argument("stem: empty token");
  std::string w;
  w.reserve(word.size());
  for (char c : word) {
    if (!std::isalpha(static_cast<unsigned char>(c)))
      throw std::invalid_argument("stem: token '" + word +
                                  "' contains a non-letter");
    w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (int pass = 0; pass < 10; ++pass) {
    std::string next = porter_detail::single_pass(w);
    if (next == w) break;
    w = std::move(next);
  }
  return w;
}

/// Lowercases and splits on non-letter characters, dropping empty pieces.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

/// tokenize + stem in one go.
inline std::vector<std::string> stem_tokens(const std::string& text) {
  std::vector<std::string> stems;
  for (const auto& tok : tokenize(text)) stems.push_back(stem(tok));
  return stems;
}

}  // namespace ordsteps
