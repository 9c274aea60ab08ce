// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/types.hpp"

#include <array>
#include <string_view>

#include "ssa/errors.hpp"

namespace ssa {

FeatureSeq::FeatureSeq(std::size_t frames, std::size_t d, double ms)
    : dim(d), values(frames * d, 0.0), frame_ms(ms) {}

FeatureSeq::FeatureSeq(std::size_t d, std::vector<double> v, double ms)
    : dim(d), values(std::move(v)), frame_ms(ms) {
  if (dim == 0 || values.size() % dim != 0) {
    throw DimensionError("feature data of length " + std::to_string(values.size()) +
                         " is not a whole number of " + std::to_string(dim) + "-dim frames");
  }
}

FeatureSeq FeatureSeq::slice(std::size_t start, std::size_t count) const {
  if (start + count > frames()) {
    throw ContractError("feature slice past end of sequence");
  }
  FeatureSeq out(count, dim, frame_ms);
  std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(start * dim), count * dim,
              out.values.begin());
  return out;
}

Tensor FeatureSeq::to_tensor() const { return Tensor({frames(), dim}, values); }

ActivitySeq::ActivitySeq(std::vector<double> values, double frame_ms)
    : values_(std::move(values)), frame_ms_(frame_ms) {
  for (std::size_t t = 0; t < values_.size(); ++t) {
    const double v = values_[t];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ContractError("activity value " + std::to_string(v) + " at frame " +
                          std::to_string(t) + " outside [0, 1]");
    }
  }
}

ActivitySeq ActivitySeq::zeros(std::size_t frames, double frame_ms) {
  return ActivitySeq(std::vector<double>(frames, 0.0), frame_ms);
}

ActivitySeq ActivitySeq::ones(std::size_t frames, double frame_ms) {
  return ActivitySeq(std::vector<double>(frames, 1.0), frame_ms);
}

ActivitySeq ActivitySeq::slice(std::size_t start, std::size_t count) const {
  if (start + count > values_.size()) throw ContractError("activity slice past end");
  return ActivitySeq(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(start),
                                         values_.begin() +
                                             static_cast<std::ptrdiff_t>(start + count)),
                     frame_ms_);
}

namespace {
constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr int kSyllables = 14 * 5;
}  // namespace

std::string token_word(int id) {
  if (id < 0) throw ContractError("negative token id");
  if (id < kSyllables) {
    return {kConsonants[static_cast<std::size_t>(id / 5)], kVowels[static_cast<std::size_t>(id % 5)]};
  }
  return "w" + std::to_string(id);
}

int word_token(const std::string& word) {
  if (word.size() == 2) {
    const auto c = kConsonants.find(word[0]);
    const auto v = kVowels.find(word[1]);
    if (c != std::string_view::npos && v != std::string_view::npos) {
      return static_cast<int>(c * 5 + v);
    }
  }
  if (word.size() > 1 && word[0] == 'w') {
    try {
      std::size_t used = 0;
      const int id = std::stoi(word.substr(1), &used);
      if (used == word.size() - 1 && id >= kSyllables) return id;
    } catch (const std::exception&) {
    }
  }
  return -1;
}

std::vector<std::string> render_words(const TokenSeq& seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (int t : seq.tokens) out.push_back(token_word(t));
  return out;
}

SegmentSet activity_segments(const ActivitySeq& y, const std::string& speaker, double threshold) {
  SegmentSet out;
  const double sec = y.frame_ms() / 1000.0;
  std::size_t t = 0;
  while (t < y.size()) {
    if (y[t] < threshold) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    while (t < y.size() && y[t] >= threshold) ++t;
    out.push_back({speaker, static_cast<double>(start) * sec, static_cast<double>(t) * sec});
  }
  return out;
}

}  // namespace ssa
