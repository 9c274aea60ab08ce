// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Plain value types shared by the simulator, the model and the CLI.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ssa/tensor.hpp"

namespace ssa {

/// T x D acoustic feature frames, row-major.
struct FeatureSeq {
  std::size_t dim = 0;
  std::vector<double> values;
  double frame_ms = 10.0;

  FeatureSeq() = default;
  FeatureSeq(std::size_t frames, std::size_t dim, double frame_ms = 10.0);
  FeatureSeq(std::size_t dim, std::vector<double> values, double frame_ms = 10.0);

  std::size_t frames() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> frame(std::size_t t) const {
    return std::span<const double>(values).subspan(t * dim, dim);
  }
  std::span<double> frame(std::size_t t) { return std::span<double>(values).subspan(t * dim, dim); }
  /// Frames [start, start+count) as a new sequence.
  FeatureSeq slice(std::size_t start, std::size_t count) const;
  Tensor to_tensor() const;
};

/// Per-frame speech activity of one speaker, every value in [0, 1].
class ActivitySeq {
 public:
  ActivitySeq() = default;
  /// Throws ContractError if any value lies outside [0, 1].
  explicit ActivitySeq(std::vector<double> values, double frame_ms = 10.0);

  static ActivitySeq zeros(std::size_t frames, double frame_ms = 10.0);
  static ActivitySeq ones(std::size_t frames, double frame_ms = 10.0);

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t t) const { return values_[t]; }
  std::span<const double> values() const { return values_; }
  double frame_ms() const { return frame_ms_; }
  ActivitySeq slice(std::size_t start, std::size_t count) const;

  bool operator==(const ActivitySeq&) const = default;

 private:
  std::vector<double> values_;
  double frame_ms_ = 10.0;
};

/// Token ids in [0, V). The blank symbol (id V) never appears here.
struct TokenSeq {
  std::vector<int> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSeq&) const = default;
};

/// Fixed toy vocabulary: id -> pronounceable syllable ("ba", "be", ...).
std::string token_word(int id);
/// Inverse of token_word; returns -1 for unknown words.
int word_token(const std::string& word);
std::vector<std::string> render_words(const TokenSeq& seq);

/// A labelled speech interval in seconds.
struct Segment {
  std::string speaker;
  double onset = 0.0;
  double offset = 0.0;
  bool operator==(const Segment&) const = default;
};
using SegmentSet = std::vector<Segment>;

/// Maximal runs of frames with activity >= threshold, as segments.
SegmentSet activity_segments(const ActivitySeq& y, const std::string& speaker,
                             double threshold = 0.5);

}  // namespace ssa
