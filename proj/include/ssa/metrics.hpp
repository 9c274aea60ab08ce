// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Word error counting, concatenated minimum-permutation WER and
// diarization error rate.

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ssa/types.hpp"

namespace ssa {

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  /// errors / ref_words; throws UndefinedRateError when ref_words == 0.
  double rate() const;
  ErrorCounts& operator+=(const ErrorCounts& o);
  bool operator==(const ErrorCounts&) const = default;
};

using Words = std::vector<std::string>;

/// Lowercases ASCII letters and removes ASCII punctuation; splits on
/// whitespace and drops words that end up empty.
Words normalize_text(const std::string& text);
std::string normalize_word(const std::string& word);

/// Unit-cost Levenshtein decomposition. Among minimum-cost alignments the one
/// with the most substitutions (fewest deletion/insertion pairs) is reported.
ErrorCounts edit_ops(const Words& ref, const Words& hyp);
ErrorCounts edit_ops(const TokenSeq& ref, const TokenSeq& hyp);

/// Square assignment minimising total cost (Hungarian method with
/// potentials, O(n^3)). Returns column index per row.
std::vector<std::size_t> hungarian_assignment(const std::vector<std::vector<double>>& cost);

/// Same optimum by enumerating every permutation; for n <= 8.
std::vector<std::size_t> exhaustive_assignment(const std::vector<std::vector<double>>& cost);

struct SpeakerWords {
  std::string speaker;
  Words words;
};

struct CpwerResult {
  double rate = 0.0;
  ErrorCounts counts;
  // Pairs of (reference index, hypothesis index); -1 marks a padded side.
  std::vector<std::pair<long, long>> assignment;
};

/// Pads the shorter side with empty streams, scores every pair with
/// edit_ops and picks the assignment with the fewest total errors.
/// Throws UndefinedRateError if the references hold no words.
CpwerResult cpwer(const std::vector<SpeakerWords>& refs, const std::vector<Words>& hyps);
CpwerResult cpwer(const std::vector<TokenSeq>& refs, const std::vector<TokenSeq>& hyps);

struct DerResult {
  double rate = 0.0;
  double miss = 0.0;         // seconds
  double false_alarm = 0.0;  // seconds
  double confusion = 0.0;    // seconds
  double scored_ref = 0.0;   // seconds of scored reference speech
  std::vector<std::pair<std::string, std::string>> mapping;  // reference -> hypothesis
};

/// Time-weighted DER over elementary intervals. Segments of one speaker are
/// merged first. Reference boundaries get +-collar exclusion zones; with
/// ignore_edges, time before the first and after the last reference speech is
/// excluded. Overlapped speech is scored. Throws UndefinedRateError if no
/// reference time remains, ContractError on malformed segments.
DerResult der(const SegmentSet& ref, const SegmentSet& hyp, double collar, bool ignore_edges);

}  // namespace ssa
