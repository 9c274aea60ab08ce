// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy multi-talker data. Each speaker renders tokens from a fixed template
// bank placed in its own channel band, colours them with an offset vector and
// pauses a random number of frames between tokens. Mixtures are frame-wise
// sums of delayed sources.

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ssa/types.hpp"

namespace ssa {

struct SimConfig {
  std::size_t d_in = 16;
  std::size_t vocab_size = 32;
  std::size_t frames_per_token = 8;
  // Speakers are spread round-robin over d_in / n_bands channel bands. With
  // n_bands = 1 all speakers share one template bank.
  std::size_t n_bands = 4;
  std::size_t pool_size = 4;
  double offset_scale = 0.5;
  double offset_margin = 0.25;
  double noise_scale = 0.1;
  std::size_t max_gap = 8;  // silent frames between tokens, uniform in [0, max_gap]
  std::size_t min_tokens = 5;
  std::size_t max_tokens = 15;
  // Later speakers start uniformly in [0, fraction * first utterance length].
  double max_delay_fraction = 0.5;
  std::uint64_t world_seed = 1;  // templates and offsets

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct ToySpeaker {
  int speaker_id = 0;
  std::vector<double> offset;     // d_in
  std::vector<double> templates;  // vocab x frames_per_token x d_in
  std::size_t d_in = 0;
  std::size_t frames_per_token = 0;
  double noise_scale = 0.0;
  std::size_t max_gap = 0;

  std::span<const double> token_frame(int token, std::size_t f) const;
  std::size_t vocab_size() const { return templates.size() / (frames_per_token * d_in); }
};

/// Builds the speaker pool from `config.world_seed`. Offsets are redrawn until
/// every pair is more than offset_margin apart.
std::vector<ToySpeaker> make_speaker_pool(const SimConfig& config);

struct Utterance {
  FeatureSeq features;
  ActivitySeq activity;
  TokenSeq tokens;
  int speaker_id = -1;
  std::uint64_t seed = 0;
};

/// Deterministic in (speaker, tokens, seed). Throws ContractError on empty tokens.
Utterance synth_utterance(const ToySpeaker& speaker, const TokenSeq& tokens, std::uint64_t seed);

struct MixtureSample {
  FeatureSeq features;
  std::vector<ActivitySeq> activities;
  std::vector<TokenSeq> references;
  std::vector<std::size_t> delays;
  std::vector<int> speaker_ids;
  std::vector<std::uint64_t> seeds;

  std::size_t k() const { return references.size(); }
};

/// Sums delay-shifted, zero-padded sources. Throws ContractError unless
/// 1 <= k <= 3 and there is one delay per source.
MixtureSample mix(const std::vector<Utterance>& sources, const std::vector<std::size_t>& delays);

using MixRatios = std::array<double, 3>;

/// Draws k by `ratios`, k distinct speakers, token strings, delays and
/// utterance seeds, all from `rng`.
MixtureSample sample_mixture(std::mt19937_64& rng, const MixRatios& ratios,
                             const std::vector<ToySpeaker>& pool, const SimConfig& config);

/// Emulated diarization error: boundary jitter of up to 8*severity frames,
/// erosion of round(3*severity) frames at each segment end, then independent
/// flips with probability severity/2. Severity 0 is the identity.
ActivitySeq degrade_activity(const ActivitySeq& y, double severity, std::uint64_t seed);

}  // namespace ssa
