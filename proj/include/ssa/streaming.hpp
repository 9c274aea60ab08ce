// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Chunked multi-instance inference: one encoder cache and greedy decoder per
// activity stream, all sharing a single parameter set.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ssa/ctc.hpp"
#include "ssa/model.hpp"
#include "ssa/types.hpp"

namespace ssa {

struct ChunkConfig {
  std::size_t chunk_frames = 8;
  // Input frames of right context; must equal model lookahead * subsample.
  std::size_t lookahead_frames = 0;
  double frame_ms = 10.0;
  std::string preset_name;

  void validate() const;
};

double latency_ms(const ChunkConfig& cfg);

/// The five latency points 80, 160, 560, 1120 and 2720 ms at lookahead 0.
std::vector<ChunkConfig> latency_presets(double frame_ms = 10.0);
/// Looks up a preset by name ("560ms") or bare number ("560").
ChunkConfig find_preset(const std::string& name, double frame_ms = 10.0);

class Session {
 public:
  /// Throws ContractError if k < 1 and ConfigMismatchError if the chunk
  /// lookahead disagrees with the model. Holds a lease on `params`, which
  /// must outlive the session.
  Session(const ModelParams& params, std::size_t k, ChunkConfig cfg, bool keep_hidden = false);
  Session(Session&&) noexcept = default;
  Session& operator=(Session&&) noexcept = default;

  /// Feeds one chunk of features with one activity chunk per instance.
  /// Returns the tokens each instance emitted for this chunk. A chunk
  /// shorter than chunk_frames is accepted only as the last one.
  std::vector<TokenSeq> push_chunk(const FeatureSeq& chunk, const std::vector<ActivitySeq>& activities);

  /// Flushes held-back frames and closes every cache. Returns the tokens the
  /// flush emitted. Throws StateError when called twice.
  std::vector<TokenSeq> finalize();

  std::size_t k() const { return instances_.size(); }
  std::size_t chunks_pushed() const { return chunks_; }
  bool finalized() const { return finalized_; }
  const ChunkConfig& chunk_config() const { return cfg_; }
  std::vector<TokenSeq> hypotheses() const;
  /// Encoder states emitted so far for instance i (only with keep_hidden).
  Tensor hidden(std::size_t i) const;

  /// Bytes of parameter storage referenced by the session; counted once.
  std::size_t parameter_bytes() const;
  const ModelParams& params() const { return *params_; }

 private:
  struct Instance {
    EncoderCache cache;
    GreedyDecoder decoder;
    std::vector<Tensor> hidden;
  };
  std::vector<TokenSeq> run(const FeatureSeq& chunk, const std::vector<ActivitySeq>& activities, bool final);

  const ModelParams* params_;
  std::unique_ptr<ModelParams::Lease> lease_;
  ChunkConfig cfg_;
  bool keep_hidden_;
  std::vector<Instance> instances_;
  std::size_t chunks_ = 0;
  bool short_seen_ = false;
  bool finalized_ = false;
};

Session open_session(const ModelParams& params, std::size_t k, const ChunkConfig& cfg,
                     bool keep_hidden = false);

/// Offline per-speaker decode: one full-utterance encode per activity.
std::vector<TokenSeq> decode_offline(const ModelParams& params, const FeatureSeq& features,
                                     const std::vector<ActivitySeq>& activities);

/// Streams a whole utterance through a session chunk by chunk.
std::vector<TokenSeq> decode_streaming(const ModelParams& params, const FeatureSeq& features,
                                       const std::vector<ActivitySeq>& activities,
                                       const ChunkConfig& cfg);

}  // namespace ssa
