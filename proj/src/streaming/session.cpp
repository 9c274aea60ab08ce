// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/streaming.hpp"

#include <cmath>

#include "ssa/errors.hpp"
#include "ssa/ops.hpp"

namespace ssa {

void ChunkConfig::validate() const {
  if (chunk_frames < 1) throw ContractError("chunk config: chunk_frames must be >= 1");
  if (!(frame_ms > 0.0)) throw ContractError("chunk config: frame_ms must be positive");
}

double latency_ms(const ChunkConfig& cfg) {
  return static_cast<double>(cfg.chunk_frames + cfg.lookahead_frames) * cfg.frame_ms;
}

std::vector<ChunkConfig> latency_presets(double frame_ms) {
  std::vector<ChunkConfig> out;
  for (int ms : {80, 160, 560, 1120, 2720}) {
    ChunkConfig c;
    c.chunk_frames = static_cast<std::size_t>(std::lround(ms / frame_ms));
    c.frame_ms = frame_ms;
    c.preset_name = std::to_string(ms) + "ms";
    out.push_back(c);
  }
  return out;
}

ChunkConfig find_preset(const std::string& name, double frame_ms) {
  for (const auto& p : latency_presets(frame_ms)) {
    if (p.preset_name == name || p.preset_name == name + "ms") return p;
  }
  throw ContractError("unknown latency preset '" + name + "'");
}

Session::Session(const ModelParams& params, std::size_t k, ChunkConfig cfg, bool keep_hidden)
    : params_(&params), cfg_(std::move(cfg)), keep_hidden_(keep_hidden) {
  if (k < 1) throw ContractError("open_session: need at least one instance, got " + std::to_string(k));
  cfg_.validate();
  const ModelConfig& mc = params.config();
  if (cfg_.lookahead_frames != mc.lookahead * mc.subsample) {
    throw ConfigMismatchError("open_session: chunk lookahead of " + std::to_string(cfg_.lookahead_frames) +
                              " frames does not match the model's " +
                              std::to_string(mc.lookahead * mc.subsample));
  }
  lease_ = params.lease();
  for (std::size_t i = 0; i < k; ++i) {
    instances_.push_back(Instance{EncoderCache(mc), GreedyDecoder(mc.blank()), {}});
  }
}

std::vector<TokenSeq> Session::run(const FeatureSeq& chunk, const std::vector<ActivitySeq>& activities,
                                   bool final) {
  std::vector<TokenSeq> out;
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    Instance& inst = instances_[i];
    const Tensor h = encode_chunk(*params_, chunk, activities[i], inst.cache, final);
    if (h.rows() == 0) {
      out.emplace_back();
      continue;
    }
    if (keep_hidden_) inst.hidden.push_back(h);
    out.push_back(inst.decoder.push(logits(*params_, h)));
  }
  return out;
}

std::vector<TokenSeq> Session::push_chunk(const FeatureSeq& chunk, const std::vector<ActivitySeq>& activities) {
  if (finalized_) throw StateError("push_chunk: session already finalised");
  if (activities.size() != instances_.size()) {
    throw ContractError("push_chunk: got " + std::to_string(activities.size()) + " activity streams for " +
                        std::to_string(instances_.size()) + " instances");
  }
  if (chunk.frames() > cfg_.chunk_frames) {
    throw ContractError("push_chunk: chunk of " + std::to_string(chunk.frames()) + " frames exceeds " +
                        std::to_string(cfg_.chunk_frames));
  }
  if (short_seen_) throw StateError("push_chunk: a short chunk must be the last one");
  if (chunk.frames() < cfg_.chunk_frames) short_seen_ = true;
  for (const auto& a : activities) {
    if (a.size() != chunk.frames()) {
      throw ContractError("push_chunk: activity chunk of " + std::to_string(a.size()) +
                          " frames for a feature chunk of " + std::to_string(chunk.frames()));
    }
  }
  ++chunks_;
  return run(chunk, activities, false);
}

std::vector<TokenSeq> Session::finalize() {
  if (finalized_) throw StateError("finalize: session already finalised");
  const FeatureSeq none(0, params_->config().d_in);
  auto emitted = run(none, std::vector<ActivitySeq>(instances_.size()), true);
  finalized_ = true;
  lease_.reset();
  return emitted;
}

std::vector<TokenSeq> Session::hypotheses() const {
  std::vector<TokenSeq> out;
  for (const auto& inst : instances_) out.push_back(inst.decoder.hypothesis());
  return out;
}

Tensor Session::hidden(std::size_t i) const {
  if (!keep_hidden_) throw StateError("session was opened without keep_hidden");
  const auto& parts = instances_.at(i).hidden;
  if (parts.empty()) return Tensor({0, params_->config().d_model}, {});
  return ops::concat_rows(parts);
}

std::size_t Session::parameter_bytes() const {
  // Instances reference the one parameter map; nothing is copied per instance.
  std::size_t bytes = 0;
  for (const auto& [name, t] : params_->tensors()) bytes += t.numel() * sizeof(double);
  return bytes;
}

Session open_session(const ModelParams& params, std::size_t k, const ChunkConfig& cfg, bool keep_hidden) {
  return Session(params, k, cfg, keep_hidden);
}

std::vector<TokenSeq> decode_offline(const ModelParams& params, const FeatureSeq& features,
                                     const std::vector<ActivitySeq>& activities) {
  std::vector<TokenSeq> out;
  for (const auto& y : activities) out.push_back(greedy_decode(logits(params, encode(params, features, y))));
  return out;
}

std::vector<TokenSeq> decode_streaming(const ModelParams& params, const FeatureSeq& features,
                                       const std::vector<ActivitySeq>& activities,
                                       const ChunkConfig& cfg) {
  Session session(params, activities.size(), cfg);
  for (std::size_t pos = 0; pos < features.frames(); pos += cfg.chunk_frames) {
    const std::size_t n = std::min(cfg.chunk_frames, features.frames() - pos);
    std::vector<ActivitySeq> acts;
    for (const auto& y : activities) acts.push_back(y.slice(pos, n));
    session.push_chunk(features.slice(pos, n), acts);
  }
  session.finalize();
  return session.hypotheses();
}

}  // namespace ssa
