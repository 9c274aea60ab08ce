// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Toy self-speaker-adaptation encoder.
//
//   features --pre_encode--> x --inject(x, y)--> blocks --> final norm --> hidden
//                                                                  |
//                                                        logits: linear + log-softmax
//
// The speaker injection adds f_ff(x * y) to x, where y is one speaker's frame
// activity broadcast across the model dimension. It sits after pre-encode by
// default, or after any encoder block. Each block is
// attention (left context + optional lookahead) -> causal depthwise conv ->
// feedforward, all pre-norm with residuals. Lookahead only applies to the
// first block, so the whole stack sees at most `lookahead` future frames.

#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssa/tensor.hpp"
#include "ssa/types.hpp"

namespace ssa {

enum class Activation { kRelu, kSwish };
enum class BiasPolicy { kNone, kFree };

std::string to_string(Activation a);
std::string to_string(BiasPolicy b);

struct ModelConfig {
  std::size_t d_in = 16;
  std::size_t d_model = 64;
  std::size_t n_blocks = 4;
  std::size_t n_heads = 4;
  std::size_t conv_kernel = 5;
  std::size_t subsample = 4;      // input frames per encoder frame
  std::size_t left_context = 64;  // encoder frames of attention history
  std::size_t lookahead = 0;      // encoder frames of future context
  std::size_t d_hidden_inj = 128;
  std::size_t d_ff = 128;
  std::size_t vocab_size = 32;     // blank id == vocab_size
  std::size_t injection_site = 0;  // 0: after pre-encode, i: after block i
  Activation inj_activation = Activation::kRelu;
  BiasPolicy inj_bias = BiasPolicy::kNone;

  /// Throws ContractError on violated invariants.
  void validate() const;
  std::size_t blank() const { return vocab_size; }
  bool operator==(const ModelConfig&) const = default;
};

/// f_ff of the injection module: two linear maps with an activation between.
struct InjectionParams {
  Tensor w1;  // D x H
  Tensor w2;  // H x D
  Tensor b1;  // H, only with BiasPolicy::kFree
  Tensor b2;  // D, only with BiasPolicy::kFree
  Activation activation = Activation::kRelu;
  BiasPolicy bias = BiasPolicy::kNone;
};

/// Every trainable array, keyed by a stable dotted name, plus the config that
/// shaped them. Arrays are immutable tensors; updating a parameter replaces
/// its tensor, which is refused while a streaming session holds the set.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(ModelConfig config);
  // Copies share the (immutable) arrays but not the session guard.
  ModelParams(const ModelParams& other);
  ModelParams& operator=(const ModelParams& other);

  /// Seeded initialisation; identical seeds give identical parameters.
  static ModelParams init(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const { return tensors_.count(name) != 0; }
  /// Throws StateError while any session is open on this parameter set.
  void set(const std::string& name, Tensor value);
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }
  std::size_t parameter_count() const;

  /// Copies with requires_grad set on every array (for training tapes).
  ModelParams trainable() const;
  /// Copies with gradient tracking removed.
  ModelParams frozen() const;

  InjectionParams injection() const;

  /// Lifetime guard held by streaming sessions.
  class Lease {
   public:
    explicit Lease(std::shared_ptr<std::atomic<int>> counter);
    ~Lease();
    Lease(const Lease&) = delete;
    Lease& operator=(const Lease&) = delete;

   private:
    std::shared_ptr<std::atomic<int>> counter_;
  };
  std::unique_ptr<Lease> lease() const;
  int open_leases() const { return *leases_; }

 private:
  ModelConfig config_;
  std::map<std::string, Tensor> tensors_;
  std::shared_ptr<std::atomic<int>> leases_ = std::make_shared<std::atomic<int>>(0);
};

/// Streaming state for one instance: buffered input not yet forming a full
/// subsampling window, per-block attention keys/values and conv history, and
/// frames held back for lookahead.
class EncoderCache {
 public:
  explicit EncoderCache(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  /// Encoder frames emitted so far.
  std::size_t frames_out() const { return frames_out_; }
  bool finished() const { return finished_; }

  struct Block {
    Tensor keys;    // rows for positions [kv_start, kv_start + rows)
    Tensor values;
    std::size_t kv_start = 0;
    Tensor conv_history;  // conv_kernel - 1 rows of normalised input
    Tensor pending;       // residual rows waiting for lookahead
    std::size_t next_query = 0;
  };

 private:
  friend Tensor encode_chunk(const ModelParams&, const FeatureSeq&, const ActivitySeq&,
                             EncoderCache&, bool);
  ModelConfig config_;
  std::vector<double> raw_frames_;    // < subsample buffered input frames
  std::vector<double> raw_activity_;
  std::vector<double> site_activity_;  // encoder-rate activity not yet consumed
  std::size_t site_position_ = 0;      // position of site_activity_[0]
  std::size_t pre_frames_ = 0;         // encoder frames produced by pre-encode
  std::vector<Block> blocks_;
  std::size_t frames_out_ = 0;
  bool finished_ = false;
};

/// Subsampling front end: [T, d_in] -> [floor(T/S), d_model]. Encoder frame t
/// depends only on input frames < (t+1)*S. Throws ContractError if T < S.
Tensor pre_encode(const ModelParams& params, const Tensor& features);

/// Mean-pools activity over non-overlapping windows of `factor` frames.
ActivitySeq downsample_activity(const ActivitySeq& y, std::size_t factor);

/// x + f_ff(x * y). `y` is [T, 1] at the encoder frame rate.
Tensor inject(const Tensor& x, const Tensor& y, const InjectionParams& p);

/// Offline encode of a whole utterance; `activity` is at the input rate.
Tensor encode(const ModelParams& params, const FeatureSeq& features, const ActivitySeq& activity);

/// Consumes one chunk and returns the encoder frames that became final. With
/// `final` set, buffered lookahead frames are flushed and the cache closes.
/// Throws ConfigMismatchError if the cache was built for another config.
Tensor encode_chunk(const ModelParams& params, const FeatureSeq& chunk,
                    const ActivitySeq& activity, EncoderCache& cache, bool final);

/// Per-frame log-probabilities over vocab_size + 1 symbols (blank last).
Tensor logits(const ModelParams& params, const Tensor& hidden);

}  // namespace ssa
