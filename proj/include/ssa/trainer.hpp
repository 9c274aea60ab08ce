// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Target-speaker training: each example supervises one randomly chosen
// speaker of a simulated mixture with that speaker's activity and transcript.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ssa/mixsim.hpp"
#include "ssa/model.hpp"

namespace ssa {

struct TrainConfig {
  std::size_t steps = 6000;
  std::size_t batch_size = 8;
  MixRatios ratios{1.0, 3.0, 6.0};
  double lr_coeff = 5.0;
  std::size_t warmup_steps = 1000;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient norm; 0 disables clipping
  std::uint64_t seed = 1;
  std::size_t val_every = 500;
  std::size_t ckpt_every = 500;
  std::size_t log_every = 50;
  std::size_t top_k = 5;
  // Activity degradation applied to training targets; 0 uses ground truth.
  double train_severity = 0.0;
  // Held-out validation set: fully overlapped 2-mixes and single speakers.
  std::uint64_t val_seed = 99;
  std::size_t val_2mix = 100;
  std::size_t val_1mix = 50;
  SimConfig sim;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// coeff * d_model^-0.5 * min(step^-0.5, step * warmup^-1.5). Throws
/// ContractError for step 0.
double noam_lr(std::size_t step, std::size_t d_model, std::size_t warmup, double coeff);

using GradMap = std::map<std::string, std::vector<double>>;

struct OptimizerState {
  GradMap m;
  GradMap v;
  std::size_t step = 0;
};

struct AdamWOptions {
  double lr = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected Adam with decoupled weight decay:
/// theta -= lr * (wd * theta + m_hat / (sqrt(v_hat) + eps)).
/// Parameters without an entry in `grads` see a zero gradient. Throws
/// ContractError when a gradient's size differs from its parameter.
void adamw_step(ModelParams& params, const GradMap& grads, OptimizerState& state, const AdamWOptions& opt);

/// Uniform speaker index in [0, k).
std::size_t sample_target(std::mt19937_64& rng, const MixtureSample& sample);

/// One example of supervision; the activity and transcript always come from
/// the same speaker slot.
struct TrainingExample {
  FeatureSeq features;
  ActivitySeq activity;
  TokenSeq target;
  std::size_t k = 0;
  std::size_t slot = 0;
};
TrainingExample make_example(std::mt19937_64& rng, const MixtureSample& sample, double severity);

struct Checkpoint {
  std::size_t step = 0;
  double val_cpwer = 0.0;  // 2-mix, used for selection
  double val_wer_1mix = 0.0;
  ModelParams params;
};

/// Keeps the min(top_k, n) checkpoints with the lowest val_cpwer (ties go to
/// the later step) and averages them parameter-wise. Throws ContractError on
/// an empty list or mismatched parameter sets.
ModelParams average_checkpoints(const std::vector<Checkpoint>& checkpoints, std::size_t top_k = 5);
std::vector<std::size_t> select_checkpoints(const std::vector<Checkpoint>& checkpoints, std::size_t top_k = 5);

struct ValidationSet {
  std::vector<MixtureSample> two_mix;
  std::vector<MixtureSample> one_mix;
};
ValidationSet make_validation_set(const TrainConfig& cfg);

struct ValidationResult {
  double cpwer_2mix = 0.0;
  double wer_1mix = 0.0;
};
ValidationResult validate_model(const ModelParams& params, const ValidationSet& set);

struct TrainResult {
  std::vector<Checkpoint> checkpoints;
  ModelParams averaged;
  std::vector<double> losses;  // mean batch loss per step
  std::size_t k_counts[3] = {0, 0, 0};
};

/// Runs the full recipe. Writes JSON lines to `log` when given. Throws
/// NumericError naming the step, learning rate and gradient norm when the
/// loss or gradients stop being finite.
TrainResult train(const TrainConfig& cfg, const ModelParams& init, std::ostream* log = nullptr);

}  // namespace ssa
