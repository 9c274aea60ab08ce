// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "ssa/ctc.hpp"
#include "ssa/errors.hpp"
#include "ssa/metrics.hpp"
#include "ssa/ops.hpp"
#include "ssa/streaming.hpp"

namespace ssa {

void TrainConfig::validate() const {
  auto fail = [](const std::string& w) { throw ContractError("train config: " + w); };
  if (steps == 0) fail("steps must be > 0");
  if (warmup_steps == 0) fail("warmup_steps must be > 0");
  if (batch_size == 0) fail("batch_size must be > 0");
  if (top_k == 0) fail("top_k must be > 0");
  if (val_every == 0 || ckpt_every == 0 || log_every == 0) fail("cadences must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) fail("betas must lie in [0, 1)");
  if (!(eps > 0.0) || !(lr_coeff > 0.0) || !(weight_decay >= 0.0) || !(clip_norm >= 0.0)) {
    fail("eps and lr_coeff must be positive, weight_decay and clip_norm non-negative");
  }
  if (!(train_severity >= 0.0 && train_severity <= 1.0)) fail("train_severity must lie in [0, 1]");
  sim.validate();
}

double noam_lr(std::size_t step, std::size_t d_model, std::size_t warmup, double coeff) {
  if (step == 0) throw ContractError("noam_lr: steps are counted from 1");
  if (warmup == 0 || d_model == 0) throw ContractError("noam_lr: warmup and d_model must be positive");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return coeff / std::sqrt(static_cast<double>(d_model)) * std::min(1.0 / std::sqrt(s), s * std::pow(w, -1.5));
}

void adamw_step(ModelParams& params, const GradMap& grads, OptimizerState& state, const AdamWOptions& opt) {
  for (const auto& [name, g] : grads) {
    if (!params.has(name)) throw ContractError("adamw: gradient for unknown parameter '" + name + "'");
    if (g.size() != params.get(name).numel()) {
      throw ContractError("adamw: gradient for '" + name + "' has " + std::to_string(g.size()) +
                          " entries, parameter has " + std::to_string(params.get(name).numel()));
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (const auto& [name, tensor] : params.tensors()) {
    const std::size_t n = tensor.numel();
    auto& m = state.m[name];
    auto& v = state.v[name];
    if (m.empty()) m.assign(n, 0.0), v.assign(n, 0.0);
    if (m.size() != n || v.size() != n) {
      throw ContractError("adamw: optimizer state for '" + name + "' does not match the parameter shape");
    }
    const auto git = grads.find(name);
    const std::vector<double>* g = git == grads.end() ? nullptr : &git->second;
    std::vector<double> theta(tensor.data().begin(), tensor.data().end());
    for (std::size_t i = 0; i < n; ++i) {
      const double gi = g ? (*g)[i] : 0.0;
      m[i] = opt.beta1 * m[i] + (1.0 - opt.beta1) * gi;
      v[i] = opt.beta2 * v[i] + (1.0 - opt.beta2) * gi * gi;
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      theta[i] -= opt.lr * (opt.weight_decay * theta[i] + mhat / (std::sqrt(vhat) + opt.eps));
    }
    params.set(name, Tensor(tensor.shape(), std::move(theta)));
  }
}

std::size_t sample_target(std::mt19937_64& rng, const MixtureSample& sample) {
  if (sample.k() == 0) throw ContractError("sample_target: mixture has no speakers");
  std::uniform_int_distribution<std::size_t> pick(0, sample.k() - 1);
  return pick(rng);
}

TrainingExample make_example(std::mt19937_64& rng, const MixtureSample& sample, double severity) {
  TrainingExample ex;
  ex.slot = sample_target(rng, sample);
  ex.k = sample.k();
  ex.features = sample.features;
  ex.activity = sample.activities[ex.slot];
  if (severity > 0.0) ex.activity = degrade_activity(ex.activity, severity, rng());
  ex.target = sample.references[ex.slot];
  return ex;
}

std::vector<std::size_t> select_checkpoints(const std::vector<Checkpoint>& checkpoints, std::size_t top_k) {
  std::vector<std::size_t> idx(checkpoints.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = checkpoints[a];
    const auto& y = checkpoints[b];
    if (x.val_cpwer != y.val_cpwer) return x.val_cpwer < y.val_cpwer;
    return x.step > y.step;
  });
  idx.resize(std::min(top_k, idx.size()));
  return idx;
}

ModelParams average_checkpoints(const std::vector<Checkpoint>& checkpoints, std::size_t top_k) {
  if (checkpoints.empty()) throw ContractError("average_checkpoints: no checkpoints");
  const auto chosen = select_checkpoints(checkpoints, top_k);
  const ModelParams& first = checkpoints[chosen[0]].params;
  for (std::size_t c : chosen) {
    const ModelParams& p = checkpoints[c].params;
    if (!(p.config() == first.config()) || p.tensors().size() != first.tensors().size()) {
      throw ContractError("average_checkpoints: checkpoints hold different parameter sets");
    }
    for (const auto& [name, t] : first.tensors()) {
      if (!p.has(name) || p.get(name).shape() != t.shape()) {
        throw ContractError("average_checkpoints: parameter '" + name + "' differs between checkpoints");
      }
    }
  }
  // mean = first + sum(x - first) / n, exact when all selected values agree.
  ModelParams out = first.frozen();
  const double n = static_cast<double>(chosen.size());
  for (const auto& [name, t] : first.tensors()) {
    const auto base = t.data();
    std::vector<double> acc(t.numel(), 0.0);
    for (std::size_t c : chosen) {
      const auto d = checkpoints[c].params.get(name).data();
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += d[i] - base[i];
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = base[i] + acc[i] / n;
    out.set(name, Tensor(t.shape(), std::move(acc)));
  }
  return out;
}

ValidationSet make_validation_set(const TrainConfig& cfg) {
  const auto pool = make_speaker_pool(cfg.sim);
  SimConfig full = cfg.sim;
  full.max_delay_fraction = 0.0;
  std::mt19937_64 rng(cfg.val_seed);
  ValidationSet set;
  for (std::size_t i = 0; i < cfg.val_2mix; ++i) set.two_mix.push_back(sample_mixture(rng, {0, 1, 0}, pool, full));
  for (std::size_t i = 0; i < cfg.val_1mix; ++i) set.one_mix.push_back(sample_mixture(rng, {1, 0, 0}, pool, cfg.sim));
  return set;
}

ValidationResult validate_model(const ModelParams& params, const ValidationSet& set) {
  auto score = [&](const std::vector<MixtureSample>& samples) {
    ErrorCounts total;
    for (const auto& s : samples) {
      total += cpwer(s.references, decode_offline(params, s.features, s.activities)).counts;
    }
    return total.ref_words == 0 ? 0.0 : total.rate();
  };
  return {score(set.two_mix), score(set.one_mix)};
}

TrainResult train(const TrainConfig& cfg, const ModelParams& init, std::ostream* log) {
  cfg.validate();
  const ModelConfig& mc = init.config();
  if (mc.d_in != cfg.sim.d_in || mc.vocab_size != cfg.sim.vocab_size) {
    throw ConfigMismatchError("train: model and simulator disagree on d_in or vocab_size");
  }
  const auto pool = make_speaker_pool(cfg.sim);
  const ValidationSet val = make_validation_set(cfg);
  std::mt19937_64 rng(cfg.seed);
  ModelParams params = init.frozen();
  OptimizerState opt_state;
  TrainResult result;

  auto emit = [&](const nlohmann::json& j) {
    if (log) *log << j.dump() << '\n' << std::flush;
  };

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const double lr = noam_lr(step, mc.d_model, cfg.warmup_steps, cfg.lr_coeff);
    const ModelParams tracked = params.trainable();
    GradMap grads;
    double loss_sum = 0.0;
    double grad_norm = 0.0;
    try {
      for (std::size_t b = 0; b < cfg.batch_size; ++b) {
        const MixtureSample sample = sample_mixture(rng, cfg.ratios, pool, cfg.sim);
        ++result.k_counts[sample.k() - 1];
        const TrainingExample ex = make_example(rng, sample, cfg.train_severity);
        Tape tape;
        const Tensor loss = ctc_loss(logits(tracked, encode(tracked, ex.features, ex.activity)), ex.target);
        loss_sum += loss.item();
        const Gradients g = tape.backward(loss);
        for (const auto& [name, t] : tracked.tensors()) {
          const auto* gt = g.find(t);
          if (!gt) continue;
          auto& acc = grads[name];
          if (acc.empty()) acc.assign(gt->size(), 0.0);
          for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (*gt)[i];
        }
      }
      const double inv = 1.0 / static_cast<double>(cfg.batch_size);
      double sq = 0.0;
      for (auto& [name, g] : grads) {
        for (double& v : g) {
          v *= inv;
          sq += v * v;
        }
      }
      grad_norm = std::sqrt(sq);
      if (!std::isfinite(loss_sum) || !std::isfinite(grad_norm)) throw NumericError("non-finite loss or gradient");
      if (cfg.clip_norm > 0.0 && grad_norm > cfg.clip_norm) {
        const double s = cfg.clip_norm / grad_norm;
        for (auto& [name, g] : grads)
          for (double& v : g) v *= s;
      }
      adamw_step(params, grads, opt_state, {lr, cfg.weight_decay, cfg.beta1, cfg.beta2, cfg.eps});
    } catch (const NumericError& e) {
      std::ostringstream msg;
      msg << "training diverged at step " << step << " (lr " << lr << ", grad-norm " << grad_norm << "): " << e.what();
      throw NumericError(msg.str());
    }

    const double mean_loss = loss_sum / static_cast<double>(cfg.batch_size);
    result.losses.push_back(mean_loss);
    if (step % cfg.log_every == 0 || step == 1) {
      emit({{"event", "step"}, {"step", step}, {"loss", mean_loss}, {"lr", lr}, {"grad_norm", grad_norm}});
    }
    const bool ckpt = step % cfg.ckpt_every == 0 || step == cfg.steps;
    if (ckpt || step % cfg.val_every == 0) {
      const ValidationResult v = validate_model(params, val);
      emit({{"event", "validation"}, {"step", step}, {"val_cpwer_2mix", v.cpwer_2mix}, {"val_wer_1mix", v.wer_1mix}});
      if (ckpt) result.checkpoints.push_back({step, v.cpwer_2mix, v.wer_1mix, params.frozen()});
    }
  }
  result.averaged = average_checkpoints(result.checkpoints, cfg.top_k);
  return result;
}

}  // namespace ssa
