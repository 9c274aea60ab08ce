// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/mixsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssa/errors.hpp"

namespace ssa {

void SimConfig::validate() const {
  if (d_in == 0 || n_bands == 0 || d_in % n_bands != 0) {
    throw ContractError("sim config: d_in must be a positive multiple of n_bands");
  }
  if (vocab_size == 0 || frames_per_token == 0) throw ContractError("sim config: empty vocabulary");
  if (min_tokens == 0 || min_tokens > max_tokens) {
    throw ContractError("sim config: need 1 <= min_tokens <= max_tokens");
  }
  if (pool_size == 0) throw ContractError("sim config: empty speaker pool");
  if (!(max_delay_fraction >= 0.0) || !(noise_scale >= 0.0) || !(offset_scale >= 0.0)) {
    throw ContractError("sim config: scales and delay fraction must be non-negative");
  }
}

std::span<const double> ToySpeaker::token_frame(int token, std::size_t f) const {
  const std::size_t row = static_cast<std::size_t>(token) * frames_per_token + f;
  return std::span<const double>(templates).subspan(row * d_in, d_in);
}

std::vector<ToySpeaker> make_speaker_pool(const SimConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.world_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t band = config.d_in / config.n_bands;
  const std::size_t rows = config.vocab_size * config.frames_per_token;
  std::vector<double> bank(rows * band);
  for (double& v : bank) v = normal(rng);

  std::vector<ToySpeaker> pool;
  for (std::size_t s = 0; s < config.pool_size; ++s) {
    ToySpeaker spk;
    spk.speaker_id = static_cast<int>(s);
    spk.d_in = config.d_in;
    spk.frames_per_token = config.frames_per_token;
    spk.noise_scale = config.noise_scale;
    spk.max_gap = config.max_gap;
    spk.templates.assign(rows * config.d_in, 0.0);
    const std::size_t lo = (s % config.n_bands) * band;
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(bank.begin() + static_cast<std::ptrdiff_t>(r * band), band,
                  spk.templates.begin() + static_cast<std::ptrdiff_t>(r * config.d_in + lo));
    }
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw ContractError("speaker pool: cannot satisfy offset margin");
      spk.offset.assign(config.d_in, 0.0);
      for (double& v : spk.offset) v = normal(rng) * config.offset_scale;
      const bool far = std::all_of(pool.begin(), pool.end(), [&](const ToySpeaker& o) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < config.d_in; ++i) d2 += std::pow(o.offset[i] - spk.offset[i], 2);
        return std::sqrt(d2) > config.offset_margin;
      });
      if (far) break;
    }
    pool.push_back(std::move(spk));
  }
  return pool;
}

Utterance synth_utterance(const ToySpeaker& speaker, const TokenSeq& tokens, std::uint64_t seed) {
  if (tokens.empty()) throw ContractError("synth_utterance: empty token sequence");
  const int vocab = static_cast<int>(speaker.vocab_size());
  for (int t : tokens.tokens) {
    if (t < 0 || t >= vocab) throw ContractError("synth_utterance: token " + std::to_string(t) + " out of range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> gap(0, speaker.max_gap);
  std::vector<std::size_t> gaps(tokens.size(), 0);
  for (std::size_t i = 1; i < tokens.size(); ++i) gaps[i] = gap(rng);

  const std::size_t d = speaker.d_in;
  std::vector<double> feats;
  std::vector<double> act;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    feats.insert(feats.end(), gaps[i] * d, 0.0);
    act.insert(act.end(), gaps[i], 0.0);
    for (std::size_t f = 0; f < speaker.frames_per_token; ++f) {
      const auto tmpl = speaker.token_frame(tokens.tokens[i], f);
      for (std::size_t c = 0; c < d; ++c) feats.push_back(tmpl[c] + speaker.offset[c]);
      act.push_back(1.0);
    }
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  for (double& v : feats) v += speaker.noise_scale * noise(rng);

  Utterance u;
  u.features = FeatureSeq(d, std::move(feats));
  u.activity = ActivitySeq(std::move(act));
  u.tokens = tokens;
  u.speaker_id = speaker.speaker_id;
  u.seed = seed;
  return u;
}

MixtureSample mix(const std::vector<Utterance>& sources, const std::vector<std::size_t>& delays) {
  const std::size_t k = sources.size();
  if (k < 1 || k > 3) throw ContractError("mix: speaker count " + std::to_string(k) + " outside [1, 3]");
  if (delays.size() != k) throw ContractError("mix: one delay per source required");
  const std::size_t d = sources[0].features.dim;
  std::size_t total = 0;
  for (std::size_t s = 0; s < k; ++s) {
    const auto& u = sources[s];
    if (u.features.dim != d) throw DimensionError("mix: sources differ in feature dimension");
    if (u.activity.size() != u.features.frames()) {
      throw ContractError("mix: source activity length differs from its features");
    }
    total = std::max(total, delays[s] + u.features.frames());
  }
  MixtureSample m;
  m.features = FeatureSeq(total, d, sources[0].features.frame_ms);
  for (std::size_t s = 0; s < k; ++s) {
    const auto& u = sources[s];
    for (std::size_t i = 0; i < u.features.values.size(); ++i) {
      m.features.values[delays[s] * d + i] += u.features.values[i];
    }
    std::vector<double> act(total, 0.0);
    std::copy(u.activity.values().begin(), u.activity.values().end(),
              act.begin() + static_cast<std::ptrdiff_t>(delays[s]));
    m.activities.emplace_back(std::move(act), u.activity.frame_ms());
    m.references.push_back(u.tokens);
    m.speaker_ids.push_back(u.speaker_id);
    m.seeds.push_back(u.seed);
  }
  m.delays = delays;
  return m;
}

MixtureSample sample_mixture(std::mt19937_64& rng, const MixRatios& ratios,
                             const std::vector<ToySpeaker>& pool, const SimConfig& config) {
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(ratios[i] >= 0.0) || !std::isfinite(ratios[i])) {
      throw ContractError("sample_mixture: ratios must be finite and non-negative");
    }
    total += ratios[i];
    if (ratios[i] > 0.0 && pool.size() < i + 1) {
      throw ContractError("sample_mixture: pool of " + std::to_string(pool.size()) +
                          " speakers cannot supply " + std::to_string(i + 1) + "-mixtures");
    }
  }
  if (total <= 0.0) throw ContractError("sample_mixture: all ratios are zero");

  std::discrete_distribution<std::size_t> pick_k(ratios.begin(), ratios.end());
  const std::size_t k = pick_k(rng) + 1;
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> j(i, order.size() - 1);
    std::swap(order[i], order[j(rng)]);
  }
  std::uniform_int_distribution<std::size_t> length(config.min_tokens, config.max_tokens);
  std::uniform_int_distribution<int> token(0, static_cast<int>(config.vocab_size) - 1);
  std::vector<Utterance> sources;
  for (std::size_t i = 0; i < k; ++i) {
    TokenSeq toks;
    const std::size_t n = length(rng);
    for (std::size_t t = 0; t < n; ++t) toks.tokens.push_back(token(rng));
    sources.push_back(synth_utterance(pool[order[i]], toks, rng()));
  }
  std::vector<std::size_t> delays(k, 0);
  const auto limit = static_cast<std::size_t>(
      std::floor(config.max_delay_fraction * static_cast<double>(sources[0].features.frames())));
  std::uniform_int_distribution<std::size_t> delay(0, limit);
  for (std::size_t i = 1; i < k; ++i) delays[i] = delay(rng);
  return mix(sources, delays);
}

ActivitySeq degrade_activity(const ActivitySeq& y, double severity, std::uint64_t seed) {
  if (!(severity >= 0.0 && severity <= 1.0)) {
    throw ContractError("degrade_activity: severity must lie in [0, 1]");
  }
  if (severity == 0.0) return y;
  const std::size_t n = y.size();
  std::mt19937_64 rng(seed);
  const auto jitter = static_cast<long>(std::lround(8.0 * severity));
  const auto erode = static_cast<long>(std::lround(3.0 * severity));
  std::uniform_int_distribution<long> shift(-jitter, jitter);

  std::vector<double> out(n, 0.0);
  std::size_t t = 0;
  while (t < n) {
    if (y[t] < 0.5) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    while (t < n && y[t] >= 0.5) ++t;
    long on = static_cast<long>(start) + shift(rng) + erode;
    long off = static_cast<long>(t) + shift(rng) - erode;
    on = std::clamp(on, 0L, static_cast<long>(n));
    off = std::clamp(off, 0L, static_cast<long>(n));
    for (long i = on; i < off; ++i) out[static_cast<std::size_t>(i)] = 1.0;
  }
  std::bernoulli_distribution flip(0.5 * severity);
  for (double& v : out) {
    if (flip(rng)) v = 1.0 - v;
  }
  return ActivitySeq(std::move(out), y.frame_ms());
}

}  // namespace ssa
