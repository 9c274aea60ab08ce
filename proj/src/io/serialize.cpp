// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/serialize.hpp"

#include <openssl/evp.h>

#include <set>

#include "ssa/errors.hpp"

namespace ssa {

using nlohmann::json;

namespace {

// Reads typed fields from an object and rejects keys nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j.is_object()) throw ParseError(what_ + ": expected a JSON object");
  }
  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ParseError(what_ + ": unknown key '" + key + "'");
    }
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) throw ParseError("");
      } else if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ParseError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ParseError(what_ + ": key '" + key + "' has the wrong type");
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const json& j_;
  std::string what_;
  std::set<std::string> seen_;
};

}  // namespace

json to_json(const ModelConfig& c) {
  return json{{"d_in", c.d_in},
              {"d_model", c.d_model},
              {"n_blocks", c.n_blocks},
              {"n_heads", c.n_heads},
              {"conv_kernel", c.conv_kernel},
              {"subsample", c.subsample},
              {"left_context", c.left_context},
              {"lookahead", c.lookahead},
              {"d_hidden_inj", c.d_hidden_inj},
              {"d_ff", c.d_ff},
              {"vocab_size", c.vocab_size},
              {"injection_site", c.injection_site},
              {"inj_activation", to_string(c.inj_activation)},
              {"inj_bias", to_string(c.inj_bias)}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
  {
    Fields f(j, "model config");
    f.get("d_in", c.d_in);
    f.get("d_model", c.d_model);
    f.get("n_blocks", c.n_blocks);
    f.get("n_heads", c.n_heads);
    f.get("conv_kernel", c.conv_kernel);
    f.get("subsample", c.subsample);
    f.get("left_context", c.left_context);
    f.get("lookahead", c.lookahead);
    f.get("d_hidden_inj", c.d_hidden_inj);
    f.get("d_ff", c.d_ff);
    f.get("vocab_size", c.vocab_size);
    f.get("injection_site", c.injection_site);
    std::string act = to_string(c.inj_activation), bias = to_string(c.inj_bias);
    f.get("inj_activation", act);
    f.get("inj_bias", bias);
    if (act != "relu" && act != "swish") throw ParseError("model config: inj_activation must be relu or swish");
    if (bias != "none" && bias != "free") throw ParseError("model config: inj_bias must be none or free");
    c.inj_activation = act == "relu" ? Activation::kRelu : Activation::kSwish;
    c.inj_bias = bias == "none" ? BiasPolicy::kNone : BiasPolicy::kFree;
    f.finish();
  }
  c.validate();
  return c;
}

json to_json(const SimConfig& c) {
  return json{{"d_in", c.d_in},
              {"vocab_size", c.vocab_size},
              {"frames_per_token", c.frames_per_token},
              {"n_bands", c.n_bands},
              {"pool_size", c.pool_size},
              {"offset_scale", c.offset_scale},
              {"offset_margin", c.offset_margin},
              {"noise_scale", c.noise_scale},
              {"max_gap", c.max_gap},
              {"min_tokens", c.min_tokens},
              {"max_tokens", c.max_tokens},
              {"max_delay_fraction", c.max_delay_fraction},
              {"world_seed", c.world_seed}};
}

SimConfig sim_config_from_json(const json& j, SimConfig c) {
  {
    Fields f(j, "sim config");
    f.get("d_in", c.d_in);
    f.get("vocab_size", c.vocab_size);
    f.get("frames_per_token", c.frames_per_token);
    f.get("n_bands", c.n_bands);
    f.get("pool_size", c.pool_size);
    f.get("offset_scale", c.offset_scale);
    f.get("offset_margin", c.offset_margin);
    f.get("noise_scale", c.noise_scale);
    f.get("max_gap", c.max_gap);
    f.get("min_tokens", c.min_tokens);
    f.get("max_tokens", c.max_tokens);
    f.get("max_delay_fraction", c.max_delay_fraction);
    f.get("world_seed", c.world_seed);
    f.finish();
  }
  c.validate();
  return c;
}

json to_json(const TrainConfig& c) {
  return json{{"steps", c.steps},
              {"batch_size", c.batch_size},
              {"ratios", c.ratios},
              {"lr_coeff", c.lr_coeff},
              {"warmup_steps", c.warmup_steps},
              {"weight_decay", c.weight_decay},
              {"betas", {c.beta1, c.beta2}},
              {"eps", c.eps},
              {"clip_norm", c.clip_norm},
              {"seed", c.seed},
              {"val_every", c.val_every},
              {"ckpt_every", c.ckpt_every},
              {"log_every", c.log_every},
              {"top_k", c.top_k},
              {"train_severity", c.train_severity},
              {"val_seed", c.val_seed},
              {"val_2mix", c.val_2mix},
              {"val_1mix", c.val_1mix},
              {"sim", to_json(c.sim)}};
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  {
    Fields f(j, "train config");
    f.get("steps", c.steps);
    f.get("batch_size", c.batch_size);
    if (const json* r = f.sub("ratios")) {
      if (!r->is_array() || r->size() != 3) throw ParseError("train config: ratios must be a 3-element array");
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(*r)[i].is_number()) throw ParseError("train config: ratios must be numbers");
        c.ratios[i] = (*r)[i].get<double>();
      }
    }
    f.get("lr_coeff", c.lr_coeff);
    f.get("warmup_steps", c.warmup_steps);
    f.get("weight_decay", c.weight_decay);
    if (const json* b = f.sub("betas")) {
      if (!b->is_array() || b->size() != 2 || !(*b)[0].is_number() || !(*b)[1].is_number()) {
        throw ParseError("train config: betas must be a 2-element array");
      }
      c.beta1 = (*b)[0].get<double>();
      c.beta2 = (*b)[1].get<double>();
    }
    f.get("eps", c.eps);
    f.get("clip_norm", c.clip_norm);
    f.get("seed", c.seed);
    f.get("val_every", c.val_every);
    f.get("ckpt_every", c.ckpt_every);
    f.get("log_every", c.log_every);
    f.get("top_k", c.top_k);
    f.get("train_severity", c.train_severity);
    f.get("val_seed", c.val_seed);
    f.get("val_2mix", c.val_2mix);
    f.get("val_1mix", c.val_1mix);
    if (const json* s = f.sub("sim")) c.sim = sim_config_from_json(*s, c.sim);
    f.finish();
  }
  c.validate();
  return c;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::kState, "sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string json_hash(const json& j) { return sha256_hex(j.dump()); }

}  // namespace ssa
