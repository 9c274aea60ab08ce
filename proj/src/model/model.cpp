// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/model.hpp"

#include <cmath>
#include <random>

#include "ssa/errors.hpp"
#include "ssa/ops.hpp"

namespace ssa {

namespace {

std::string blk(std::size_t b, const char* name) {
  return "block" + std::to_string(b) + "." + name;
}

Tensor empty_rows(std::size_t cols) { return Tensor::zeros({0, cols}); }

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  return ops::add(ops::matmul(x, w), b);
}

Tensor activate(const Tensor& x, Activation a) {
  return a == Activation::kRelu ? ops::relu(x) : ops::swish(x);
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::kRelu ? "relu" : "swish"; }
std::string to_string(BiasPolicy b) { return b == BiasPolicy::kNone ? "none" : "free"; }

void ModelConfig::validate() const {
  auto fail = [](const std::string& w) { throw ContractError("model config: " + w); };
  if (d_in == 0 || d_model == 0 || d_hidden_inj == 0 || d_ff == 0) fail("zero dimension");
  if (n_heads == 0 || d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (subsample < 1) fail("subsample factor must be >= 1");
  if (conv_kernel < 1) fail("conv_kernel must be >= 1");
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (injection_site > n_blocks) fail("injection_site beyond the last block");
}

ModelParams::ModelParams(ModelConfig config) : config_(std::move(config)) { config_.validate(); }

ModelParams::ModelParams(const ModelParams& other)
    : config_(other.config_), tensors_(other.tensors_) {}

ModelParams& ModelParams::operator=(const ModelParams& other) {
  if (this != &other) {
    if (*leases_ > 0) throw StateError("cannot overwrite parameters while a session is open");
    config_ = other.config_;
    tensors_ = other.tensors_;
  }
  return *this;
}

ModelParams ModelParams::init(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p(config);
  std::mt19937_64 rng(seed);
  auto uniform = [&](Shape shape, double bound) {
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> v(shape_numel(shape));
    for (double& x : v) x = dist(rng);
    return Tensor(std::move(shape), std::move(v));
  };
  auto xavier = [&](std::size_t in, std::size_t out) {
    return uniform({in, out}, std::sqrt(6.0 / static_cast<double>(in + out)));
  };
  const std::size_t d = config.d_model;
  const std::size_t s = config.subsample;
  p.tensors_["pre.w"] = xavier(s * config.d_in, d);
  p.tensors_["pre.b"] = Tensor::zeros({d});
  p.tensors_["inj.w1"] = xavier(d, config.d_hidden_inj);
  p.tensors_["inj.w2"] = xavier(config.d_hidden_inj, d);
  if (config.inj_bias == BiasPolicy::kFree) {
    p.tensors_["inj.b1"] = Tensor::zeros({config.d_hidden_inj});
    p.tensors_["inj.b2"] = Tensor::zeros({d});
  }
  for (std::size_t b = 0; b < config.n_blocks; ++b) {
    for (const char* ln : {"ln1", "ln2", "ln3"}) {
      p.tensors_[blk(b, ln) + ".g"] = Tensor::full({d}, 1.0);
      p.tensors_[blk(b, ln) + ".b"] = Tensor::zeros({d});
    }
    for (const char* w : {"att.wq", "att.wk", "att.wv", "att.wo"}) {
      p.tensors_[blk(b, w)] = xavier(d, d);
    }
    for (const char* bias : {"att.bq", "att.bk", "att.bv", "att.bo"}) {
      p.tensors_[blk(b, bias)] = Tensor::zeros({d});
    }
    p.tensors_[blk(b, "conv.dw")] =
        uniform({config.conv_kernel, d}, 1.0 / std::sqrt(static_cast<double>(config.conv_kernel)));
    p.tensors_[blk(b, "conv.pw")] = xavier(d, d);
    p.tensors_[blk(b, "conv.pb")] = Tensor::zeros({d});
    p.tensors_[blk(b, "ff.w1")] = xavier(d, config.d_ff);
    p.tensors_[blk(b, "ff.b1")] = Tensor::zeros({config.d_ff});
    p.tensors_[blk(b, "ff.w2")] = xavier(config.d_ff, d);
    p.tensors_[blk(b, "ff.b2")] = Tensor::zeros({d});
  }
  p.tensors_["final_ln.g"] = Tensor::full({d}, 1.0);
  p.tensors_["final_ln.b"] = Tensor::zeros({d});
  p.tensors_["out.w"] = xavier(d, config.vocab_size + 1);
  p.tensors_["out.b"] = Tensor::zeros({config.vocab_size + 1});
  return p;
}

const Tensor& ModelParams::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

void ModelParams::set(const std::string& name, Tensor value) {
  if (*leases_ > 0) {
    throw StateError("parameter '" + name + "' modified while a session is open");
  }
  auto it = tensors_.find(name);
  if (it != tensors_.end() && it->second.shape() != value.shape()) {
    throw DimensionError("parameter '" + name + "' expects shape " +
                         shape_str(it->second.shape()) + ", got " + shape_str(value.shape()));
  }
  tensors_[name] = std::move(value);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : tensors_) n += t.numel();
  return n;
}

ModelParams ModelParams::trainable() const {
  ModelParams p(config_);
  for (const auto& [name, t] : tensors_) {
    p.tensors_[name] = Tensor(t.shape(), std::vector<double>(t.data().begin(), t.data().end()), true);
  }
  return p;
}

ModelParams ModelParams::frozen() const {
  ModelParams p(config_);
  for (const auto& [name, t] : tensors_) p.tensors_[name] = t.detach();
  return p;
}

InjectionParams ModelParams::injection() const {
  InjectionParams inj;
  inj.w1 = get("inj.w1");
  inj.w2 = get("inj.w2");
  inj.activation = config_.inj_activation;
  inj.bias = config_.inj_bias;
  if (inj.bias == BiasPolicy::kFree) {
    inj.b1 = get("inj.b1");
    inj.b2 = get("inj.b2");
  }
  return inj;
}

ModelParams::Lease::Lease(std::shared_ptr<std::atomic<int>> counter)
    : counter_(std::move(counter)) {
  ++*counter_;
}

ModelParams::Lease::~Lease() { --*counter_; }

std::unique_ptr<ModelParams::Lease> ModelParams::lease() const {
  return std::make_unique<Lease>(leases_);
}

EncoderCache::EncoderCache(const ModelConfig& config) : config_(config) {
  config_.validate();
  blocks_.resize(config_.n_blocks);
  for (auto& b : blocks_) {
    b.keys = empty_rows(config_.d_model);
    b.values = empty_rows(config_.d_model);
    b.conv_history = Tensor::zeros({config_.conv_kernel - 1, config_.d_model});
    b.pending = empty_rows(config_.d_model);
  }
}

Tensor pre_encode(const ModelParams& params, const Tensor& features) {
  const auto& cfg = params.config();
  if (features.rank() != 2 || features.cols() != cfg.d_in) {
    throw DimensionError("pre_encode: expected [T, " + std::to_string(cfg.d_in) + "], got " +
                         shape_str(features.shape()));
  }
  if (features.rows() < cfg.subsample) {
    throw ContractError("pre_encode: input of " + std::to_string(features.rows()) +
                        " frames is shorter than the subsampling factor " +
                        std::to_string(cfg.subsample));
  }
  return ops::swish(
      ops::strided_conv1d(features, params.get("pre.w"), params.get("pre.b"), cfg.subsample));
}

ActivitySeq downsample_activity(const ActivitySeq& y, std::size_t factor) {
  if (factor < 1) throw ContractError("downsample factor must be >= 1");
  if (y.size() < factor) {
    throw ContractError("activity of " + std::to_string(y.size()) +
                        " frames is shorter than the factor " + std::to_string(factor));
  }
  const std::size_t n = y.size() / factor;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < factor; ++j) s += y[t * factor + j];
    // Clamp guards the [0,1] invariant against rounding of the mean.
    out[t] = std::clamp(s / static_cast<double>(factor), 0.0, 1.0);
  }
  return ActivitySeq(std::move(out), y.frame_ms() * static_cast<double>(factor));
}

Tensor inject(const Tensor& x, const Tensor& y, const InjectionParams& p) {
  if (x.rank() != 2 || y.rank() != 2 || y.cols() != 1 || y.rows() != x.rows()) {
    throw ContractError("inject: activity " + shape_str(y.shape()) +
                        " does not match features " + shape_str(x.shape()));
  }
  Tensor masked = ops::mul(x, y);
  Tensor h = ops::matmul(masked, p.w1);
  if (p.bias == BiasPolicy::kFree) h = ops::add(h, p.b1);
  h = activate(h, p.activation);
  Tensor f = ops::matmul(h, p.w2);
  if (p.bias == BiasPolicy::kFree) f = ops::add(f, p.b2);
  return ops::add(f, x);
}

namespace {

struct BlockWeights {
  Tensor ln1g, ln1b, wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ln2g, ln2b, dw, pw, pb;
  Tensor ln3g, ln3b, w1, b1, w2, b2;
};

BlockWeights block_weights(const ModelParams& p, std::size_t b) {
  auto g = [&](const char* n) { return p.get(blk(b, n)); };
  return {g("ln1.g"),   g("ln1.b"),   g("att.wq"),  g("att.bq"), g("att.wk"), g("att.bk"),
          g("att.wv"),  g("att.bv"),  g("att.wo"),  g("att.bo"), g("ln2.g"),  g("ln2.b"),
          g("conv.dw"), g("conv.pw"), g("conv.pb"), g("ln3.g"),  g("ln3.b"),  g("ff.w1"),
          g("ff.b1"),   g("ff.w2"),   g("ff.b2")};
}

// Runs one block over newly arrived rows and returns the rows whose
// attention window is complete. Keys/values of every arrived row are cached
// immediately; outputs lag by `lookahead` rows unless `final` is set.
Tensor block_forward(const ModelConfig& cfg, const BlockWeights& w, const Tensor& x,
                     EncoderCache::Block& st, std::size_t lookahead, bool final) {
  const std::size_t d = cfg.d_model;
  const std::size_t n = x.rows();
  const bool had_pending = st.pending.rows() > 0;

  Tensor h;
  if (n > 0) {
    h = ops::layer_norm(x, w.ln1g, w.ln1b);
    const Tensor k = linear(h, w.wk, w.bk);
    const Tensor v = linear(h, w.wv, w.bv);
    if (st.keys.rows() > 0) {
      const Tensor kp[] = {st.keys, k};
      const Tensor vp[] = {st.values, v};
      st.keys = ops::concat_rows(kp);
      st.values = ops::concat_rows(vp);
    } else {
      st.keys = k;
      st.values = v;
    }
  }
  const std::size_t kv_end = st.kv_start + st.keys.rows();

  Tensor pending = x;
  if (had_pending) {
    const Tensor parts[] = {st.pending, x};
    pending = ops::concat_rows(parts);
  }
  std::size_t ready = pending.rows();
  if (!final) {
    ready = kv_end >= st.next_query + lookahead ? kv_end - lookahead - st.next_query : 0;
    ready = std::min(ready, pending.rows());
  }
  if (ready == 0) {
    st.pending = pending;
    return empty_rows(d);
  }
  const Tensor xq = ready == pending.rows() ? pending : ops::slice_rows(pending, 0, ready);
  const Tensor hq =
      (!had_pending && ready == n) ? h : ops::layer_norm(xq, w.ln1g, w.ln1b);
  const Tensor q = linear(hq, w.wq, w.bq);

  // Attention over the cached window with left-context / lookahead masking.
  const std::size_t nk = st.keys.rows();
  std::vector<std::uint8_t> allowed(ready * nk, 0);
  for (std::size_t i = 0; i < ready; ++i) {
    const std::size_t pos = st.next_query + i;
    for (std::size_t j = 0; j < nk; ++j) {
      const std::size_t key = st.kv_start + j;
      allowed[i * nk + j] = key <= pos + lookahead && key + cfg.left_context >= pos;
    }
  }
  const std::size_t dh = d / cfg.n_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> heads;
  heads.reserve(cfg.n_heads);
  for (std::size_t hd = 0; hd < cfg.n_heads; ++hd) {
    const Tensor qh = ops::slice_cols(q, hd * dh, dh);
    const Tensor kh = ops::slice_cols(st.keys, hd * dh, dh);
    const Tensor vh = ops::slice_cols(st.values, hd * dh, dh);
    const Tensor scores = ops::scale(ops::matmul(qh, ops::transpose(kh)), inv_sqrt);
    heads.push_back(ops::matmul(ops::softmax(scores, 1, allowed), vh));
  }
  const Tensor att = linear(ops::concat_cols(heads), w.wo, w.bo);
  const Tensor x1 = ops::add(xq, att);

  // Causal depthwise convolution with carried history.
  const Tensor h2 = ops::layer_norm(x1, w.ln2g, w.ln2b);
  const std::size_t hist = cfg.conv_kernel - 1;
  const Tensor conv_parts[] = {st.conv_history, h2};
  const Tensor conv_in = ops::concat_rows(conv_parts);
  const Tensor conv = ops::depthwise_conv1d(conv_in, w.dw);
  st.conv_history = ops::slice_rows(conv_in, conv_in.rows() - hist, hist);
  const Tensor x2 = ops::add(x1, linear(ops::swish(conv), w.pw, w.pb));

  const Tensor h3 = ops::layer_norm(x2, w.ln3g, w.ln3b);
  const Tensor ff = linear(ops::swish(linear(h3, w.w1, w.b1)), w.w2, w.b2);
  const Tensor out = ops::add(x2, ff);

  st.pending = ops::slice_rows(pending, ready, pending.rows() - ready);
  st.next_query += ready;
  const std::size_t keep_from =
      st.next_query > cfg.left_context ? st.next_query - cfg.left_context : 0;
  if (keep_from > st.kv_start) {
    const std::size_t drop = keep_from - st.kv_start;
    st.keys = ops::slice_rows(st.keys, drop, st.keys.rows() - drop);
    st.values = ops::slice_rows(st.values, drop, st.values.rows() - drop);
    st.kv_start = keep_from;
  }
  return out;
}

}  // namespace

Tensor encode_chunk(const ModelParams& params, const FeatureSeq& chunk, const ActivitySeq& activity,
                    EncoderCache& cache, bool final) {
  const ModelConfig& cfg = params.config();
  if (!(cache.config_ == cfg)) {
    throw ConfigMismatchError("encoder cache was built under a different model config");
  }
  if (cache.finished_) throw StateError("encoder cache already finalised");
  if (chunk.frames() > 0 && chunk.dim != cfg.d_in) {
    throw DimensionError("encode: expected " + std::to_string(cfg.d_in) +
                         "-dim features, got " + std::to_string(chunk.dim));
  }
  if (activity.size() != chunk.frames()) {
    throw ContractError("encode: activity has " + std::to_string(activity.size()) +
                        " frames but features have " + std::to_string(chunk.frames()));
  }
  const std::size_t s = cfg.subsample;
  const std::size_t d = cfg.d_model;

  cache.raw_frames_.insert(cache.raw_frames_.end(), chunk.values.begin(), chunk.values.end());
  cache.raw_activity_.insert(cache.raw_activity_.end(), activity.values().begin(),
                             activity.values().end());
  const std::size_t windows = cache.raw_activity_.size() / s;
  Tensor x = empty_rows(d);
  if (windows > 0) {
    const std::size_t used = windows * s;
    std::vector<double> feats(cache.raw_frames_.begin(),
                              cache.raw_frames_.begin() + static_cast<std::ptrdiff_t>(used * cfg.d_in));
    x = pre_encode(params, Tensor({used, cfg.d_in}, std::move(feats)));
    const ActivitySeq pooled = downsample_activity(
        ActivitySeq(std::vector<double>(cache.raw_activity_.begin(),
                                        cache.raw_activity_.begin() + static_cast<std::ptrdiff_t>(used))),
        s);
    cache.site_activity_.insert(cache.site_activity_.end(), pooled.values().begin(),
                                pooled.values().end());
    cache.raw_frames_.erase(cache.raw_frames_.begin(),
                            cache.raw_frames_.begin() + static_cast<std::ptrdiff_t>(used * cfg.d_in));
    cache.raw_activity_.erase(cache.raw_activity_.begin(),
                              cache.raw_activity_.begin() + static_cast<std::ptrdiff_t>(used));
    cache.pre_frames_ += windows;
  }
  if (final) {
    cache.raw_frames_.clear();
    cache.raw_activity_.clear();
  }

  const InjectionParams inj = params.injection();
  auto inject_rows = [&](const Tensor& rows) {
    const std::size_t r = rows.rows();
    if (r == 0) return rows;
    std::vector<double> y(cache.site_activity_.begin(),
                          cache.site_activity_.begin() + static_cast<std::ptrdiff_t>(r));
    cache.site_activity_.erase(cache.site_activity_.begin(),
                               cache.site_activity_.begin() + static_cast<std::ptrdiff_t>(r));
    cache.site_position_ += r;
    return inject(rows, Tensor({r, 1}, std::move(y)), inj);
  };

  if (cfg.injection_site == 0) x = inject_rows(x);
  for (std::size_t b = 0; b < cfg.n_blocks; ++b) {
    x = block_forward(cfg, block_weights(params, b), x, cache.blocks_[b],
                      b == 0 ? cfg.lookahead : 0, final);
    if (cfg.injection_site == b + 1) x = inject_rows(x);
  }
  if (x.rows() > 0) {
    x = ops::layer_norm(x, params.get("final_ln.g"), params.get("final_ln.b"));
  }
  cache.frames_out_ += x.rows();
  if (final) cache.finished_ = true;
  return x;
}

Tensor encode(const ModelParams& params, const FeatureSeq& features, const ActivitySeq& activity) {
  if (features.frames() < params.config().subsample) {
    throw ContractError("encode: input of " + std::to_string(features.frames()) +
                        " frames is shorter than the subsampling factor");
  }
  EncoderCache cache(params.config());
  return encode_chunk(params, features, activity, cache, true);
}

Tensor logits(const ModelParams& params, const Tensor& hidden) {
  return ops::log_softmax(linear(hidden, params.get("out.w"), params.get("out.b")));
}

}  // namespace ssa
