// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/ctc.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "ssa/errors.hpp"

namespace ssa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::size_t ctc_min_frames(const TokenSeq& target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (target.tokens[i] == target.tokens[i - 1]) ++n;
  }
  return n;
}

Tensor ctc_loss(const Tensor& log_probs, const TokenSeq& target) {
  if (log_probs.rank() != 2 || log_probs.cols() < 2) {
    throw DimensionError("ctc_loss: expected [T, V+1] log-probs, got " +
                         shape_str(log_probs.shape()));
  }
  const std::size_t frames = log_probs.rows();
  const std::size_t symbols = log_probs.cols();
  const int blank = static_cast<int>(symbols - 1);
  for (int tok : target.tokens) {
    if (tok < 0 || tok >= blank) {
      throw ContractError("ctc_loss: token id " + std::to_string(tok) + " outside [0, " +
                          std::to_string(blank) + ")");
    }
  }
  const std::size_t need = ctc_min_frames(target);
  if (frames == 0 || frames < need) {
    throw InfeasibleError("ctc_loss: target needs at least " + std::to_string(need) +
                          " frames, only " + std::to_string(frames) + " available");
  }

  // Extended label sequence: blank, l1, blank, l2, ..., lL, blank.
  const std::size_t ext = 2 * target.size() + 1;
  std::vector<int> label(ext, blank);
  for (std::size_t i = 0; i < target.size(); ++i) label[2 * i + 1] = target.tokens[i];
  auto can_skip = [&](std::size_t s) {  // transition s-2 -> s allowed
    return s >= 2 && label[s] != blank && label[s] != label[s - 2];
  };

  const auto lp = log_probs.data();
  auto at = [&](std::size_t t, std::size_t s) { return lp[t * symbols + static_cast<std::size_t>(label[s])]; };

  std::vector<double> alpha(frames * ext, kNegInf);
  std::vector<double> beta(frames * ext, kNegInf);
  alpha[0] = at(0, 0);
  if (ext > 1) alpha[1] = at(0, 1);
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < ext; ++s) {
      double a = alpha[(t - 1) * ext + s];
      if (s >= 1) a = log_add(a, alpha[(t - 1) * ext + s - 1]);
      if (can_skip(s)) a = log_add(a, alpha[(t - 1) * ext + s - 2]);
      alpha[t * ext + s] = a == kNegInf ? kNegInf : a + at(t, s);
    }
  }
  const std::size_t last = frames - 1;
  beta[last * ext + ext - 1] = at(last, ext - 1);
  if (ext > 1) beta[last * ext + ext - 2] = at(last, ext - 2);
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t s = 0; s < ext; ++s) {
      double b = beta[(t + 1) * ext + s];
      if (s + 1 < ext) b = log_add(b, beta[(t + 1) * ext + s + 1]);
      if (s + 2 < ext && can_skip(s + 2)) b = log_add(b, beta[(t + 1) * ext + s + 2]);
      beta[t * ext + s] = b == kNegInf ? kNegInf : b + at(t, s);
    }
  }
  double log_p = alpha[last * ext + ext - 1];
  if (ext > 1) log_p = log_add(log_p, alpha[last * ext + ext - 2]);
  if (!std::isfinite(log_p)) {
    throw NumericError("ctc_loss: alignment probability underflowed to zero");
  }

  // d(-log P)/d lp[t,k] = -exp(logsumexp_{s: label[s]=k}(alpha+beta) - log P - lp[t,k]).
  auto grad = std::make_shared<std::vector<double>>(frames * symbols, 0.0);
  std::vector<double> occ(symbols);
  for (std::size_t t = 0; t < frames; ++t) {
    std::fill(occ.begin(), occ.end(), kNegInf);
    for (std::size_t s = 0; s < ext; ++s) {
      const double ab = alpha[t * ext + s] + beta[t * ext + s];
      if (alpha[t * ext + s] == kNegInf || beta[t * ext + s] == kNegInf) continue;
      auto& o = occ[static_cast<std::size_t>(label[s])];
      o = log_add(o, ab);
    }
    for (std::size_t k = 0; k < symbols; ++k) {
      if (occ[k] == kNegInf) continue;
      (*grad)[t * symbols + k] = -std::exp(occ[k] - log_p - lp[t * symbols + k]);
    }
  }
  return Tensor::make_result("ctc_loss", {1}, {-log_p}, {&log_probs},
                             [log_probs, grad](std::span<const double> g, Gradients& grads) {
                               auto& gl = grads.slot(log_probs);
                               for (std::size_t i = 0; i < gl.size(); ++i) gl[i] += g[0] * (*grad)[i];
                             });
}

TokenSeq greedy_decode(const Tensor& log_probs) {
  GreedyDecoder dec(log_probs.cols() - 1);
  dec.push(log_probs);
  return dec.hypothesis();
}

TokenSeq GreedyDecoder::push(const Tensor& log_probs) {
  TokenSeq emitted;
  if (log_probs.numel() == 0) return emitted;
  if (log_probs.rank() != 2 || static_cast<int>(log_probs.cols()) != blank_ + 1) {
    throw DimensionError("greedy decode: expected [T, " + std::to_string(blank_ + 1) +
                         "] log-probs, got " + shape_str(log_probs.shape()));
  }
  const std::size_t n = log_probs.cols();
  const auto d = log_probs.data();
  for (std::size_t t = 0; t < log_probs.rows(); ++t) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
      if (d[t * n + k] > d[t * n + best]) best = k;
    }
    const int sym = static_cast<int>(best);
    if (sym != prev_ && sym != blank_) {
      emitted.tokens.push_back(sym);
      hyp_.tokens.push_back(sym);
    }
    prev_ = sym;
  }
  return emitted;
}

}  // namespace ssa
