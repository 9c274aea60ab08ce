// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// CTC objective and greedy decoding over [T, V+1] log-probabilities with the
// blank symbol at index V.

#pragma once

#include <cstddef>

#include "ssa/tensor.hpp"
#include "ssa/types.hpp"

namespace ssa {

/// Minimum frame count for a CTC alignment of `target`: one frame per token
/// plus a separating blank between equal neighbours.
std::size_t ctc_min_frames(const TokenSeq& target);

/// Negative log marginal probability of `target` over all CTC alignments,
/// computed with log-space forward/backward recursions. Differentiable with
/// respect to `log_probs`. Throws InfeasibleError when the target cannot fit.
Tensor ctc_loss(const Tensor& log_probs, const TokenSeq& target);

/// Per-frame argmax (ties to the lowest id), collapse repeats, drop blanks.
TokenSeq greedy_decode(const Tensor& log_probs);

/// Greedy decoding that carries the previous frame's symbol across calls, so
/// decoding a sequence in chunks equals decoding it whole.
class GreedyDecoder {
 public:
  explicit GreedyDecoder(std::size_t blank) : blank_(static_cast<int>(blank)) {}
  /// Returns the tokens emitted by these frames.
  TokenSeq push(const Tensor& log_probs);
  const TokenSeq& hypothesis() const { return hyp_; }

 private:
  int blank_;
  int prev_ = -1;
  TokenSeq hyp_;
};

}  // namespace ssa
