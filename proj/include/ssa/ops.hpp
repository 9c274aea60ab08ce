// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives. The set is closed: exactly what the encoder,
// the injection module and the output head need. Shapes are checked eagerly
// and mismatches raise DimensionError naming both operands.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssa/tensor.hpp"

namespace ssa::ops {

/// [M,K]x[K,N], or batched [B,M,K]x[B,K,N] where either batch may be absent
/// (broadcast).
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);  // rank 2

/// Elementwise sum. `b` may also be a rank-1 bias matching a's last axis.
Tensor add(const Tensor& a, const Tensor& b);
/// Elementwise product. `b` may also have a's shape with the last axis
/// collapsed to 1, in which case it is broadcast along that axis.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

Tensor relu(const Tensor& a);
Tensor swish(const Tensor& a);

/// Softmax along `axis`. With `allowed` (same numel as `x`, row-major),
/// entries marked 0 receive probability exactly 0; every slice must keep at
/// least one allowed entry.
Tensor softmax(const Tensor& x, std::size_t axis,
               std::span<const std::uint8_t> allowed = {});
Tensor log_softmax(const Tensor& x);  // last axis

/// Normalises the last axis to zero mean and unit variance, then applies
/// `gain` and `bias` (both rank 1, size of the last axis).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

/// Valid-mode depthwise convolution: x [T+K-1, C], w [K, C] -> [T, C], with
/// y[t,c] = sum_j w[j,c] * x[t+j,c]. Causal use prepends K-1 history rows.
Tensor depthwise_conv1d(const Tensor& x, const Tensor& w);

/// Non-overlapping strided convolution: x [T, Cin], w [stride*Cin, Cout],
/// b [Cout] -> [T/stride, Cout]. Trailing frames that do not fill a window
/// are ignored.
Tensor strided_conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
                      std::size_t stride);

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

}  // namespace ssa::ops
