// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central finite-difference oracle for reverse-mode gradients. Uses only the
// forward values of the function under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "ssa/ops.hpp"
#include "ssa/tensor.hpp"

namespace ssa::testing {

using ScalarFn = std::function<Tensor(const std::vector<Tensor>&)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Relative error |a-n| / max(|a|, |n|, 1e-6 * max(1, |f|)). The floor keeps
/// coordinates with vanishing gradient from amplifying round-off in f.
inline GradCheckResult grad_check(const ScalarFn& f, const std::vector<Tensor>& inputs,
                                  double h = 1e-5, std::size_t max_coords_per_input = 0,
                                  std::uint64_t seed = 7) {
  std::vector<Tensor> leaves;
  for (const auto& t : inputs) {
    leaves.emplace_back(t.shape(), std::vector<double>(t.data().begin(), t.data().end()), true);
  }
  std::vector<std::vector<double>> analytic;
  double f0 = 0.0;
  {
    Tape tape;
    Tensor loss = f(leaves);
    f0 = loss.item();
    Gradients g = tape.backward(loss);
    for (const auto& l : leaves) {
      const auto* v = g.find(l);
      analytic.push_back(v ? *v : std::vector<double>(l.numel(), 0.0));
    }
  }
  const double floor = 1e-6 * std::max(1.0, std::abs(f0));
  std::mt19937_64 rng(seed);
  GradCheckResult res;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    std::vector<std::size_t> coords(inputs[i].numel());
    for (std::size_t c = 0; c < coords.size(); ++c) coords[c] = c;
    if (max_coords_per_input > 0 && coords.size() > max_coords_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(max_coords_per_input);
    }
    for (std::size_t c : coords) {
      auto eval = [&](double delta) {
        std::vector<Tensor> probe;
        for (std::size_t j = 0; j < inputs.size(); ++j) {
          std::vector<double> v(inputs[j].data().begin(), inputs[j].data().end());
          if (j == i) v[c] += delta;
          probe.emplace_back(inputs[j].shape(), std::move(v));
        }
        return f(probe).item();
      };
      const double numeric = (eval(h) - eval(-h)) / (2.0 * h);
      const double a = analytic[i][c];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      res.max_rel_error = std::max(res.max_rel_error, std::abs(a - numeric) / denom);
      ++res.checked;
    }
  }
  return res;
}

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = dist(rng);
  return Tensor(std::move(shape), std::move(v));
}

/// Values bounded away from zero, for kinked primitives such as ReLU.
inline Tensor random_tensor_off_zero(Shape shape, std::mt19937_64& rng, double margin = 0.05) {
  std::uniform_real_distribution<double> mag(margin, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(shape_numel(shape));
  for (double& x : v) x = sign(rng) ? mag(rng) : -mag(rng);
  return Tensor(std::move(shape), std::move(v));
}

/// Reduces an arbitrary output to a scalar with fixed random weights so every
/// output coordinate contributes to the gradient.
inline Tensor weighted_sum(const Tensor& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return ops::sum(ops::mul(out, random_tensor(out.shape(), rng)));
}

}  // namespace ssa::testing
