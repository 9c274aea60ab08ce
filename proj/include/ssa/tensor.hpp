// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense double-precision tensors with tape-based reverse-mode autodiff.
//
// A Tensor is an immutable handle to a node holding its shape and row-major
// data. Operations executed while a Tape is active on the current thread, and
// whose inputs require gradients, are recorded on that tape; Tape::backward()
// replays them in reverse creation order (a valid reverse topological order)
// and accumulates gradients into a Gradients map. Without an active tape the
// same operations compute values only.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ssa {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);
std::size_t shape_numel(const Shape& shape);

class Tensor;
class Gradients;

namespace detail {

using BackwardFn =
    std::function<void(std::span<const double> out_grad, Gradients& grads)>;

struct Node {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  const char* op = "leaf";
  BackwardFn backward;  // empty for leaves and untracked results
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);

  bool defined() const noexcept { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const { return data().size(); }
  std::size_t rows() const;  // leading dim of a rank-2 tensor
  std::size_t cols() const;  // trailing dim of a rank-2 tensor

  std::span<const double> data() const;
  double operator[](std::size_t i) const { return data()[i]; }
  double at(std::size_t r, std::size_t c) const;
  double item() const;

  bool requires_grad() const noexcept { return node_ && node_->requires_grad; }
  const char* op() const { return node_ ? node_->op : "undefined"; }

  /// Same values, no gradient tracking.
  Tensor detach() const;

  /// Stable identity used to key gradients.
  const detail::Node* id() const noexcept { return node_.get(); }

  /// Creates the result of a primitive. When a tape is active and any of
  /// `inputs` requires grad, the node is recorded with `backward`; otherwise
  /// `backward` is dropped. Throws NumericError if `data` is not finite.
  static Tensor make_result(const char* op, Shape shape, std::vector<double> data,
                            std::initializer_list<const Tensor*> inputs,
                            detail::BackwardFn backward);
  /// Variadic-input form: `inputs_require_grad` is true when any input does.
  static Tensor make_result(const char* op, Shape shape, std::vector<double> data,
                            bool inputs_require_grad, detail::BackwardFn backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend class Tape;
};

/// Gradient accumulator keyed by tensor identity. Accumulation is additive so
/// a parameter used by several instances sums their contributions.
class Gradients {
 public:
  /// Zero-initialised on first access.
  std::vector<double>& slot(const Tensor& t);
  const std::vector<double>* find(const Tensor& t) const;
  void accumulate(const Tensor& t, std::span<const double> g);
  bool contains(const Tensor& t) const { return find(t) != nullptr; }
  std::size_t size() const { return map_.size(); }

 private:
  friend class Tape;
  std::unordered_map<const detail::Node*, std::vector<double>> map_;
};

/// Records primitive applications on the constructing thread until destroyed.
/// Tapes nest; the innermost one is active. A tape must not be shared across
/// threads.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Reverse pass from a scalar loss. Each recorded node is visited once.
  Gradients backward(const Tensor& loss) const;

  std::size_t size() const { return nodes_.size(); }
  /// Number of nodes whose backward ran during the last backward() call.
  std::size_t last_visited() const { return last_visited_; }

  static Tape* active();

 private:
  friend class Tensor;
  void record(std::shared_ptr<detail::Node> node);

  std::vector<std::shared_ptr<detail::Node>> nodes_;
  Tape* previous_ = nullptr;
  mutable std::size_t last_visited_ = 0;
};

}  // namespace ssa
