// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ssa/errors.hpp"

namespace ssa {

namespace {
thread_local Tape* g_active_tape = nullptr;
}  // namespace

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (shape_numel(shape) != data.size()) {
    throw DimensionError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape));
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw NumericError("non-finite value in tensor data");
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  node_ = std::move(node);
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  std::vector<double> data(shape_numel(shape), 0.0);
  return Tensor(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::full(Shape shape, double value) {
  std::vector<double> data(shape_numel(shape), value);
  return Tensor(std::move(shape), std::move(data));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

const Shape& Tensor::shape() const {
  if (!node_) throw StateError("use of undefined tensor");
  return node_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for " +
                         shape_str(s));
  }
  return s[axis];
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw DimensionError("expected rank-2 tensor, got " + shape_str(shape()));
  return shape()[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw DimensionError("expected rank-2 tensor, got " + shape_str(shape()));
  return shape()[1];
}

std::span<const double> Tensor::data() const {
  if (!node_) throw StateError("use of undefined tensor");
  return node_->data;
}

double Tensor::at(std::size_t r, std::size_t c) const { return data()[r * cols() + c]; }

double Tensor::item() const {
  if (numel() != 1) {
    throw DimensionError("item() on non-scalar tensor " + shape_str(shape()));
  }
  return data()[0];
}

Tensor Tensor::detach() const {
  auto node = std::make_shared<detail::Node>();
  node->shape = shape();
  node->data = node_->data;
  return Tensor(std::move(node));
}

Tensor Tensor::make_result(const char* op, Shape shape, std::vector<double> data,
                           std::initializer_list<const Tensor*> inputs,
                           detail::BackwardFn backward) {
  bool any = false;
  for (const Tensor* in : inputs) any = any || in->requires_grad();
  return make_result(op, std::move(shape), std::move(data), any, std::move(backward));
}

Tensor Tensor::make_result(const char* op, Shape shape, std::vector<double> data,
                           bool inputs_require_grad, detail::BackwardFn backward) {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite output from ") + op);
    }
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->op = op;
  Tape* tape = Tape::active();
  if (tape != nullptr && inputs_require_grad) {
    node->requires_grad = true;
    node->backward = std::move(backward);
    tape->record(node);
  }
  return Tensor(std::move(node));
}

std::vector<double>& Gradients::slot(const Tensor& t) {
  auto [it, inserted] = map_.try_emplace(t.id());
  if (inserted) it->second.assign(t.numel(), 0.0);
  return it->second;
}

const std::vector<double>* Gradients::find(const Tensor& t) const {
  auto it = map_.find(t.id());
  return it == map_.end() ? nullptr : &it->second;
}

void Gradients::accumulate(const Tensor& t, std::span<const double> g) {
  auto& dst = slot(t);
  if (dst.size() != g.size()) {
    throw DimensionError("gradient size mismatch for " + shape_str(t.shape()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

Tape::Tape() : previous_(g_active_tape) { g_active_tape = this; }

Tape::~Tape() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::record(std::shared_ptr<detail::Node> node) { nodes_.push_back(std::move(node)); }

Gradients Tape::backward(const Tensor& loss) const {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward() needs a scalar loss, got " +
                        (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
  }
  if (nodes_.empty()) throw ContractError("backward() on an empty tape");
  if (!loss.requires_grad()) {
    throw ContractError("loss does not depend on any tensor requiring grad");
  }
  Gradients grads;
  grads.slot(loss)[0] = 1.0;
  last_visited_ = 0;
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    const detail::Node* node = it->get();
    auto found = grads.map_.find(node);
    if (found == grads.map_.end()) continue;
    ++last_visited_;
    // References into an unordered_map survive the insertions made below.
    node->backward(found->second, grads);
  }
  return grads;
}

}  // namespace ssa
