// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "ssa/errors.hpp"
#include "ssa/ops.hpp"
#include "support/gradcheck.hpp"

using namespace ssa;
using ssa::testing::grad_check;
using ssa::testing::random_tensor;
using ssa::testing::weighted_sum;

TEST_CASE("matmul examples") {
  const Tensor eye({2, 2}, {1, 0, 0, 1});
  const Tensor m({2, 2}, {3, 4, 5, 6});
  const Tensor r = ops::matmul(eye, m);
  CHECK(std::vector<double>(r.data().begin(), r.data().end()) == std::vector<double>{3, 4, 5, 6});

  const Tensor z = ops::matmul(Tensor::zeros({3, 2}), m);
  for (double v : z.data()) CHECK(v == 0.0);

  const Tensor c = ops::matmul(Tensor({2, 2}, {1, 2, 3, 4}), Tensor({2, 1}, {5, 6}));
  CHECK(c.shape() == Shape{2, 1});
  CHECK(c[0] == 17.0);
  CHECK(c[1] == 39.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  try {
    ops::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("[2,3]") != std::string::npos);
    CHECK(msg.find("and [2,3]") != std::string::npos);
  }
}

TEST_CASE("batched matmul broadcasts a rank-2 operand") {
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor({3, 2, 4}, rng);
  const Tensor b = random_tensor({4, 5}, rng);
  const Tensor c = ops::matmul(a, b);
  REQUIRE(c.shape() == Shape{3, 2, 5});
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor ai({2, 4}, std::vector<double>(a.data().begin() + i * 8, a.data().begin() + (i + 1) * 8));
    const Tensor ci = ops::matmul(ai, b);
    for (std::size_t j = 0; j < 10; ++j) CHECK(c[i * 10 + j] == doctest::Approx(ci[j]).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ops::matmul(random_tensor({3, 2, 4}, rng), random_tensor({2, 4, 5}, rng)),
                  DimensionError);
}

TEST_CASE("softmax examples") {
  const Tensor u = ops::softmax(Tensor({1, 4}, {2, 2, 2, 2}), 1);
  for (double v : u.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  const Tensor peak = ops::softmax(Tensor({1, 3}, {50, 0, 0}), 1);
  CHECK(peak[0] > 1.0 - 1e-9);

  const Tensor two = ops::softmax(Tensor({1, 2}, {0, std::log(3.0)}), 1);
  CHECK(std::abs(two[0] - 0.25) < 1e-15);
  CHECK(std::abs(two[1] - 0.75) < 1e-15);
}

TEST_CASE("softmax slices sum to one along any axis") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = random_tensor({3, 4, 5}, rng, -20, 20);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const Tensor y = ops::softmax(x, axis);
      const auto& s = x.shape();
      std::size_t outer = 1, inner = 1;
      for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
      for (std::size_t i = axis + 1; i < 3; ++i) inner *= s[i];
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t in = 0; in < inner; ++in) {
          double total = 0.0;
          for (std::size_t j = 0; j < s[axis]; ++j) total += y[o * s[axis] * inner + j * inner + in];
          CHECK(std::abs(total - 1.0) < 1e-12);
        }
    }
  }
}

TEST_CASE("masked softmax zeroes disallowed entries") {
  const std::vector<std::uint8_t> mask = {1, 0, 1, 0, 1, 1};
  const Tensor y = ops::softmax(Tensor({2, 3}, {1, 9, 1, 5, 0, 0}), 1, mask);
  CHECK(y[1] == 0.0);
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[3] == 0.0);
  CHECK(y[4] == doctest::Approx(0.5));
  const std::vector<std::uint8_t> none = {0, 0, 0, 1, 1, 1};
  CHECK_THROWS_AS(ops::softmax(Tensor::zeros({2, 3}), 1, none), ContractError);
}

TEST_CASE("non-finite values are an error state") {
  CHECK_THROWS_AS(Tensor({1}, {std::nan("")}), NumericError);
  CHECK_THROWS_AS(Tensor({1}, {INFINITY}), NumericError);
  const Tensor big({1}, {1e300});
  CHECK_THROWS_AS(ops::scale(big, 1e300), NumericError);
}

TEST_CASE("layer_norm examples") {
  const Tensor g = Tensor::full({4}, 1.0);
  const Tensor b = Tensor::zeros({4});
  const Tensor c = ops::layer_norm(Tensor({1, 4}, {3, 3, 3, 3}), g, b);
  for (double v : c.data()) CHECK(v == 0.0);

  const Tensor pm = ops::layer_norm(Tensor({1, 2}, {1, -1}), Tensor::full({2}, 1.0),
                                    Tensor::zeros({2}), 1e-12);
  CHECK(std::abs(pm[0] - 1.0) < 1e-11);
  CHECK(std::abs(pm[1] + 1.0) < 1e-11);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor x = random_tensor({3, 4}, rng, -5, 5);
    const double shift = std::uniform_real_distribution<double>(-100, 100)(rng);
    std::vector<double> shifted(x.data().begin(), x.data().end());
    for (double& v : shifted) v += shift;
    const Tensor a = ops::layer_norm(x, g, b);
    const Tensor s = ops::layer_norm(Tensor({3, 4}, shifted), g, b);
    for (std::size_t i = 0; i < a.numel(); ++i) CHECK(std::abs(a[i] - s[i]) < 1e-9);
    for (std::size_t r = 0; r < 3; ++r) {
      double m = 0.0;
      for (std::size_t j = 0; j < 4; ++j) m += a[r * 4 + j];
      CHECK(std::abs(m / 4.0) < 1e-9);
    }
  }
}

TEST_CASE("backward examples") {
  {
    Tape tape;
    const Tensor x({3}, {1, 2, 3}, true);
    const Gradients g = tape.backward(ops::sum(x));
    for (double v : *g.find(x)) CHECK(v == 1.0);
  }
  {
    Tape tape;
    const Tensor x({1}, {3.0}, true);
    const Gradients g = tape.backward(ops::mul(x, x));
    CHECK((*g.find(x))[0] == 6.0);
  }
  {
    Tape tape;
    const Tensor x({2}, {1, 2}, true);
    const Tensor y = ops::scale(x, 2.0);
    CHECK_THROWS_AS(tape.backward(y), ContractError);
  }
  {
    Tape tape;
    const Tensor x({1}, {1.0}, true);
    CHECK_THROWS_AS(tape.backward(x), ContractError);
  }
}

TEST_CASE("tape visits each contributing node once in reverse order") {
  Tape tape;
  const Tensor x({2}, {0.5, -1.5}, true);
  const Tensor sq = ops::mul(x, x);
  const Tensor y = ops::add(sq, x);            // x used twice (diamond)
  const Tensor unused = ops::scale(x, 10.0);   // recorded but off the loss path
  const Tensor loss = ops::sum(y);
  const Gradients g = tape.backward(loss);
  CHECK(tape.size() == 4);
  CHECK(tape.last_visited() == 3);
  CHECK((*g.find(x))[0] == doctest::Approx(2 * 0.5 + 1));
  CHECK((*g.find(x))[1] == doctest::Approx(2 * -1.5 + 1));
  CHECK_FALSE(g.contains(unused));
}

TEST_CASE("gradients accumulate across shared uses") {
  Tape tape;
  const Tensor w({1}, {2.0}, true);
  const Tensor a = ops::scale(w, 3.0);
  const Tensor b = ops::scale(w, 4.0);
  const Gradients g = tape.backward(ops::sum(ops::add(a, b)));
  CHECK((*g.find(w))[0] == 7.0);
}

TEST_CASE("ops without an active tape do not track") {
  const Tensor x({2}, {1, 2}, true);
  const Tensor y = ops::scale(x, 2.0);
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("primitive gradients agree with central differences") {
  std::mt19937_64 rng(11);
  const double tol = 1e-4;
  for (int trial = 0; trial < 5; ++trial) {
    const std::uint64_t s = 100 + static_cast<std::uint64_t>(trial);
    SUBCASE("matmul") {
      auto r = grad_check([&](const auto& in) { return weighted_sum(ops::matmul(in[0], in[1]), s); },
                          {random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)});
      CHECK(r.max_rel_error < tol);
      auto rb = grad_check([&](const auto& in) { return weighted_sum(ops::matmul(in[0], in[1]), s); },
                           {random_tensor({2, 3, 4}, rng), random_tensor({4, 2}, rng)});
      CHECK(rb.max_rel_error < tol);
    }
    SUBCASE("add and bias") {
      auto r = grad_check([&](const auto& in) { return weighted_sum(ops::add(in[0], in[1]), s); },
                          {random_tensor({3, 4}, rng), random_tensor({3, 4}, rng)});
      CHECK(r.max_rel_error < tol);
      auto rb = grad_check([&](const auto& in) { return weighted_sum(ops::add(in[0], in[1]), s); },
                           {random_tensor({3, 4}, rng), random_tensor({4}, rng)});
      CHECK(rb.max_rel_error < tol);
    }
    SUBCASE("mul and column broadcast") {
      auto r = grad_check([&](const auto& in) { return weighted_sum(ops::mul(in[0], in[1]), s); },
                          {random_tensor({3, 4}, rng), random_tensor({3, 4}, rng)});
      CHECK(r.max_rel_error < tol);
      auto rb = grad_check([&](const auto& in) { return weighted_sum(ops::mul(in[0], in[1]), s); },
                           {random_tensor({3, 4}, rng), random_tensor({3, 1}, rng)});
      CHECK(rb.max_rel_error < tol);
    }
    SUBCASE("relu and swish") {
      auto r = grad_check([&](const auto& in) { return weighted_sum(ops::relu(in[0]), s); },
                          {ssa::testing::random_tensor_off_zero({4, 5}, rng)});
      CHECK(r.max_rel_error < tol);
      auto w = grad_check([&](const auto& in) { return weighted_sum(ops::swish(in[0]), s); },
                          {random_tensor({4, 5}, rng, -4, 4)});
      CHECK(w.max_rel_error < tol);
    }
    SUBCASE("softmax and log_softmax") {
      for (std::size_t axis = 0; axis < 2; ++axis) {
        auto r = grad_check([&](const auto& in) { return weighted_sum(ops::softmax(in[0], axis), s); },
                            {random_tensor({3, 5}, rng, -3, 3)});
        CHECK(r.max_rel_error < tol);
      }
      const std::vector<std::uint8_t> mask = {1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 1, 1};
      auto m = grad_check([&](const auto& in) { return weighted_sum(ops::softmax(in[0], 1, mask), s); },
                          {random_tensor({3, 4}, rng, -3, 3)});
      CHECK(m.max_rel_error < tol);
      auto l = grad_check([&](const auto& in) { return weighted_sum(ops::log_softmax(in[0]), s); },
                          {random_tensor({3, 5}, rng, -3, 3)});
      CHECK(l.max_rel_error < tol);
    }
    SUBCASE("layer_norm") {
      auto r = grad_check(
          [&](const auto& in) { return weighted_sum(ops::layer_norm(in[0], in[1], in[2]), s); },
          {random_tensor({3, 6}, rng, -2, 2), random_tensor({6}, rng), random_tensor({6}, rng)});
      CHECK(r.max_rel_error < tol);
    }
    SUBCASE("depthwise and strided convolutions") {
      auto d = grad_check([&](const auto& in) { return weighted_sum(ops::depthwise_conv1d(in[0], in[1]), s); },
                          {random_tensor({7, 3}, rng), random_tensor({3, 3}, rng)});
      CHECK(d.max_rel_error < tol);
      auto st = grad_check(
          [&](const auto& in) { return weighted_sum(ops::strided_conv1d(in[0], in[1], in[2], 2), s); },
          {random_tensor({9, 3}, rng), random_tensor({6, 4}, rng), random_tensor({4}, rng)});
      CHECK(st.max_rel_error < tol);
    }
    SUBCASE("slicing, concatenation, transpose") {
      auto r = grad_check(
          [&](const auto& in) {
            const Tensor a = ops::slice_cols(in[0], 1, 2);
            const Tensor b = ops::slice_rows(in[1], 1, 3);
            const Tensor rows[] = {a, b};
            const Tensor cat = ops::transpose(ops::concat_rows(rows));
            const Tensor cols[] = {cat, cat};
            return weighted_sum(ops::concat_cols(cols), s);
          },
          {random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)});
      CHECK(r.max_rel_error < tol);
    }
  }
}

TEST_CASE("identical inputs give bit-identical outputs") {
  auto run = [] {
    std::mt19937_64 rng(42);
    const Tensor x = random_tensor({5, 8}, rng);
    const Tensor w = random_tensor({8, 8}, rng);
    return ops::softmax(ops::layer_norm(ops::matmul(x, w), Tensor::full({8}, 1.0), Tensor::zeros({8})), 1);
  };
  const Tensor a = run();
  const Tensor b = run();
  for (std::size_t i = 0; i < a.numel(); ++i) CHECK(a[i] == b[i]);
}
