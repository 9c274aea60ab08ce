// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ssa/errors.hpp"
#include "ssa/trainer.hpp"

using namespace ssa;

namespace {

ModelParams scalar_params(double value) {
  ModelConfig c;
  c.d_in = 1;
  c.d_model = 1;
  c.n_blocks = 0;
  c.n_heads = 1;
  c.d_hidden_inj = 1;
  c.d_ff = 1;
  c.vocab_size = 1;
  c.subsample = 1;
  ModelParams p(c);
  p.set("w", Tensor({1}, {value}));
  return p;
}

Checkpoint ckpt(std::size_t step, double wer, double value) { return {step, wer, 0.0, scalar_params(value)}; }

ModelConfig small_model() {
  ModelConfig c;
  c.d_model = 16;
  c.n_blocks = 1;
  c.n_heads = 2;
  c.d_hidden_inj = 16;
  c.d_ff = 16;
  c.left_context = 16;
  return c;
}

TrainConfig small_run(std::size_t steps) {
  TrainConfig t;
  t.steps = steps;
  t.batch_size = 2;
  t.warmup_steps = 50;
  t.val_every = steps;
  t.ckpt_every = std::max<std::size_t>(1, steps / 4);
  t.log_every = 10;
  t.val_2mix = 4;
  t.val_1mix = 2;
  t.sim.max_tokens = 6;
  return t;
}

}  // namespace

TEST_CASE("noam schedule") {
  CHECK(noam_lr(100, 64, 100, 5.0) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(std::abs(noam_lr(400, 64, 400, 1.0) - 0.125 * std::pow(400.0, -0.5)) < 1e-15);
  CHECK_THROWS_AS(noam_lr(0, 64, 100, 5.0), ContractError);
  for (std::size_t s = 1; s < 100; ++s) CHECK(noam_lr(s, 64, 100, 5.0) < noam_lr(s + 1, 64, 100, 5.0));
  for (std::size_t s = 100; s < 300; ++s) CHECK(noam_lr(s, 64, 100, 5.0) > noam_lr(s + 1, 64, 100, 5.0));
}

TEST_CASE("adamw examples") {
  SUBCASE("zero gradients without decay leave parameters unchanged") {
    ModelParams p = scalar_params(0.7);
    OptimizerState st;
    adamw_step(p, {{"w", {0.0}}}, st, {0.1, 0.0, 0.9, 0.999, 1e-8});
    CHECK(p.get("w")[0] == 0.7);
    CHECK(st.step == 1);
  }
  SUBCASE("first step moves by lr") {
    ModelParams p = scalar_params(0.0);
    OptimizerState st;
    adamw_step(p, {{"w", {1.0}}}, st, {0.1, 0.0, 0.9, 0.999, 1e-8});
    CHECK(std::abs(p.get("w")[0] + 0.1) < 1e-8);
  }
  SUBCASE("decay is decoupled from the gradient") {
    ModelParams p = scalar_params(2.0);
    OptimizerState st;
    adamw_step(p, {}, st, {0.1, 0.01, 0.9, 0.999, 1e-8});
    CHECK(p.get("w")[0] == doctest::Approx(2.0 * (1 - 0.1 * 0.01)).epsilon(1e-15));
  }
  SUBCASE("shape mismatch") {
    ModelParams p = scalar_params(2.0);
    OptimizerState st;
    CHECK_THROWS_AS(adamw_step(p, {{"w", {1.0, 2.0}}}, st, {}), ContractError);
    CHECK_THROWS_AS(adamw_step(p, {{"nope", {1.0}}}, st, {}), ContractError);
  }
}

TEST_CASE("adamw without decay follows the closed-form Adam trajectory") {
  const double lr = 0.05, b1 = 0.8, b2 = 0.95, eps = 1e-6;
  const double grads[3] = {0.5, -2.0, 1.5};
  ModelParams p = scalar_params(1.0);
  OptimizerState st;
  double theta = 1.0;
  for (int t = 1; t <= 3; ++t) {
    adamw_step(p, {{"w", {grads[t - 1]}}}, st, {lr, 0.0, b1, b2, eps});
    // m_t and v_t written as explicit weighted sums of the gradient history.
    double m = 0.0, v = 0.0;
    for (int i = 1; i <= t; ++i) {
      m += (1 - b1) * std::pow(b1, t - i) * grads[i - 1];
      v += (1 - b2) * std::pow(b2, t - i) * grads[i - 1] * grads[i - 1];
    }
    theta -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    CHECK(std::abs(p.get("w")[0] - theta) < 1e-14);
  }
}

TEST_CASE("sample_target") {
  const auto pool = make_speaker_pool(SimConfig{});
  std::mt19937_64 rng(1);
  const MixtureSample one = sample_mixture(rng, {1, 0, 0}, pool, SimConfig{});
  for (int i = 0; i < 100; ++i) CHECK(sample_target(rng, one) == 0);

  const MixtureSample three = sample_mixture(rng, {0, 0, 1}, pool, SimConfig{});
  std::size_t counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[sample_target(rng, three)];
  double x2 = 0.0;
  for (auto c : counts) x2 += std::pow(static_cast<double>(c) - 10000.0, 2) / 10000.0;
  CHECK(x2 < 9.2103);

  std::mt19937_64 a(77), b(77);
  CHECK(sample_target(a, three) == sample_target(b, three));
  CHECK_THROWS_AS(sample_target(rng, MixtureSample{}), ContractError);
}

TEST_CASE("training examples pair activity and transcript of one speaker") {
  const auto pool = make_speaker_pool(SimConfig{});
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const MixtureSample m = sample_mixture(rng, {1, 3, 6}, pool, SimConfig{});
    const TrainingExample ex = make_example(rng, m, 0.0);
    CHECK(ex.target == m.references[ex.slot]);
    CHECK(ex.activity == m.activities[ex.slot]);
    const TrainingExample noisy = make_example(rng, m, 0.3);
    CHECK(noisy.target == m.references[noisy.slot]);
  }
}

TEST_CASE("checkpoint averaging") {
  SUBCASE("identical checkpoints") {
    std::vector<Checkpoint> c;
    for (std::size_t i = 0; i < 5; ++i) c.push_back(ckpt(i, 0.1, 0.3));
    CHECK(average_checkpoints(c).get("w")[0] == 0.3);
  }
  SUBCASE("arithmetic mean") {
    CHECK(average_checkpoints({ckpt(1, 0.2, 1.0), ckpt(2, 0.3, 3.0)}).get("w")[0] == 2.0);
  }
  SUBCASE("seven checkpoints keep the five lowest") {
    const double wers[7] = {0.5, 0.1, 0.7, 0.2, 0.3, 0.9, 0.4};
    std::vector<Checkpoint> c;
    for (std::size_t i = 0; i < 7; ++i) c.push_back(ckpt(i + 1, wers[i], static_cast<double>(i)));
    auto chosen = select_checkpoints(c);
    std::sort(chosen.begin(), chosen.end());
    CHECK(chosen == std::vector<std::size_t>{0, 1, 3, 4, 6});
    CHECK(average_checkpoints(c).get("w")[0] == doctest::Approx((0 + 1 + 3 + 4 + 6) / 5.0));
  }
  SUBCASE("ties go to the later step") {
    std::vector<Checkpoint> c{ckpt(10, 0.2, 1.0), ckpt(30, 0.2, 3.0), ckpt(20, 0.2, 2.0)};
    CHECK(select_checkpoints(c, 1) == std::vector<std::size_t>{1});
    CHECK(select_checkpoints(c, 2) == std::vector<std::size_t>{1, 2});
  }
  SUBCASE("mismatched parameter sets") {
    CHECK_THROWS_AS(average_checkpoints({}), ContractError);
    Checkpoint other{2, 0.1, 0.0, ModelParams::init(ModelConfig{}, 1)};
    CHECK_THROWS_AS(average_checkpoints({ckpt(1, 0.1, 1.0), other}), ContractError);
  }
}

TEST_CASE("training is deterministic and logs JSON lines") {
  const ModelParams init = ModelParams::init(small_model(), 4);
  const TrainConfig cfg = small_run(12);
  std::ostringstream log_a, log_b;
  const TrainResult a = train(cfg, init, &log_a);
  const TrainResult b = train(cfg, init, &log_b);
  CHECK(a.losses == b.losses);
  CHECK(log_a.str() == log_b.str());
  for (const auto& [name, t] : a.averaged.tensors()) {
    const auto u = b.averaged.get(name).data();
    CHECK(std::equal(t.data().begin(), t.data().end(), u.begin()));
  }
  std::istringstream lines(log_a.str());
  std::string line;
  bool saw_step = false, saw_val = false;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    if (j["event"] == "step") {
      saw_step = true;
      CHECK(j.contains("loss"));
      CHECK(j.contains("lr"));
      CHECK(j.contains("grad_norm"));
    }
    if (j["event"] == "validation") saw_val = j.contains("val_cpwer_2mix") && j.contains("val_wer_1mix");
  }
  CHECK(saw_step);
  CHECK(saw_val);
  CHECK(a.checkpoints.size() == 4);
}

TEST_CASE("a short run lowers the loss and follows the mix ratios") {
  const ModelParams init = ModelParams::init(small_model(), 5);
  TrainConfig cfg = small_run(300);
  cfg.batch_size = 4;
  const TrainResult r = train(cfg, init);
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < 30; ++i) first += r.losses[i], last += r.losses[r.losses.size() - 1 - i];
  CHECK(last < first);
  double x2 = 0.0;
  const double n = static_cast<double>(cfg.steps * cfg.batch_size);
  const double p[3] = {0.1, 0.3, 0.6};
  for (int k = 0; k < 3; ++k) x2 += std::pow(static_cast<double>(r.k_counts[k]) - n * p[k], 2) / (n * p[k]);
  CHECK(x2 < 9.2103);
}

TEST_CASE("divergence aborts with a diagnostic") {
  const ModelParams init = ModelParams::init(small_model(), 6);
  TrainConfig cfg = small_run(40);
  cfg.lr_coeff = 1e200;
  cfg.warmup_steps = 1;
  cfg.clip_norm = 0.0;
  try {
    train(cfg, init);
    FAIL("expected divergence");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("step") != std::string::npos);
    CHECK(msg.find("lr") != std::string::npos);
    CHECK(msg.find("grad-norm") != std::string::npos);
  }
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.steps = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = TrainConfig{};
  c.warmup_steps = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  const ModelParams mismatched = ModelParams::init(ModelConfig{.d_in = 8}, 1);
  CHECK_THROWS_AS(train(small_run(2), mismatched), ConfigMismatchError);
}
