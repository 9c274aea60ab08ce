// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/cli.hpp"
#include "ssa/checkpoint.hpp"
#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"
#include "ssa/trainer.hpp"

namespace ssa::cli {

using nlohmann::json;

int run_train(const TrainOptions& o, std::ostream& out) {
  if (o.out.empty()) throw ContractError("train needs --out");
  if (!o.init.empty() && !o.model_config.empty()) {
    throw ContractError("--init already fixes the model config; drop --model-config");
  }
  TrainConfig cfg;
  if (!o.config.empty()) cfg = train_config_from_json(read_json_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  if (o.steps) cfg.steps = *o.steps;
  cfg.validate();

  ModelParams init;
  std::optional<std::string> init_hash;
  if (!o.init.empty()) {
    const std::string bytes = slurp(o.init);
    init_hash = sha256_hex(bytes);
    init = parse_checkpoint(bytes).params;
  } else {
    ModelConfig mc;
    if (!o.model_config.empty()) mc = model_config_from_json(read_json_file(o.model_config));
    init = ModelParams::init(mc, cfg.seed);
  }

  const json config{{"train", to_json(cfg)}, {"model", to_json(init.config())}};
  const json repro = reproducibility(cfg.seed, config, init_hash);

  Output log(o.log, out);
  TrainResult result = train(cfg, init, &log.stream());

  json history = json::array();
  for (const auto& c : result.checkpoints) {
    history.push_back({{"step", c.step}, {"val_cpwer_2mix", c.val_cpwer}, {"val_wer_1mix", c.val_wer_1mix}});
  }
  json selected = json::array();
  for (std::size_t i : select_checkpoints(result.checkpoints, cfg.top_k)) {
    selected.push_back(result.checkpoints[i].step);
  }
  const json meta{{"reproducibility", repro},
                  {"train_config", to_json(cfg)},
                  {"checkpoints", history},
                  {"averaged_steps", selected}};
  const std::string bytes = checkpoint_bytes(result.averaged, meta);
  {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw ContractError("cannot open '" + o.out + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ContractError("failed writing '" + o.out + "'");
  }
  log.stream() << json{{"event", "checkpoint"},
                       {"path", o.out},
                       {"checkpoint_hash", sha256_hex(bytes)},
                       {"averaged_steps", selected},
                       {"reproducibility", repro}}
                      .dump()
               << std::endl;
  return kOk;
}

}  // namespace ssa::cli
