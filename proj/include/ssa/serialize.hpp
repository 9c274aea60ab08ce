// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of the configuration structs. Unknown keys are rejected so a
// typo in a config file cannot silently fall back to a default.

#pragma once

#include "json.hpp"
#include "ssa/mixsim.hpp"
#include "ssa/model.hpp"
#include "ssa/streaming.hpp"
#include "ssa/trainer.hpp"

namespace ssa {

nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const SimConfig& c);
nlohmann::json to_json(const TrainConfig& c);

/// Start from `base` and overwrite the keys present in `j`. Throws
/// ParseError on unknown keys or wrongly typed values.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});
SimConfig sim_config_from_json(const nlohmann::json& j, SimConfig base = {});
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
/// SHA-256 of the canonical (sorted-key, compact) JSON dump.
std::string json_hash(const nlohmann::json& j);

}  // namespace ssa
