// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint container (layout in docs/formats.md):
//   "SSACKPT1" | u32 version | u64 n + ModelConfig JSON | u64 n + metadata JSON
//   | u32 count | count x (u32 n + name | u32 rank | u64 dims[rank] | f64 data)
// All integers and doubles little-endian; arrays in name order.

#pragma once

#include <string>

#include "json.hpp"
#include "ssa/model.hpp"

namespace ssa {

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string checkpoint_bytes(const ModelParams& params, const nlohmann::json& meta = nlohmann::json::object());
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const nlohmann::json& meta = nlohmann::json::object());

struct LoadedCheckpoint {
  ModelParams params;
  nlohmann::json meta;
};
/// Throws ParseError on a bad magic, unknown version, truncation or arrays
/// that do not match the stored config.
LoadedCheckpoint parse_checkpoint(const std::string& bytes);
LoadedCheckpoint load_checkpoint(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace ssa
