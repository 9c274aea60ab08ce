// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli/common.hpp"

#include <cstdio>
#include <sstream>

#include "ssa/checkpoint.hpp"
#include "ssa/errors.hpp"
#include "ssa/mixsim.hpp"
#include "ssa/serialize.hpp"

namespace ssa::cli {

using nlohmann::json;

Output::Output(const std::string& path, std::ostream& fallback) : fallback_(&fallback) {
  if (path.empty() || path == "-") return;
  file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*file_) throw ContractError("cannot open '" + path + "' for writing");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(slurp(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<ManifestRecord> load_manifest(const std::string& path) {
  std::istringstream in(slurp(path));
  return read_manifest(in, path);
}

json reproducibility(std::optional<std::uint64_t> seed, const json& config,
                     std::optional<std::string> checkpoint_hash) {
  json r;
  r["seed"] = seed ? json(*seed) : json(nullptr);
  r["config_hash"] = json_hash(config);
  r["checkpoint_hash"] = checkpoint_hash ? json(*checkpoint_hash) : json(nullptr);
  return r;
}

void ActivityOptions::validate() const {
  if (source == "rttm" && rttm_path.empty()) throw ContractError("--activity rttm needs --rttm");
  if (source != "rttm" && !rttm_path.empty()) throw ContractError("--rttm given without --activity rttm");
  if (source == "degraded" && (severity < 0.0 || severity > 1.0)) {
    throw ContractError("--severity must lie in [0, 1]");
  }
  if (source != "degraded" && severity != 0.0) throw ContractError("--severity needs --activity degraded");
}

json ActivityOptions::to_json() const {
  json j{{"source", source}};
  if (source == "rttm") j["rttm"] = rttm_path;
  if (source == "degraded") {
    j["severity"] = severity;
    j["seed"] = seed;
  }
  return j;
}

ActivityResolver::ActivityResolver(ActivityOptions opt) : opt_(std::move(opt)) {
  opt_.validate();
  if (opt_.source == "rttm") {
    std::istringstream in(slurp(opt_.rttm_path));
    rttm_ = read_rttm(in, opt_.rttm_path);
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::size_t index, std::size_t slot) {
  // splitmix64 finaliser over a packed (seed, index, slot) word.
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + index * 8 + slot + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ActivitySeq> ActivityResolver::resolve(const ManifestRecord& rec, std::size_t index,
                                                   std::string* error) const {
  const MixtureSample& s = rec.sample;
  const std::size_t frames = s.features.frames();
  const double frame_ms = s.features.frame_ms;
  std::vector<ActivitySeq> out;
  for (std::size_t j = 0; j < s.k(); ++j) {
    const std::string label = "spk" + std::to_string(s.speaker_ids[j]);
    if (opt_.source == "ones") {
      out.push_back(ActivitySeq::ones(frames, frame_ms));
    } else if (opt_.source == "zeros") {
      out.push_back(ActivitySeq::zeros(frames, frame_ms));
    } else if (opt_.source == "rttm") {
      auto it = rttm_.find(rec.id);
      if (it == rttm_.end()) {
        *error = "no RTTM segments for file '" + rec.id + "'";
        return {};
      }
      SegmentSet mine;
      for (const auto& seg : it->second) {
        if (seg.speaker == label) mine.push_back(seg);
      }
      if (mine.empty()) {
        *error = "no RTTM segments for speaker '" + label + "'";
        return {};
      }
      out.push_back(segments_to_activity(mine, frames, frame_ms));
    } else {
      if (j >= s.activities.size()) {
        *error = "manifest has no activity for speaker '" + label + "'";
        return {};
      }
      if (opt_.source == "degraded") {
        out.push_back(degrade_activity(s.activities[j], opt_.severity, mix_seed(opt_.seed, index, j)));
      } else {
        out.push_back(s.activities[j]);
      }
    }
  }
  return out;
}

json counts_json(const ErrorCounts& c) {
  json j{{"substitutions", c.substitutions},
         {"deletions", c.deletions},
         {"insertions", c.insertions},
         {"errors", c.errors()},
         {"ref_words", c.ref_words}};
  j["rate"] = c.ref_words == 0 ? json(nullptr) : json(c.rate());
  return j;
}

std::string format_rate(const ErrorCounts& c) {
  if (c.ref_words == 0) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * c.rate());
  return buf;
}

void print_table(std::ostream& out, const std::vector<TableRow>& rows) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-9s %-14s %-4s %7s %7s %6s %6s %6s %8s\n", "mode", "activity", "k",
                "samples", "words", "sub", "del", "ins", "cpWER%");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-9s %-14s %-4s %7zu %7zu %6zu %6zu %6zu %8s\n", r.mode.c_str(),
                  r.activity.c_str(), r.k.c_str(), r.samples, r.counts.ref_words,
                  r.counts.substitutions, r.counts.deletions, r.counts.insertions,
                  format_rate(r.counts).c_str());
    out << buf;
  }
}

ModelParams without_injection(const ModelParams& params) {
  ModelParams p = params.frozen();
  p.set("inj.w2", Tensor::zeros(params.get("inj.w2").shape()));
  if (p.has("inj.b2")) p.set("inj.b2", Tensor::zeros(params.get("inj.b2").shape()));
  return p;
}

}  // namespace ssa::cli
