// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0
//
// Text formats shared by the CLI: RTTM, transcript JSON lines and the
// mixture manifest. Layouts are documented in docs/formats.md.

#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ssa/metrics.hpp"
#include "ssa/mixsim.hpp"

namespace ssa {

inline constexpr const char* kManifestSchema = "ssa-manifest/1";
inline constexpr const char* kTranscriptSchema = "ssa-transcript/1";

/// SPEAKER lines grouped by file id, in file order. Other record types,
/// blank lines and '#' comments are skipped. ParseError names the line.
std::map<std::string, SegmentSet> read_rttm(std::istream& in, const std::string& source = "rttm");
void write_rttm(std::ostream& out, const std::string& file_id, const SegmentSet& segments);

/// Frame t is active when its centre (t + 0.5) * frame_ms falls inside a
/// segment.
ActivitySeq segments_to_activity(const SegmentSet& segments, std::size_t frames, double frame_ms);

struct TranscriptRecord {
  std::string id;
  std::vector<SpeakerWords> speakers;
};

/// One JSON object per line: {"id", "speakers": [{"speaker", "words" | "text",
/// "timestamps"?}]}. Words pass through normalize_word; empties are dropped.
std::vector<TranscriptRecord> read_transcripts(std::istream& in, const std::string& source = "transcripts");
nlohmann::json transcript_json(const TranscriptRecord& rec);

struct ManifestRecord {
  std::string id;
  MixtureSample sample;
  nlohmann::json provenance;  // free-form, e.g. seeds and config hash
};

nlohmann::json manifest_json(const ManifestRecord& rec);
std::vector<ManifestRecord> read_manifest(std::istream& in, const std::string& source = "manifest");

/// Reference transcripts of a manifest record keyed "spk<speaker id>".
TranscriptRecord reference_transcript(const ManifestRecord& rec);
/// RTTM segments of every activity stream, labelled "spk<speaker id>".
SegmentSet reference_segments(const ManifestRecord& rec);

}  // namespace ssa
