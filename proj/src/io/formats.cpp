// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/formats.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ssa/errors.hpp"

namespace ssa {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

double parse_number(const std::string& s, const std::string& source, std::size_t line, const char* field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) fail(source, line, std::string("bad ") + field + " '" + s + "'");
  return v;
}

std::string speaker_label(const MixtureSample& s, std::size_t i) {
  return "spk" + std::to_string(i < s.speaker_ids.size() ? s.speaker_ids[i] : static_cast<int>(i));
}

}  // namespace

std::map<std::string, SegmentSet> read_rttm(std::istream& in, const std::string& source) {
  std::map<std::string, SegmentSet> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::istringstream ls(text);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty() || f[0][0] == '#') continue;
    if (f[0] != "SPEAKER") continue;
    if (f.size() < 8) fail(source, line, "SPEAKER record needs at least 8 fields");
    const double onset = parse_number(f[3], source, line, "onset");
    const double dur = parse_number(f[4], source, line, "duration");
    if (onset < 0.0 || dur <= 0.0) fail(source, line, "onset must be >= 0 and duration > 0");
    out[f[1]].push_back({f[7], onset, onset + dur});
  }
  return out;
}

void write_rttm(std::ostream& out, const std::string& file_id, const SegmentSet& segments) {
  char buf[64];
  for (const auto& s : segments) {
    std::snprintf(buf, sizeof(buf), "%.3f %.3f", s.onset, s.offset - s.onset);
    out << "SPEAKER " << file_id << " 1 " << buf << " <NA> <NA> " << s.speaker << " <NA> <NA>\n";
  }
}

ActivitySeq segments_to_activity(const SegmentSet& segments, std::size_t frames, double frame_ms) {
  std::vector<double> v(frames, 0.0);
  const double sec = frame_ms / 1000.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double c = (static_cast<double>(t) + 0.5) * sec;
    for (const auto& s : segments) {
      if (c >= s.onset && c < s.offset) {
        v[t] = 1.0;
        break;
      }
    }
  }
  return ActivitySeq(std::move(v), frame_ms);
}

std::vector<TranscriptRecord> read_transcripts(std::istream& in, const std::string& source) {
  std::vector<TranscriptRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail(source, line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) fail(source, line, "record needs a string 'id'");
    if (!j.contains("speakers") || !j["speakers"].is_array()) fail(source, line, "record needs a 'speakers' array");
    TranscriptRecord rec;
    rec.id = j["id"].get<std::string>();
    for (const auto& s : j["speakers"]) {
      if (!s.is_object() || !s.contains("speaker") || !s["speaker"].is_string()) {
        fail(source, line, "each speaker entry needs a string 'speaker'");
      }
      SpeakerWords sw{s["speaker"].get<std::string>(), {}};
      if (s.contains("words")) {
        if (!s["words"].is_array()) fail(source, line, "'words' must be an array");
        for (const auto& w : s["words"]) {
          if (!w.is_string()) fail(source, line, "'words' must hold strings");
          std::string n = normalize_word(w.get<std::string>());
          if (!n.empty()) sw.words.push_back(std::move(n));
        }
      } else if (s.contains("text")) {
        if (!s["text"].is_string()) fail(source, line, "'text' must be a string");
        sw.words = normalize_text(s["text"].get<std::string>());
      } else {
        fail(source, line, "speaker entry needs 'words' or 'text'");
      }
      if (s.contains("timestamps") && !s["timestamps"].is_array()) fail(source, line, "'timestamps' must be an array");
      rec.speakers.push_back(std::move(sw));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

json transcript_json(const TranscriptRecord& rec) {
  json speakers = json::array();
  for (const auto& s : rec.speakers) speakers.push_back({{"speaker", s.speaker}, {"words", s.words}});
  return {{"id", rec.id}, {"speakers", speakers}};
}

json manifest_json(const ManifestRecord& rec) {
  const MixtureSample& s = rec.sample;
  json refs = json::array();
  json acts = json::array();
  json text = json::array();
  for (std::size_t i = 0; i < s.k(); ++i) {
    refs.push_back(s.references[i].tokens);
    if (i < s.activities.size()) {
      acts.push_back(std::vector<double>(s.activities[i].values().begin(), s.activities[i].values().end()));
    }
    text.push_back(render_words(s.references[i]));
  }
  return {{"schema", kManifestSchema},
          {"id", rec.id},
          {"k", s.k()},
          {"speakers", s.speaker_ids},
          {"delays", s.delays},
          {"seeds", s.seeds},
          {"references", refs},
          {"words", text},
          {"frame_ms", s.features.frame_ms},
          {"features", {{"dim", s.features.dim}, {"frames", s.features.frames()}, {"data", s.features.values}}},
          {"activities", acts},
          {"provenance", rec.provenance}};
}

std::vector<ManifestRecord> read_manifest(std::istream& in, const std::string& source) {
  std::vector<ManifestRecord> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(text);
      if (j.at("schema").get<std::string>() != kManifestSchema) {
        fail(source, line, "unsupported schema '" + j.at("schema").get<std::string>() + "'");
      }
      ManifestRecord rec;
      rec.id = j.at("id").get<std::string>();
      MixtureSample& s = rec.sample;
      const double frame_ms = j.at("frame_ms").get<double>();
      const json& f = j.at("features");
      s.features = FeatureSeq(f.at("dim").get<std::size_t>(), f.at("data").get<std::vector<double>>(), frame_ms);
      if (s.features.frames() != f.at("frames").get<std::size_t>()) fail(source, line, "feature frame count mismatch");
      const auto k = j.at("k").get<std::size_t>();
      s.speaker_ids = j.at("speakers").get<std::vector<int>>();
      s.delays = j.at("delays").get<std::vector<std::size_t>>();
      s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      for (const auto& r : j.at("references")) s.references.push_back(TokenSeq{r.get<std::vector<int>>()});
      // Activities may be absent or partial; callers decide how to treat that.
      if (j.contains("activities")) {
        for (const auto& a : j.at("activities")) {
          s.activities.emplace_back(a.get<std::vector<double>>(), frame_ms);
          if (s.activities.back().size() != s.features.frames()) {
            fail(source, line, "activity length differs from the feature length");
          }
        }
      }
      if (s.references.size() != k || s.speaker_ids.size() != k) fail(source, line, "k disagrees with references");
      if (j.contains("provenance")) rec.provenance = j.at("provenance");
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      fail(source, line, std::string("malformed manifest record: ") + e.what());
    } catch (const ContractError& e) {
      fail(source, line, e.what());
    } catch (const DimensionError& e) {
      fail(source, line, e.what());
    }
  }
  return out;
}

TranscriptRecord reference_transcript(const ManifestRecord& rec) {
  TranscriptRecord t{rec.id, {}};
  for (std::size_t i = 0; i < rec.sample.k(); ++i) {
    t.speakers.push_back({speaker_label(rec.sample, i), render_words(rec.sample.references[i])});
  }
  return t;
}

SegmentSet reference_segments(const ManifestRecord& rec) {
  SegmentSet out;
  for (std::size_t i = 0; i < rec.sample.activities.size(); ++i) {
    const auto segs = activity_segments(rec.sample.activities[i], speaker_label(rec.sample, i));
    out.insert(out.end(), segs.begin(), segs.end());
  }
  return out;
}

}  // namespace ssa
