// Copyright 2026 The SSA-ASR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ssa/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ssa/errors.hpp"
#include "ssa/serialize.hpp"

namespace ssa {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'S', 'S', 'A', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_str(std::string& out, const std::string& s, bool wide) {
  if (wide) {
    put<std::uint64_t>(out, s.size());
  } else {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  }
  out += s;
}

class Reader {
 public:
  explicit Reader(const std::string& b) : b_(b) {}
  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, b_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (b_.size() - pos_ < n) {
      throw ParseError(std::string("checkpoint truncated while reading ") + what + " at byte " +
                       std::to_string(pos_));
    }
  }
  const std::string& b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_bytes(const ModelParams& params, const nlohmann::json& meta) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put_str(out, to_json(params.config()).dump(), true);
  put_str(out, meta.dump(), true);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.tensors().size()));
  for (const auto& [name, t] : params.tensors()) {
    put_str(out, name, false);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) put<std::uint64_t>(out, d);
    out.append(reinterpret_cast<const char*>(t.data().data()), t.numel() * sizeof(double));
  }
  return out;
}

void save_checkpoint(const std::string& path, const ModelParams& params, const nlohmann::json& meta) {
  const std::string bytes = checkpoint_bytes(params, meta);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kState, "cannot open '" + path + "' for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kState, "failed writing '" + path + "'");
}

LoadedCheckpoint parse_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (r.str(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic))) {
    throw ParseError("not a checkpoint file (bad magic)");
  }
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  LoadedCheckpoint out;
  try {
    const auto clen = r.get<std::uint64_t>("config length");
    const ModelConfig config = model_config_from_json(nlohmann::json::parse(r.str(clen, "config")));
    const auto mlen = r.get<std::uint64_t>("metadata length");
    out.meta = nlohmann::json::parse(r.str(mlen, "metadata"));
    out.params = ModelParams(config);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint header is not valid JSON: ") + e.what());
  } catch (const ContractError& e) {
    throw ParseError(std::string("checkpoint config is invalid: ") + e.what());
  }
  const ModelParams reference = ModelParams::init(out.params.config(), 0);
  const auto count = r.get<std::uint32_t>("array count");
  if (count != reference.tensors().size()) {
    throw ParseError("checkpoint holds " + std::to_string(count) + " arrays, config expects " +
                     std::to_string(reference.tensors().size()));
  }
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::string name = r.str(r.get<std::uint32_t>("name length"), "name");
    if (!reference.has(name)) throw ParseError("checkpoint has unexpected array '" + name + "'");
    const auto rank = r.get<std::uint32_t>("rank");
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.get<std::uint64_t>("dims"));
    if (shape != reference.get(name).shape()) {
      throw ParseError("checkpoint array '" + name + "' has shape " + shape_str(shape) + ", expected " +
                       shape_str(reference.get(name).shape()));
    }
    std::vector<double> data(shape_numel(shape));
    const std::string raw = r.str(data.size() * sizeof(double), "array data");
    std::memcpy(data.data(), raw.data(), raw.size());
    try {
      out.params.set(name, Tensor(shape, std::move(data)));
    } catch (const NumericError&) {
      throw ParseError("checkpoint array '" + name + "' holds non-finite values");
    }
  }
  if (!r.done()) throw ParseError("trailing bytes after checkpoint arrays");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

LoadedCheckpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace ssa
