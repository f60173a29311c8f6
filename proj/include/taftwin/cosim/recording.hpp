#pragma once

#include <openssl/evp.h>
#include <zlib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "taftwin/core/geo.hpp"
#include "taftwin/cosim/model.hpp"

namespace taftwin::cosim {

inline constexpr std::string_view kRecordingFormat = "taf-twin-dtrec";
inline constexpr int kRecordingVersion = 1;

class CorruptRecording : public Error {
 public:
  using Error::Error;
};

class IncompatibleRecordings : public Error {
 public:
  using Error::Error;
};

struct RecordingMetadata {
  std::string time_of_day;
  std::string weather;
  std::string season;
  friend bool operator==(const RecordingMetadata&, const RecordingMetadata&) = default;
};

// One id rewrite made while layering overlay `layer` onto a recording.
struct RemapEntry {
  std::size_t layer = 0;
  ParticipantId from = 0;
  ParticipantId to = 0;
  friend bool operator==(const RemapEntry&, const RemapEntry&) = default;
};

struct RecordingHeader {
  GeoAnchor anchor;
  double dt = 0.05;
  RecordingMetadata metadata;
  bool signal_override = false;  // when layered, this recording's signal track wins
  std::size_t layers = 0;        // overlays merged in so far
  std::vector<RemapEntry> remap;
  friend bool operator==(const RecordingHeader&, const RecordingHeader&) = default;
};

struct ScenarioRecording {
  RecordingHeader header;
  std::vector<Frame> frames;
  friend bool operator==(const ScenarioRecording&, const ScenarioRecording&) = default;
};

inline json to_json_value(const RecordingHeader& h) {
  json remap = json::array();
  for (const auto& r : h.remap) remap.push_back(json{{"layer", r.layer}, {"from", r.from}, {"to", r.to}});
  return json{{"format", std::string(kRecordingFormat)},
              {"version", kRecordingVersion},
              {"anchor", h.anchor},
              {"dt", h.dt},
              {"metadata",
               {{"time_of_day", h.metadata.time_of_day}, {"weather", h.metadata.weather}, {"season", h.metadata.season}}},
              {"signal_override", h.signal_override},
              {"layers", h.layers},
              {"remap", remap}};
}

inline RecordingHeader header_from_json(const json& j) {
  if (!j.is_object() || get_field_or<std::string>(j, "format", "") != kRecordingFormat) {
    throw CorruptRecording("first line is not a recording header");
  }
  if (get_field<int>(j, "version") != kRecordingVersion) throw CorruptRecording("unsupported recording version");
  RecordingHeader h;
  h.anchor = get_field<GeoAnchor>(j, "anchor");
  h.dt = get_field<double>(j, "dt");
  if (!(h.dt > 0.0)) throw CorruptRecording("header dt must be positive");
  const json meta = get_field_or<json>(j, "metadata", json::object());
  h.metadata = {get_field_or<std::string>(meta, "time_of_day", ""), get_field_or<std::string>(meta, "weather", ""),
                get_field_or<std::string>(meta, "season", "")};
  h.signal_override = get_field_or<bool>(j, "signal_override", false);
  h.layers = get_field_or<std::size_t>(j, "layers", 0);
  for (const auto& r : get_field_or<json>(j, "remap", json::array())) {
    h.remap.push_back({get_field<std::size_t>(r, "layer"), get_field<ParticipantId>(r, "from"),
                       get_field<ParticipantId>(r, "to")});
  }
  return h;
}

// Incremental SHA-256 over everything written before the trailer line.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 init failed");
  }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;
  ~Sha256() { EVP_MD_CTX_free(ctx_); }

  void update(std::string_view data) {
    if (EVP_DigestUpdate(ctx_, data.data(), data.size()) != 1) throw Error("SHA-256 update failed");
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md, &len) != 1) throw Error("SHA-256 final failed");
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += kDigits[md[i] >> 4];
      out += kDigits[md[i] & 15];
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

inline std::string encode_frame_line(const Frame& f) { return encode_message(to_message(f)); }

inline std::string serialize_recording(const ScenarioRecording& rec) {
  std::string body = to_json_value(rec.header).dump() + "\n";
  for (const auto& f : rec.frames) body += encode_frame_line(f);
  const std::string digest = sha256_hex(body);
  return body + json{{"sha256", digest}}.dump() + "\n";
}

// Validates framing, hash, and frame spacing while parsing.
inline ScenarioRecording parse_recording(std::string_view bytes) {
  if (bytes.empty()) throw CorruptRecording("empty recording");
  std::string_view body = bytes;
  if (body.back() == '\n') body.remove_suffix(1);
  const auto last_nl = body.rfind('\n');
  if (last_nl == std::string_view::npos) throw CorruptRecording("recording lacks frames and trailer");
  const std::string_view trailer = body.substr(last_nl + 1);
  const std::string_view hashed = bytes.substr(0, last_nl + 1);
  json t;
  try {
    t = json::parse(trailer);
  } catch (const json::parse_error&) {
    throw CorruptRecording("missing integrity trailer");
  }
  if (!t.is_object() || !t.contains("sha256") || !t["sha256"].is_string()) {
    throw CorruptRecording("missing integrity trailer");
  }
  if (t["sha256"].get<std::string>() != sha256_hex(hashed)) throw CorruptRecording("integrity hash mismatch");

  ScenarioRecording rec;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < hashed.size()) {
    const auto nl = hashed.find('\n', pos);
    const std::string_view line = hashed.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line_no == 1) {
      try {
        rec.header = header_from_json(json::parse(line));
      } catch (const json::exception& e) {
        throw CorruptRecording(std::string("bad header: ") + e.what());
      } catch (const ConfigError& e) {
        throw CorruptRecording(std::string("bad header: ") + e.what());
      }
      continue;
    }
    FrameMessage m;
    try {
      m = decode_message(line, line_no);
    } catch (const MalformedMessage& e) {
      throw CorruptRecording(e.what());
    }
    if (m.kind != MessageKind::frame) throw CorruptRecording("line " + std::to_string(line_no) + " is not a FRAME");
    Frame f = to_frame(m);
    if (!rec.frames.empty()) {
      const Frame& prev = rec.frames.back();
      if (f.frame_no != prev.frame_no + 1) {
        throw CorruptRecording("frame_no " + std::to_string(f.frame_no) + " follows " + std::to_string(prev.frame_no));
      }
      const double gap = f.sim_time - prev.sim_time;
      if (std::abs(gap - rec.header.dt) > 1e-6 * std::max(1.0, rec.header.dt)) {
        throw CorruptRecording("frames at line " + std::to_string(line_no) + " are not spaced by dt");
      }
    }
    rec.frames.push_back(std::move(f));
  }
  return rec;
}

inline bool ends_with_gz(const std::string& path) { return path.size() >= 3 && path.ends_with(".gz"); }

// Streams frames to disk; the trailer is written by `finish` (or the destructor).
class RecordingWriter {
 public:
  RecordingWriter(const std::string& path, const RecordingHeader& header) : path_(path), dt_(header.dt) {
    file_ = gzopen(path.c_str(), ends_with_gz(path) ? "wb6" : "wbT");
    if (!file_) throw ConfigError("cannot write '" + path + "'");
    put(to_json_value(header).dump() + "\n");
  }
  RecordingWriter(const RecordingWriter&) = delete;
  RecordingWriter& operator=(const RecordingWriter&) = delete;
  ~RecordingWriter() {
    try {
      finish();
    } catch (...) {
    }
  }

  void append(const Frame& f) {
    if (!file_) throw PreconditionError("recording already finished");
    if (last_) {
      if (f.frame_no != last_->first + 1) throw PreconditionError("recorded frames must be consecutive");
      if (std::abs(f.sim_time - last_->second - dt_) > 1e-6 * std::max(1.0, dt_)) {
        throw PreconditionError("recorded frames must be spaced by dt");
      }
    }
    last_ = std::pair{f.frame_no, f.sim_time};
    put(encode_frame_line(f));
    ++count_;
  }

  void finish() {
    if (!file_) return;
    const std::string trailer = json{{"sha256", hash_.hex()}}.dump() + "\n";
    const int w = gzwrite(file_, trailer.data(), static_cast<unsigned>(trailer.size()));
    const int c = gzclose(file_);
    file_ = nullptr;
    if (w != static_cast<int>(trailer.size()) || c != Z_OK) throw Error("failed writing '" + path_ + "'");
  }

  std::size_t frames() const { return count_; }

 private:
  void put(const std::string& s) {
    hash_.update(s);
    if (gzwrite(file_, s.data(), static_cast<unsigned>(s.size())) != static_cast<int>(s.size())) {
      throw Error("failed writing '" + path_ + "'");
    }
  }

  std::string path_;
  double dt_;
  gzFile file_ = nullptr;
  Sha256 hash_;
  std::optional<std::pair<std::uint64_t, double>> last_;
  std::size_t count_ = 0;
};

inline void write_recording(const std::string& path, const ScenarioRecording& rec) {
  RecordingWriter w(path, rec.header);
  for (const auto& f : rec.frames) w.append(f);
  w.finish();
}

// Reads plain or gzip files alike (zlib passes uncompressed input through).
inline ScenarioRecording read_recording(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::string bytes;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) bytes.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw CorruptRecording("cannot decompress '" + path + "'");
  return parse_recording(bytes);
}

// Frames as playback emits them: identical to the recording except every participant is
// marked as recorded.
inline Frame as_played(Frame f) {
  for (auto& s : f.participants) s.source = Source::recorded;
  return f;
}

// Emits every frame to `sink`, paced at dt / speed of wall-clock time per frame.
// Returns the elapsed wall-clock seconds.
inline double playback(const ScenarioRecording& rec, double speed, const std::function<void(const Frame&)>& sink) {
  if (!(speed > 0.0)) throw PreconditionError("playback speed must be positive");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const double period = rec.header.dt / speed;
  for (std::size_t k = 0; k < rec.frames.size(); ++k) {
    if (k > 0 && std::isfinite(period)) {
      std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(
                                                std::chrono::duration<double>(period * static_cast<double>(k))));
    }
    sink(as_played(rec.frames[k]));
  }
  return std::chrono::duration<double>(clock::now() - start).count();
}

// Layers `overlay` on `base` frame by frame. Overlay ids already used anywhere in the base are
// moved to fresh ids above every id in either recording, in ascending order.
inline ScenarioRecording overdub(const ScenarioRecording& base, const ScenarioRecording& overlay) {
  if (base.header.dt != overlay.header.dt) throw IncompatibleRecordings("dt differs between recordings");
  if (!(base.header.anchor == overlay.header.anchor)) throw IncompatibleRecordings("anchor differs between recordings");

  std::set<ParticipantId> base_ids;
  std::set<ParticipantId> overlay_ids;
  for (const auto& f : base.frames) {
    for (const auto& s : f.participants) base_ids.insert(s.id);
  }
  for (const auto& f : overlay.frames) {
    for (const auto& s : f.participants) overlay_ids.insert(s.id);
  }
  ParticipantId next = 0;
  if (!base_ids.empty()) next = std::max(next, *base_ids.rbegin());
  if (!overlay_ids.empty()) next = std::max(next, *overlay_ids.rbegin());

  ScenarioRecording out;
  out.header = base.header;
  out.header.layers = base.header.layers + 1;
  std::map<ParticipantId, ParticipantId> remap;
  for (ParticipantId id : overlay_ids) {
    if (!base_ids.count(id)) continue;
    remap[id] = ++next;
    out.header.remap.push_back({out.header.layers, id, next});
  }

  const std::size_t n = std::max(base.frames.size(), overlay.frames.size());
  for (std::size_t k = 0; k < n; ++k) {
    Frame f;
    const Frame* b = k < base.frames.size() ? &base.frames[k] : nullptr;
    const Frame* o = k < overlay.frames.size() ? &overlay.frames[k] : nullptr;
    if (b) {
      f.frame_no = b->frame_no;
      f.sim_time = b->sim_time;
      f.participants = b->participants;
    } else {
      const Frame& ref = base.frames.empty() ? *o : base.frames.back();
      const std::size_t ref_k = base.frames.empty() ? k : base.frames.size() - 1;
      f.frame_no = ref.frame_no + (k - ref_k);
      f.sim_time = ref.sim_time + static_cast<double>(k - ref_k) * base.header.dt;
    }
    if (o) {
      for (auto s : o->participants) {
        if (auto it = remap.find(s.id); it != remap.end()) s.id = it->second;
        f.participants.push_back(s);
      }
    }
    std::sort(f.participants.begin(), f.participants.end(),
              [](const ParticipantState& x, const ParticipantState& y) { return x.id < y.id; });
    const bool overlay_wins = o && (overlay.header.signal_override || !b);
    f.signals = overlay_wins ? o->signals : b->signals;
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace taftwin::cosim
