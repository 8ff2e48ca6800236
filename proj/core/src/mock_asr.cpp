#include <fstream>

#include "speechlabel/asr.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/hash.hpp"

namespace speechlabel {
namespace {

std::vector<TranscriptionAlternative> parse_alternatives(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ParseError("mock ASR alternatives must be an array");
  std::vector<TranscriptionAlternative> out;
  int rank = 1;
  for (const auto& a : arr) {
    TranscriptionAlternative alt;
    if (a.is_string()) {
      alt.text = a.get<std::string>();
    } else if (a.is_object() && a.contains("text") && a["text"].is_string()) {
      alt.text = a["text"].get<std::string>();
      if (a.contains("confidence") && a["confidence"].is_number()) alt.confidence = a["confidence"].get<double>();
    } else {
      throw ParseError("mock ASR alternative needs a \"text\"");
    }
    alt.rank = rank++;
    out.push_back(std::move(alt));
  }
  return out;
}

}  // namespace

MockAsr MockAsr::parse(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
    throw ParseError("mock ASR fixture needs an \"entries\" array");
  }
  MockAsr mock;
  std::size_t n = 0;
  for (const auto& e : doc["entries"]) {
    ++n;
    if (!e.is_object() || !e.contains("key") || !e["key"].is_object()) {
      throw ParseError("mock ASR entry " + std::to_string(n) + " needs a \"key\" object");
    }
    Entry entry;
    if (e.contains("with_hints")) entry.with_hints = parse_alternatives(e["with_hints"]);
    entry.without_hints = e.contains("without_hints") ? parse_alternatives(e["without_hints"]) : entry.with_hints;
    if (e.contains("speech")) {
      for (const auto& s : e["speech"]) {
        if (!s.is_array() || s.size() != 2) throw ParseError("mock ASR speech interval must be [start, end]");
        entry.speech.push_back({s[0].get<double>(), s[1].get<double>()});
      }
    }
    if (e.contains("error")) entry.fault = e["error"].get<std::string>();

    const auto& key = e["key"];
    if (key.contains("audio_sha256")) {
      mock.add_audio_entry(key["audio_sha256"].get<std::string>(), std::move(entry));
    } else if (key.contains("session") && key.contains("object_index")) {
      mock.add_session_entry(key["session"].get<std::string>(), key["object_index"].get<std::size_t>(),
                             std::move(entry));
    } else {
      throw ParseError("mock ASR entry " + std::to_string(n) + " key needs session+object_index or audio_sha256");
    }
  }
  return mock;
}

MockAsr MockAsr::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mock ASR fixture " + path.string());
  try {
    return parse(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void MockAsr::add_session_entry(std::string session, std::size_t object_index, Entry e) {
  by_segment_.insert_or_assign({std::move(session), object_index}, std::move(e));
}

void MockAsr::add_audio_entry(std::string sha256, Entry e) {
  by_audio_.insert_or_assign(std::move(sha256), std::move(e));
}

const MockAsr::Entry* MockAsr::lookup(const AudioRef& segment, const SegmentRef& ref) const {
  if (auto it = by_segment_.find({ref.session, ref.object_index}); it != by_segment_.end()) return &it->second;
  if (!by_audio_.empty()) {
    if (auto it = by_audio_.find(sha256_hex(segment.pcm_bytes())); it != by_audio_.end()) return &it->second;
  }
  return nullptr;
}

TranscriptionResult MockAsr::transcribe(const AudioRef& segment, const SegmentRef& ref,
                                        const AsrConfig& config) const {
  config.validate();
  TranscriptionResult r;
  r.segment = ref;
  const Entry* e = lookup(segment, ref);
  if (e == nullptr) return r;
  if (e->fault == "transport") throw TransportError("mock transport failure for " + ref.session);
  if (e->fault == "config") throw ConfigError("mock provider rejected configuration");
  r.alternatives = rank_alternatives(config.hints_enabled() ? e->with_hints : e->without_hints,
                                     config.max_alternatives);
  r.speech = e->speech;
  return r;
}

}  // namespace speechlabel
