#include <cstdlib>
#include <regex>

#include <httplib.h>

#include "speechlabel/asr.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/hash.hpp"

namespace speechlabel {
namespace {

struct EndpointParts {
  std::string scheme_host_port;
  std::string base_path;
};

EndpointParts split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("invalid ASR endpoint URL '" + url + "'");
  std::string base = m[2].matched ? m[2].str() : std::string();
  while (!base.empty() && base.back() == '/') base.pop_back();
  return {m[1].str(), base};
}

}  // namespace

RemoteAsrSettings RemoteAsrSettings::from_json(const nlohmann::json& doc) {
  RemoteAsrSettings s;
  s.endpoint = doc.value("endpoint", s.endpoint);
  s.credential = doc.value("credential", s.credential);
  s.language_tag = doc.value("language_tag", s.language_tag);
  s.timeout = std::chrono::milliseconds(doc.value("timeout_ms", static_cast<long long>(s.timeout.count())));
  s.retries = doc.value("retries", s.retries);
  return s;
}

void RemoteAsrSettings::apply_env() {
  if (const char* v = std::getenv("SPEECHLABEL_ASR_ENDPOINT")) endpoint = v;
  if (const char* v = std::getenv("SPEECHLABEL_ASR_CREDENTIAL")) credential = v;
  if (const char* v = std::getenv("SPEECHLABEL_ASR_LANGUAGE")) language_tag = v;
  if (const char* v = std::getenv("SPEECHLABEL_ASR_TIMEOUT_MS")) timeout = std::chrono::milliseconds(std::atoll(v));
  if (const char* v = std::getenv("SPEECHLABEL_ASR_RETRIES")) retries = std::atoi(v);
}

RemoteAsr::RemoteAsr(RemoteAsrSettings settings) : settings_(std::move(settings)) {
  if (settings_.endpoint.empty()) throw ConfigError("remote ASR needs an endpoint");
  split_endpoint(settings_.endpoint);
}

TranscriptionResult RemoteAsr::transcribe(const AudioRef& segment, const SegmentRef& ref,
                                          const AsrConfig& config) const {
  config.validate();
  const EndpointParts ep = split_endpoint(settings_.endpoint);
  httplib::Client client(ep.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(settings_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(settings_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  nlohmann::json body{{"language", config.language_tag.empty() ? settings_.language_tag : config.language_tag},
                      {"phrase_hints", config.phrase_hints},
                      {"max_alternatives", config.max_alternatives},
                      {"sample_rate", segment.sample_rate},
                      {"audio_base64", base64_encode(segment.pcm_bytes())}};
  httplib::Headers headers;
  if (!settings_.credential.empty()) headers.emplace("Authorization", "Bearer " + settings_.credential);

  auto res = client.Post(ep.base_path + "/recognize", headers, body.dump(), "application/json");
  if (!res) throw TransportError("ASR request failed: " + httplib::to_string(res.error()));
  if (res->status >= 500) throw TransportError("ASR service returned HTTP " + std::to_string(res->status));
  if (res->status >= 400) {
    throw ConfigError("ASR service rejected request (HTTP " + std::to_string(res->status) + "): " + res->body);
  }

  TranscriptionResult r;
  r.segment = ref;
  try {
    const auto doc = nlohmann::json::parse(res->body);
    std::vector<TranscriptionAlternative> alts;
    int rank = 1;
    for (const auto& a : doc.value("alternatives", nlohmann::json::array())) {
      TranscriptionAlternative alt{a.at("text").get<std::string>(), rank++, std::nullopt};
      if (a.contains("confidence") && a["confidence"].is_number()) alt.confidence = a["confidence"].get<double>();
      alts.push_back(std::move(alt));
    }
    r.alternatives = rank_alternatives(std::move(alts), config.max_alternatives);
    for (const auto& s : doc.value("speech", nlohmann::json::array())) {
      r.speech.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("malformed ASR response: ") + e.what());
  }
  return r;
}

}  // namespace speechlabel
