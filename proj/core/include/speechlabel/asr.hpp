#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "speechlabel/audio.hpp"
#include "speechlabel/intervals.hpp"

namespace speechlabel {

struct TranscriptionAlternative {
  std::string text;
  int rank = 1;  // 1 = best
  std::optional<double> confidence;
  friend bool operator==(const TranscriptionAlternative&, const TranscriptionAlternative&) = default;
};

struct SegmentRef {
  std::string session;
  std::size_t object_index = 0;
  friend bool operator==(const SegmentRef&, const SegmentRef&) = default;
};

struct TranscriptionResult {
  SegmentRef segment;
  std::vector<TranscriptionAlternative> alternatives;  // empty: no speech
  std::vector<Interval> speech;                       // relative to segment start
  std::optional<std::string> error;                   // set when every attempt failed

  bool failed() const noexcept { return error.has_value(); }
  friend bool operator==(const TranscriptionResult&, const TranscriptionResult&) = default;
};

nlohmann::json to_json(const TranscriptionResult& r);

struct AsrConfig {
  std::string language_tag = "en-IN";
  std::vector<std::string> phrase_hints;
  int max_alternatives = 3;

  bool hints_enabled() const noexcept { return !phrase_hints.empty(); }
  void validate() const;  // throws ConfigError
};

// Provider-neutral speech recognition over one audio segment. Implementations
// must be callable from several threads at once. Throws TransportError for
// retryable failures and ConfigError for rejected configuration; an empty
// alternative list means no speech was detected.
class AsrGateway {
 public:
  virtual ~AsrGateway() = default;
  virtual TranscriptionResult transcribe(const AudioRef& segment, const SegmentRef& ref,
                                         const AsrConfig& config) const = 0;
};

// Fixture-driven recognizer. Lookup order: (session, object_index), then the
// SHA-256 of the segment's PCM bytes. Unknown segments yield no speech.
class MockAsr final : public AsrGateway {
 public:
  struct Entry {
    std::vector<TranscriptionAlternative> with_hints;
    std::vector<TranscriptionAlternative> without_hints;
    std::vector<Interval> speech;
    std::optional<std::string> fault;  // "transport" or "config"
  };

  static MockAsr parse(const nlohmann::json& doc);
  static MockAsr load(const std::filesystem::path& path);

  void add_session_entry(std::string session, std::size_t object_index, Entry e);
  void add_audio_entry(std::string sha256_hex, Entry e);
  std::size_t size() const noexcept { return by_segment_.size() + by_audio_.size(); }

  const Entry* lookup(const AudioRef& segment, const SegmentRef& ref) const;

  TranscriptionResult transcribe(const AudioRef& segment, const SegmentRef& ref,
                                 const AsrConfig& config) const override;

 private:
  std::map<std::pair<std::string, std::size_t>, Entry> by_segment_;
  std::map<std::string, Entry> by_audio_;
};

struct RemoteAsrSettings {
  std::string endpoint;  // http://host:port[/base]
  std::string credential;
  std::string language_tag = "en-IN";
  std::chrono::milliseconds timeout{10000};
  int retries = 3;

  static RemoteAsrSettings from_json(const nlohmann::json& doc);
  // SPEECHLABEL_ASR_ENDPOINT, _CREDENTIAL, _LANGUAGE, _TIMEOUT_MS, _RETRIES
  void apply_env();
};

// Generic HTTP speech-to-text contract:
//   POST <endpoint>/recognize, Authorization: Bearer <credential>
//   {"language", "phrase_hints", "max_alternatives", "sample_rate", "audio_base64"}
//   -> {"alternatives": [{"text", "confidence"}], "speech": [[s, e], ...]}
// 5xx and connection failures are TransportError, 4xx are ConfigError.
class RemoteAsr final : public AsrGateway {
 public:
  explicit RemoteAsr(RemoteAsrSettings settings);
  const RemoteAsrSettings& settings() const noexcept { return settings_; }

  TranscriptionResult transcribe(const AudioRef& segment, const SegmentRef& ref,
                                 const AsrConfig& config) const override;

 private:
  RemoteAsrSettings settings_;
};

struct BatchJob {
  AudioRef audio;
  SegmentRef ref;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{0};
};

// Transcribes jobs with up to `parallelism` workers. Results come back in input
// order. A job whose attempts all hit TransportError gets a result with error
// set; a ConfigError is rethrown once the batch has drained.
std::vector<TranscriptionResult> batch_transcribe(const AsrGateway& gateway, std::span<const BatchJob> jobs,
                                                  const AsrConfig& config, int parallelism,
                                                  RetryPolicy retry = {});

// Renumbers ranks 1..n and truncates to max_alternatives.
std::vector<TranscriptionAlternative> rank_alternatives(std::vector<TranscriptionAlternative> alts,
                                                        int max_alternatives);

}  // namespace speechlabel
