#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "speechlabel/audio.hpp"
#include "speechlabel/events.hpp"

namespace speechlabel {

enum class SessionMode { training, main };

std::string_view to_string(SessionMode mode);
SessionMode parse_session_mode(std::string_view s);

struct SessionMeta {
  std::string image_id;
  ImageSize image_size;
  std::string vocabulary_id;
  std::string annotator_id;
  SessionMode mode = SessionMode::main;

  // Identity of the image session as seen by the ASR gateway and reports.
  std::string key() const { return annotator_id + ":" + image_id; }
};

SessionMeta parse_meta(const nlohmann::json& doc);
nlohmann::json to_json(const SessionMeta& meta);

// A typed class name from the training task, entered for the click at (p, t).
struct TypedEntry {
  std::string text;
  Point p;
  double t = 0.0;
};

std::vector<TypedEntry> parse_typed_entries(const nlohmann::json& doc);
nlohmann::json to_json(const std::vector<TypedEntry>& typed);

struct ImageSession {
  std::string name;  // folder name inside the store
  SessionMeta meta;
  std::vector<Event> events;
  std::vector<TypedEntry> typed;  // training mode only
};

// Directory-backed store, one folder per image session:
//   <root>/<name>/meta.json, events.jsonl, audio.wav[, typed.json]
// Distinct sessions may be written concurrently; files are replaced atomically.
class SessionStore {
 public:
  static constexpr std::string_view kMeta = "meta.json";
  static constexpr std::string_view kEvents = "events.jsonl";
  static constexpr std::string_view kAudio = "audio.wav";
  static constexpr std::string_view kTyped = "typed.json";

  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path dir(std::string_view name) const { return root_ / std::string(name); }

  // Folder names that contain a meta.json, sorted.
  std::vector<std::string> list() const;
  bool exists(std::string_view name) const;

  // Meta and validated events (plus typed entries when present).
  ImageSession load(std::string_view name) const;
  AudioRef load_audio(std::string_view name) const;

  void save(const ImageSession& session, const AudioRef& audio) const;
  void write_file(std::string_view name, std::string_view file, std::string_view bytes) const;
  std::optional<std::string> read_file(std::string_view name, std::string_view file) const;

 private:
  std::filesystem::path root_;
};

// Atomic whole-file replace (write to temp, then rename).
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace speechlabel
