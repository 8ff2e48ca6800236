#include "speechlabel/session_store.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "speechlabel/error.hpp"

namespace fs = std::filesystem;

namespace speechlabel {

std::string_view to_string(SessionMode mode) {
  return mode == SessionMode::training ? "training" : "main";
}

SessionMode parse_session_mode(std::string_view s) {
  if (s == "training") return SessionMode::training;
  if (s == "main") return SessionMode::main;
  throw ValidationError("unknown session mode '" + std::string(s) + "'");
}

SessionMeta parse_meta(const nlohmann::json& doc) {
  std::vector<std::string> problems;
  auto str = [&](const char* key) -> std::string {
    if (!doc.contains(key)) {
      problems.push_back(std::string("meta.json missing \"") + key + "\"");
      return {};
    }
    const auto& v = doc[key];
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    problems.push_back(std::string("meta.json \"") + key + "\" must be a string");
    return {};
  };
  auto dim = [&](const char* key) -> int {
    if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<int>() <= 0) {
      problems.push_back(std::string("meta.json \"") + key + "\" must be a positive integer");
      return 0;
    }
    return doc[key].get<int>();
  };
  if (!doc.is_object()) throw ParseError("meta.json is not an object");
  SessionMeta m;
  m.image_id = str("image_id");
  m.image_size = {dim("image_width"), dim("image_height")};
  m.vocabulary_id = str("vocabulary_id");
  m.annotator_id = str("annotator_id");
  const std::string mode = str("mode");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  m.mode = parse_session_mode(mode);
  return m;
}

nlohmann::json to_json(const SessionMeta& m) {
  return {{"image_id", m.image_id},         {"image_width", m.image_size.width},
          {"image_height", m.image_size.height}, {"vocabulary_id", m.vocabulary_id},
          {"annotator_id", m.annotator_id}, {"mode", std::string(to_string(m.mode))}};
}

std::vector<TypedEntry> parse_typed_entries(const nlohmann::json& doc) {
  const nlohmann::json& arr = doc.is_object() && doc.contains("typed") ? doc["typed"] : doc;
  if (!arr.is_array()) throw ValidationError("typed entries must be an array");
  std::vector<TypedEntry> out;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("text") || !e["text"].is_string()) {
      throw ValidationError("typed entry needs a string \"text\"");
    }
    TypedEntry t;
    t.text = e["text"].get<std::string>();
    t.p = {e.value("x", 0.0), e.value("y", 0.0)};
    t.t = e.value("t", 0.0);
    out.push_back(std::move(t));
  }
  return out;
}

nlohmann::json to_json(const std::vector<TypedEntry>& typed) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : typed) arr.push_back({{"text", e.text}, {"x", e.p.x}, {"y", e.p.y}, {"t", e.t}});
  return arr;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned long> counter{0};
  fs::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << path.filename().string() << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id())
           << "." << counter.fetch_add(1);
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> out;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return out;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / kMeta)) out.push_back(entry.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool SessionStore::exists(std::string_view name) const { return fs::exists(dir(name) / kMeta); }

ImageSession SessionStore::load(std::string_view name) const {
  const fs::path d = dir(name);
  ImageSession s;
  s.name = std::string(name);
  try {
    s.meta = parse_meta(nlohmann::json::parse(speechlabel::read_file(d / kMeta)));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError((d / kMeta).string() + ": " + e.what());
  }
  std::ifstream events(d / kEvents);
  if (!events) throw Error("cannot open " + (d / kEvents).string());
  s.events = parse_event_log(events, s.meta.image_size);
  if (fs::exists(d / kTyped)) {
    try {
      s.typed = parse_typed_entries(nlohmann::json::parse(speechlabel::read_file(d / kTyped)));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError((d / kTyped).string() + ": " + e.what());
    }
  }
  return s;
}

AudioRef SessionStore::load_audio(std::string_view name) const { return read_wav(dir(name) / kAudio); }

void SessionStore::save(const ImageSession& session, const AudioRef& audio) const {
  const fs::path d = dir(session.name);
  write_file_atomic(d / kEvents, serialize_event_log(session.events));
  write_file_atomic(d / kAudio, encode_wav(audio));
  if (!session.typed.empty()) write_file_atomic(d / kTyped, to_json(session.typed).dump(2) + "\n");
  // meta.json last: list() only reports folders that have it.
  write_file_atomic(d / kMeta, to_json(session.meta).dump(2) + "\n");
}

void SessionStore::write_file(std::string_view name, std::string_view file, std::string_view bytes) const {
  write_file_atomic(dir(name) / std::string(file), bytes);
}

std::optional<std::string> SessionStore::read_file(std::string_view name, std::string_view file) const {
  const fs::path p = dir(name) / std::string(file);
  if (!fs::exists(p)) return std::nullopt;
  return speechlabel::read_file(p);
}

}  // namespace speechlabel
