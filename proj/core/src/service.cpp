#include "speechlabel/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "speechlabel/audio.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/events.hpp"
#include "speechlabel/hash.hpp"
#include "speechlabel/pipeline.hpp"
#include "speechlabel/session_store.hpp"
#include "speechlabel/trainer.hpp"

namespace speechlabel {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void split_listen(const std::string& listen, std::string& host, int& port) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw ConfigError("listen must be host:port, got " + listen);
  host = listen.substr(0, colon);
  try {
    port = std::stoi(listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad port in " + listen);
  }
  if (port < 0 || port > 65535) throw ConfigError("bad port in " + listen);
}

struct ManifestImage {
  std::string image_id;
  std::string file;
  ImageSize size;
  std::string vocabulary_id;
};

struct Manifest {
  std::map<std::string, ManifestImage> images;
  std::map<SessionMode, std::vector<std::string>> queues;
};

Manifest load_manifest(const fs::path& path, const Workspace& ws) {
  Manifest m;
  json doc;
  try {
    doc = json::parse(read_file(path));
    for (const auto& e : doc.at("images")) {
      ManifestImage img;
      img.image_id = e.at("image_id").is_string() ? e["image_id"].get<std::string>() : e["image_id"].dump();
      img.file = e.at("file").get<std::string>();
      img.size = {e.at("width").get<int>(), e.at("height").get<int>()};
      img.vocabulary_id = e.value("vocabulary_id", ws.default_vocabulary().id());
      if (ws.vocabulary(img.vocabulary_id) == nullptr) {
        throw ConfigError("manifest image " + img.image_id + " uses unknown vocabulary " + img.vocabulary_id);
      }
      m.images[img.image_id] = img;
    }
    if (doc.contains("queues")) {
      for (const auto& [mode, ids] : doc["queues"].items()) {
        auto& q = m.queues[parse_session_mode(mode)];
        for (const auto& id : ids) {
          const std::string s = id.get<std::string>();
          if (!m.images.count(s)) throw ConfigError("queue references unknown image " + s);
          q.push_back(s);
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
  return m;
}

std::string content_type_for(const fs::path& file) {
  const std::string ext = file.extension().string();
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".ppm") return "image/x-portable-pixmap";
  return "application/octet-stream";
}

std::string media_type(const httplib::Request& req) {
  std::string ct = req.get_header_value("Content-Type");
  ct = ct.substr(0, ct.find(';'));
  std::transform(ct.begin(), ct.end(), ct.begin(), [](unsigned char c) { return std::tolower(c); });
  while (!ct.empty() && ct.back() == ' ') ct.pop_back();
  return ct;
}

bool safe_id(const std::string& s) {
  return !s.empty() && s.size() <= 128 && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_' || c == '.';
  }) && s != "." && s != "..";
}

std::string new_session_id() {
  static std::mutex m;
  static std::random_device rd;
  std::lock_guard lock(m);
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (int i = 0; i < 4; ++i) os << std::setw(4) << (rd() & 0xffffu);
  return os.str();
}

// Thrown inside handlers to produce a status with a JSON error body.
struct HttpError {
  int status;
  std::string code;
  std::vector<std::string> reasons;
};

[[noreturn]] void fail(int status, std::string code, std::string reason) {
  throw HttpError{status, std::move(code), {std::move(reason)}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& doc, const fs::path& base_dir) {
  ServiceConfig c;
  c.workspace = WorkspaceConfig::from_json(doc, base_dir);
  if (doc.contains("listen")) split_listen(doc["listen"].get<std::string>(), c.host, c.port);
  if (doc.contains("data_dir")) {
    fs::path d(doc["data_dir"].get<std::string>());
    c.data_dir = d.is_absolute() ? d : base_dir / d;
  }
  return c;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  ServiceConfig c = from_json(doc, path.parent_path());
  c.workspace = WorkspaceConfig::load(path);
  if (const char* v = std::getenv("SPEECHLABEL_LISTEN")) split_listen(v, c.host, c.port);
  if (const char* v = std::getenv("SPEECHLABEL_DATA_DIR")) c.data_dir = v;
  if (c.data_dir.empty()) throw ConfigError("service config needs data_dir");
  return c;
}

struct Service::Impl {
  ServiceConfig config;
  Workspace workspace;
  Manifest manifest;
  SessionStore store;
  httplib::Server server;
  std::jthread thread;

  std::mutex locks_mutex;
  std::map<std::string, std::shared_ptr<std::mutex>> locks;

  std::mutex report_mutex;
  std::string report_hash;
  std::string report_body;

  explicit Impl(ServiceConfig c)
      : config(std::move(c)),
        workspace(config.workspace),
        manifest(load_manifest(config.data_dir / "manifest.json", workspace)),
        store(config.data_dir / "store") {
    fs::create_directories(config.data_dir / "sessions");
    fs::create_directories(config.data_dir / "store");
    routes();
  }

  std::shared_ptr<std::mutex> lock_for(const std::string& key) {
    std::lock_guard lock(locks_mutex);
    auto& m = locks[key];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  fs::path session_dir(const std::string& sid) const { return config.data_dir / "sessions" / sid; }

  json load_session(const std::string& sid) const {
    if (!safe_id(sid) || !fs::exists(session_dir(sid) / "session.json")) fail(404, "not_found", "unknown session " + sid);
    return json::parse(read_file(session_dir(sid) / "session.json"));
  }

  const ManifestImage& image(const std::string& image_id) const {
    auto it = manifest.images.find(image_id);
    if (it == manifest.images.end()) fail(404, "not_found", "unknown image " + image_id);
    return it->second;
  }

  json descriptor(const ManifestImage& img) const {
    return {{"image_id", img.image_id},
            {"url", "/images/" + img.image_id},
            {"width", img.size.width},
            {"height", img.size.height},
            {"vocabulary_id", img.vocabulary_id}};
  }

  json next_image(const std::string& sid, SessionMode mode) const {
    auto q = manifest.queues.find(mode);
    if (q == manifest.queues.end()) return nullptr;
    for (const auto& id : q->second) {
      if (!fs::exists(session_dir(sid) / "results" / (id + ".json"))) return descriptor(manifest.images.at(id));
    }
    return nullptr;
  }

  std::string store_hash() const {
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(store.root())) {
      if (e.is_regular_file() && e.path().filename().string().find(".tmp.") == std::string::npos) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& f : files) {
      listing += fs::relative(f, store.root()).generic_string() + '\0' + sha256_hex(read_file(f)) + '\n';
    }
    return sha256_hex(listing);
  }

  template <typename F>
  httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_json(res, e.status, {{"error", e.code}, {"reasons", e.reasons}});
      } catch (const ValidationError& e) {
        send_json(res, 422, {{"error", "validation"}, {"reasons", e.reasons()}});
      } catch (const ParseError& e) {
        json body{{"error", "parse"}, {"reasons", {e.what()}}};
        if (e.line() > 0) body["line"] = e.line();
        send_json(res, 422, body);
      } catch (const RangeError& e) {
        send_json(res, 422, {{"error", "range"}, {"reasons", {e.what()}}});
      } catch (const json::exception& e) {
        send_json(res, 422, {{"error", "json"}, {"reasons", {e.what()}}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", "internal"}, {"reasons", {e.what()}}});
      }
    };
  }

  void require_json(const httplib::Request& req) const {
    if (!req.body.empty() && media_type(req) != "application/json") {
      fail(415, "unsupported_media_type", "expected application/json");
    }
  }

  void routes() {
    server.Post("/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      require_json(req);
      const json body = json::parse(req.body.empty() ? "{}" : req.body);
      const std::string annotator = body.value("annotator_id", "");
      if (!safe_id(annotator)) throw ValidationError("annotator_id must be a non-empty [A-Za-z0-9._-] string");
      const SessionMode mode = parse_session_mode(body.value("mode", "main"));
      const std::string sid = new_session_id();
      const json session{{"session_id", sid}, {"annotator_id", annotator}, {"mode", to_string(mode)}};
      write_file_atomic(session_dir(sid) / "session.json", session.dump(2) + "\n");
      json out = session;
      out["image"] = next_image(sid, mode);
      send_json(res, 201, out);
    }));

    server.Get(R"(/images/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const ManifestImage& img = image(req.matches[1]);
      const fs::path file = config.data_dir / "images" / img.file;
      if (!fs::exists(file)) fail(404, "not_found", "image file missing for " + img.image_id);
      res.set_content(read_file(file), content_type_for(file));
    }));

    server.Get(R"(/vocabulary/([^/]+))", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const Vocabulary* v = workspace.vocabulary(req.matches[1]);
      if (v == nullptr) fail(404, "not_found", "unknown vocabulary " + std::string(req.matches[1]));
      send_json(res, 200, to_json(*v));
    }));

    server.Post(R"(/sessions/([^/]+)/images/([^/]+)/events)",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string sid = req.matches[1];
                  load_session(sid);
                  const ManifestImage& img = image(req.matches[2]);
                  const std::string mt = media_type(req);
                  if (mt != "application/x-ndjson" && mt != "application/jsonl" && mt != "text/plain") {
                    fail(415, "unsupported_media_type", "expected application/x-ndjson");
                  }
                  write_file_atomic(session_dir(sid) / "uploads" / img.image_id / SessionStore::kEvents, req.body);
                  send_json(res, 202, {{"accepted", "events"}, {"bytes", req.body.size()}});
                }));

    server.Post(R"(/sessions/([^/]+)/images/([^/]+)/audio)",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                  const std::string sid = req.matches[1];
                  load_session(sid);
                  const ManifestImage& img = image(req.matches[2]);
                  const std::string mt = media_type(req);
                  if (mt != "audio/wav" && mt != "audio/x-wav" && mt != "audio/wave") {
                    fail(415, "unsupported_media_type", "expected audio/wav");
                  }
                  const AudioRef audio = decode_wav(req.body);
                  write_file_atomic(session_dir(sid) / "uploads" / img.image_id / SessionStore::kAudio, req.body);
                  send_json(res, 202, {{"accepted", "audio"}, {"duration_s", audio.duration()}});
                }));

    server.Post(R"(/sessions/([^/]+)/images/([^/]+)/finalize)",
                wrap([this](const httplib::Request& req, httplib::Response& res) { finalize(req, res); }));

    server.Get(R"(/sessions/([^/]+)/training/summary)", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const std::string sid = req.matches[1];
      const json session = load_session(sid);
      if (session["mode"] != "training") fail(409, "conflict", "not a training session");
      const fs::path state = session_dir(sid) / "training.json";
      if (!fs::exists(state)) fail(409, "conflict", "training round not complete");
      const TrainingRound round = TrainingRound::from_report(json::parse(read_file(state)), workspace.config().training);
      if (!round.complete()) fail(409, "conflict", "training round not complete");
      json out = to_json(round.summary());
      out["annotator_id"] = session["annotator_id"];
      out["round_index"] = round.round_index();
      out["images_per_round"] = round.config().images_per_round;
      send_json(res, 200, out);
    }));

    server.Get("/reports/corpus", wrap([this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(report_mutex);
      const std::string hash = store_hash();
      if (hash != report_hash) {
        const CorpusRun run = process_corpus(store, workspace.context(), workspace.gateway(), workspace.pipeline());
        report_body = dump_json(to_json(run.report(workspace.pipeline().metrics)));
        report_hash = hash;
      }
      res.set_header("ETag", "\"" + report_hash + "\"");
      res.set_content(report_body, "application/json");
    }));
  }

  void finalize(const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.matches[1];
    const json session = load_session(sid);
    const ManifestImage& img = image(req.matches[2]);
    const SessionMode mode = parse_session_mode(session["mode"].get<std::string>());
    require_json(req);
    const json body = json::parse(req.body.empty() ? "{}" : req.body);

    auto image_lock = lock_for(sid + "/" + img.image_id);
    std::lock_guard guard(*image_lock);

    const fs::path uploads = session_dir(sid) / "uploads" / img.image_id;
    std::vector<std::string> missing;
    if (!fs::exists(uploads / SessionStore::kEvents)) missing.push_back("events not uploaded");
    if (!fs::exists(uploads / SessionStore::kAudio)) missing.push_back("audio not uploaded");
    if (!missing.empty()) throw HttpError{409, "conflict", missing};

    ImageSession s;
    s.name = sid + "_" + img.image_id;
    s.meta = {img.image_id, img.size, img.vocabulary_id, session["annotator_id"].get<std::string>(), mode};
    s.events = parse_event_log(read_file(uploads / SessionStore::kEvents), img.size);
    if (body.contains("typed")) s.typed = parse_typed_entries(body);
    const AudioRef audio = decode_wav(read_file(uploads / SessionStore::kAudio));

    const LabelMatcher& matcher = workspace.context().matcher(img.vocabulary_id);
    const fs::path result_file = session_dir(sid) / "results" / (img.image_id + ".json");

    if (mode == SessionMode::main) {
      if (!s.typed.empty()) throw ValidationError("typed entries are not accepted in main mode");
      store.save(s, audio);
      const ImageLabeling labeling = process_image(s, audio, matcher, workspace.gateway(), workspace.pipeline());
      const std::string text = dump_json(to_json(labeling));
      write_file_atomic(result_file, text);
      send_json(res, 200, {{"labeling", json::parse(text)}, {"next_image", next_image(sid, mode)}});
      return;
    }

    if (s.typed.empty()) throw ValidationError("training mode requires typed entries");
    const GroundTruthImage* gt = workspace.context().gt(img.vocabulary_id, img.image_id);
    if (gt == nullptr) throw ValidationError("no ground truth for training image " + img.image_id);

    auto session_lock = lock_for(sid);
    std::lock_guard session_guard(*session_lock);
    const fs::path state = session_dir(sid) / "training.json";
    TrainingRound round = fs::exists(state)
                              ? TrainingRound::from_report(json::parse(read_file(state)), workspace.config().training)
                              : TrainingRound(workspace.config().training);
    // A completed round means the next finalize starts a fresh one.
    if (round.complete()) fs::remove_all(session_dir(sid) / "results");
    if (fs::exists(result_file)) {
      res.set_content(read_file(result_file), "application/json");
      return;
    }
    store.save(s, audio);
    const ImageLabeling spoken = process_image(s, audio, matcher, workspace.gateway(), workspace.pipeline());
    const TrainingImageRecord rec = training_record(s, spoken, gt, matcher.vocabulary());
    const Feedback fb = round.add(img.image_id, s.typed, gt->class_set(), matcher.vocabulary(), rec.spoken);
    write_file_atomic(state, round.report(session["annotator_id"].get<std::string>()).dump(2) + "\n");

    json out{{"feedback", to_json(fb)},
             {"round_index", round.round_index()},
             {"graded", round.records().size()},
             {"images_per_round", round.config().images_per_round},
             {"round_complete", round.complete()}};
    write_file_atomic(result_file, out.dump(2) + "\n");
    out["next_image"] = next_image(sid, mode);
    send_json(res, 200, out);
  }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

Workspace& Service::workspace() noexcept { return impl_->workspace; }

int Service::start() {
  auto& s = impl_->server;
  int port = impl_->config.port;
  if (port == 0) {
    port = s.bind_to_any_port(impl_->config.host);
  } else if (!s.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  if (port < 0) throw ConfigError("cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  impl_->thread = std::jthread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  return port;
}

void Service::run() {
  if (!impl_->server.listen(impl_->config.host, impl_->config.port)) {
    throw ConfigError("cannot listen on " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace speechlabel
