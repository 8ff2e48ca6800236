#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "speechlabel/workspace.hpp"

namespace speechlabel {

// Data directory layout:
//   manifest.json        {"images": [{"image_id", "file", "width", "height", "vocabulary_id"}],
//                         "queues": {"training": [image_id...], "main": [image_id...]}}
//   images/<file>        image bytes
//   sessions/<sid>/      session.json, uploads/<image_id>/{events.jsonl,audio.wav},
//                        results/<image_id>.json, training.json
//   store/               finalized image sessions (SessionStore), one folder per <sid>_<image_id>
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::filesystem::path data_dir;
  WorkspaceConfig workspace;

  // Workspace keys plus "listen": "host:port" and "data_dir".
  static ServiceConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  // Reads the file and applies SPEECHLABEL_LISTEN / SPEECHLABEL_DATA_DIR and
  // the ASR environment overrides.
  static ServiceConfig load(const std::filesystem::path& path);
};

class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Workspace& workspace() noexcept;

  // Binds and serves on a background thread; returns the bound port.
  int start();
  // Serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace speechlabel
