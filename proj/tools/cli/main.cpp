// speechlabel: batch processing, evaluation, training grading, linting and the
// HTTP service over a directory of recorded image sessions.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "speechlabel/audio.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/events.hpp"
#include "speechlabel/pipeline.hpp"
#include "speechlabel/service.hpp"
#include "speechlabel/session_store.hpp"
#include "speechlabel/trainer.hpp"
#include "speechlabel/workspace.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace speechlabel;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void diag(const std::string& level, const std::string& command, const std::string& message,
          const std::string& file = {}) {
  json j{{"level", level}, {"command", command}, {"message", message}};
  if (!file.empty()) j["file"] = file;
  std::cerr << j.dump() << '\n';
}

struct CommonOptions {
  std::string config;
  std::string store;
  std::vector<std::string> gt;  // path or vocabulary_id=path
  std::string asr;
  std::string mock_fixture;
  bool no_phrase_hints = false;
  std::optional<double> delta;
  std::optional<int> parallelism;
};

fs::path find_config(const CommonOptions& o) {
  if (!o.config.empty()) return o.config;
  if (const char* env = std::getenv("SPEECHLABEL_CONFIG")) return env;
  if (!o.store.empty()) {
    for (const fs::path p : {fs::path(o.store) / "workspace.json", fs::path(o.store).parent_path() / "workspace.json"}) {
      if (fs::exists(p)) return p;
    }
  }
  throw ConfigError("no workspace config: pass --config or set SPEECHLABEL_CONFIG");
}

WorkspaceConfig workspace_config(const CommonOptions& o) {
  WorkspaceConfig c = WorkspaceConfig::load(find_config(o));
  for (const auto& g : o.gt) {
    const auto eq = g.find('=');
    if (eq != std::string::npos) {
      c.ground_truth[g.substr(0, eq)] = g.substr(eq + 1);
      continue;
    }
    // A bare path: use its "vocabulary" field, else the first vocabulary.
    const json doc = json::parse(read_file(g));
    std::string id = doc.value("vocabulary", "");
    if (id.empty()) id = load_vocabulary(c.vocabularies.front()).id();
    c.ground_truth[id] = g;
  }
  if (!o.asr.empty()) c.asr_mode = o.asr;
  if (c.asr_mode != "mock" && c.asr_mode != "remote") throw ConfigError("unknown --asr mode: " + c.asr_mode);
  if (!o.mock_fixture.empty()) c.mock_fixture = o.mock_fixture;
  if (o.no_phrase_hints) c.pipeline.phrase_hints = false;
  if (o.delta) c.pipeline.delta_s = *o.delta;
  if (o.parallelism) c.pipeline.image_parallelism = *o.parallelism;
  return c;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool store_required) {
  cmd->add_option("--config", o.config, "Workspace config (JSON)")->check(CLI::ExistingFile);
  auto* store = cmd->add_option("--store", o.store, "Session store directory")->check(CLI::ExistingDirectory);
  if (store_required) store->required();
  cmd->add_option("--gt", o.gt, "Ground truth file, optionally vocabulary_id=path");
  cmd->add_option("--asr", o.asr, "ASR backend")->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--mock-fixture", o.mock_fixture, "Mock ASR fixture")->check(CLI::ExistingFile);
  cmd->add_flag("--no-phrase-hints", o.no_phrase_hints, "Do not send vocabulary phrase hints");
  cmd->add_option("--delta", o.delta, "Lead time before each click, seconds")->check(CLI::NonNegativeNumber);
  cmd->add_option("--parallelism", o.parallelism, "Images processed concurrently")->check(CLI::PositiveNumber);
}

int cmd_process(const CommonOptions& o, const std::string& out) {
  Workspace ws(workspace_config(o));
  const SessionStore store(o.store);
  const CorpusRun run = process_corpus(store, ws.context(), ws.gateway(), ws.pipeline());
  write_outputs(run, out, ws.pipeline().metrics);
  for (const auto& f : run.failures) diag("warning", "process", f.message, (store.dir(f.session)).string());
  std::cout << json{{"images", run.labelings.size()},
                    {"training_images", run.training.with_hints.size()},
                    {"failures", run.failures.size()},
                    {"out", out}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_evaluate(const CommonOptions& o) {
  Workspace ws(workspace_config(o));
  const CorpusRun run = process_corpus(SessionStore(o.store), ws.context(), ws.gateway(), ws.pipeline());
  for (const auto& f : run.failures) diag("warning", "evaluate", f.message, f.session);
  std::cout << dump_json(to_json(run.report(ws.pipeline().metrics)));
  return 0;
}

int cmd_grade_training(const CommonOptions& o) {
  Workspace ws(workspace_config(o));
  const SessionStore store(o.store);
  std::map<std::string, std::vector<TrainingRound>> rounds;
  int problems = 0;
  for (const auto& name : store.list()) {
    ImageSession s;
    try {
      s = store.load(name);
    } catch (const Error& e) {
      diag("error", "grade-training", e.what(), store.dir(name).string());
      ++problems;
      continue;
    }
    if (s.meta.mode != SessionMode::training) continue;
    const Vocabulary* vocab = ws.vocabulary(s.meta.vocabulary_id);
    const GroundTruthImage* gt = ws.context().gt(s.meta.vocabulary_id, s.meta.image_id);
    if (vocab == nullptr || gt == nullptr) {
      diag("error", "grade-training", "no vocabulary or ground truth for " + s.meta.image_id, store.dir(name).string());
      ++problems;
      continue;
    }
    auto& list = rounds[s.meta.annotator_id];
    if (list.empty() || list.back().complete()) list.emplace_back(ws.config().training, list.size());
    list.back().add(s.meta.image_id, s.typed, gt->class_set(), *vocab);
  }
  json out = json::array();
  for (const auto& [annotator, list] : rounds) {
    json entry{{"annotator_id", annotator}, {"rounds", json::array()}};
    for (const auto& r : list) {
      json jr{{"round_index", r.round_index()}, {"graded", r.records().size()}, {"complete", r.complete()}};
      if (r.complete()) jr["summary"] = to_json(r.summary());
      entry["rounds"].push_back(std::move(jr));
    }
    out.push_back(std::move(entry));
  }
  std::cout << dump_json(out);
  return problems == 0 ? 0 : kExitFailure;
}

int cmd_validate(const CommonOptions& o) {
  std::optional<Workspace> ws;
  if (!o.config.empty() || fs::exists(fs::path(o.store) / "workspace.json") || std::getenv("SPEECHLABEL_CONFIG")) {
    ws.emplace(workspace_config(o));
  }
  const SessionStore store(o.store);
  std::size_t checked = 0;
  std::size_t bad = 0;
  auto report = [&](const fs::path& file, const std::string& message) {
    diag("error", "validate", message, file.string());
    ++bad;
  };
  for (const auto& entry : fs::directory_iterator(store.root())) {
    if (!entry.is_directory()) continue;
    const fs::path d = entry.path();
    // Folders holding none of the session files (assets, outputs) are not sessions.
    if (!fs::exists(d / SessionStore::kMeta) && !fs::exists(d / SessionStore::kEvents) &&
        !fs::exists(d / SessionStore::kAudio)) {
      continue;
    }
    ++checked;
    std::optional<SessionMeta> meta;
    try {
      meta = parse_meta(json::parse(read_file(d / SessionStore::kMeta)));
    } catch (const std::exception& e) {
      report(d / SessionStore::kMeta, e.what());
    }
    try {
      const auto bounds = meta ? std::optional<ImageSize>(meta->image_size) : std::nullopt;
      parse_event_log(read_file(d / SessionStore::kEvents), bounds);
    } catch (const ParseError& e) {
      report(d / SessionStore::kEvents, e.line() > 0 ? "line " + std::to_string(e.line()) + ": " + e.what() : e.what());
    } catch (const std::exception& e) {
      report(d / SessionStore::kEvents, e.what());
    }
    try {
      read_wav(d / SessionStore::kAudio);
    } catch (const std::exception& e) {
      report(d / SessionStore::kAudio, e.what());
    }
    if (fs::exists(d / SessionStore::kTyped)) {
      try {
        parse_typed_entries(json::parse(read_file(d / SessionStore::kTyped)));
      } catch (const std::exception& e) {
        report(d / SessionStore::kTyped, e.what());
      }
    }
    if (ws && meta && ws->vocabulary(meta->vocabulary_id) == nullptr) {
      report(d / SessionStore::kMeta, "unknown vocabulary " + meta->vocabulary_id);
    }
  }
  std::cout << json{{"sessions", checked}, {"problems", bad}}.dump() << '\n';
  return bad == 0 ? 0 : kExitFailure;
}

int cmd_serve(const std::string& config, const std::string& listen, const std::string& data_dir) {
  ServiceConfig c = ServiceConfig::load(config);
  if (!listen.empty()) {
    const auto colon = listen.rfind(':');
    if (colon == std::string::npos) throw ConfigError("--listen must be host:port");
    c.host = listen.substr(0, colon);
    c.port = std::stoi(listen.substr(colon + 1));
  }
  if (!data_dir.empty()) c.data_dir = data_dir;
  Service service(std::move(c));
  diag("info", "serve", "listening");
  service.run();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speech-driven object class labelling"};
  app.require_subcommand(1);

  CommonOptions process_opts;
  std::string out_dir;
  auto* process = app.add_subcommand("process", "Run the labelling pipeline over a session store");
  add_common(process, process_opts, true);
  process->add_option("--out", out_dir, "Output directory")->required();

  CommonOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Print the corpus report as JSON");
  add_common(evaluate, eval_opts, true);

  CommonOptions grade_opts;
  auto* grade = app.add_subcommand("grade-training", "Round summaries of training sessions");
  add_common(grade, grade_opts, true);

  CommonOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "Lint a session store");
  add_common(validate, validate_opts, true);

  std::string serve_config;
  std::string listen;
  std::string data_dir;
  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  serve->add_option("--config", serve_config, "Service config (JSON)")->required()->check(CLI::ExistingFile);
  serve->add_option("--listen", listen, "host:port");
  serve->add_option("--data-dir", data_dir, "Data directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    diag("error", "usage", e.what());
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (*process) return cmd_process(process_opts, out_dir);
    if (*evaluate) return cmd_evaluate(eval_opts);
    if (*grade) return cmd_grade_training(grade_opts);
    if (*validate) return cmd_validate(validate_opts);
    if (*serve) return cmd_serve(serve_config, listen, data_dir);
  } catch (const ConfigError& e) {
    diag("error", command, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    diag("error", command, e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
