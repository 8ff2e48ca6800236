#include "speechlabel/workspace.hpp"

#include <cstdlib>
#include <fstream>

#include "speechlabel/error.hpp"
#include "speechlabel/session_store.hpp"

namespace speechlabel {
namespace {

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

WorkspaceConfig WorkspaceConfig::from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  WorkspaceConfig c;
  try {
    for (const auto& v : doc.at("vocabularies")) c.vocabularies.push_back(resolve_path(base_dir, v.get<std::string>()));
    c.embeddings = resolve_path(base_dir, doc.at("embeddings").get<std::string>());
    if (doc.contains("ground_truth")) {
      for (const auto& [id, p] : doc["ground_truth"].items()) c.ground_truth[id] = resolve_path(base_dir, p.get<std::string>());
    }
    if (doc.contains("asr")) {
      const auto& asr = doc["asr"];
      c.asr_mode = asr.value("mode", c.asr_mode);
      if (asr.contains("fixture")) c.mock_fixture = resolve_path(base_dir, asr["fixture"].get<std::string>());
      c.remote = RemoteAsrSettings::from_json(asr);
    }
    if (doc.contains("matcher")) c.matcher.min_similarity = doc["matcher"].value("min_similarity", -1.0);
    if (doc.contains("pipeline")) c.pipeline = PipelineConfig::from_json(doc["pipeline"]);
    if (doc.contains("training")) c.training = TrainingConfig::from_json(doc["training"]);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("workspace config: ") + e.what());
  }
  if (c.vocabularies.empty()) throw ConfigError("workspace config: no vocabularies");
  if (c.asr_mode != "mock" && c.asr_mode != "remote") throw ConfigError("unknown asr mode: " + c.asr_mode);
  return c;
}

WorkspaceConfig WorkspaceConfig::load(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  WorkspaceConfig c = from_json(doc, path.parent_path());
  if (const char* mode = std::getenv("SPEECHLABEL_ASR_MODE")) c.asr_mode = mode;
  c.remote.apply_env();
  if (c.asr_mode != "mock" && c.asr_mode != "remote") throw ConfigError("unknown asr mode: " + c.asr_mode);
  return c;
}

Workspace::Workspace(WorkspaceConfig config) : config_(std::move(config)), table_(EmbeddingTable::load(config_.embeddings)) {
  for (const auto& path : config_.vocabularies) {
    auto vocab = std::make_unique<Vocabulary>(load_vocabulary(path));
    if (vocabulary(vocab->id()) != nullptr) throw ConfigError("duplicate vocabulary id: " + vocab->id());
    auto matcher = std::make_unique<LabelMatcher>(*vocab, table_, config_.matcher);
    context_.matchers[vocab->id()] = matcher.get();
    matchers_.push_back(std::move(matcher));
    vocabularies_.push_back(std::move(vocab));
  }
  for (const auto& [id, path] : config_.ground_truth) {
    const Vocabulary* vocab = vocabulary(id);
    if (vocab == nullptr) throw ConfigError("ground truth for unknown vocabulary: " + id);
    auto gt = std::make_unique<GroundTruthSet>(load_ground_truth(path, *vocab));
    context_.ground_truth[id] = gt.get();
    ground_truth_[id] = std::move(gt);
  }
  if (config_.training.vocabulary_id.empty()) config_.training.vocabulary_id = vocabularies_.front()->id();
  if (config_.asr_mode == "mock") {
    gateway_ = std::make_unique<MockAsr>(config_.mock_fixture.empty() ? MockAsr{} : MockAsr::load(config_.mock_fixture));
  } else {
    config_.pipeline.asr.language_tag = config_.remote.language_tag;
    config_.pipeline.retry.max_attempts = config_.remote.retries;
    gateway_ = std::make_unique<RemoteAsr>(config_.remote);
  }
  config_.pipeline.validate();
}

const Vocabulary* Workspace::vocabulary(const std::string& id) const {
  for (const auto& v : vocabularies_) {
    if (v->id() == id) return v.get();
  }
  return nullptr;
}

const Vocabulary& Workspace::default_vocabulary() const {
  if (const Vocabulary* v = vocabulary(config_.training.vocabulary_id)) return *v;
  return *vocabularies_.front();
}

std::vector<std::string> Workspace::vocabulary_ids() const {
  std::vector<std::string> ids;
  for (const auto& v : vocabularies_) ids.push_back(v->id());
  return ids;
}

const GroundTruthSet* Workspace::ground_truth(const std::string& vocabulary_id) const {
  auto it = ground_truth_.find(vocabulary_id);
  return it == ground_truth_.end() ? nullptr : it->second.get();
}

}  // namespace speechlabel
