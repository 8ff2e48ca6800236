#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechlabel/asr.hpp"
#include "speechlabel/dataset.hpp"
#include "speechlabel/embeddings.hpp"
#include "speechlabel/matcher.hpp"
#include "speechlabel/pipeline.hpp"
#include "speechlabel/trainer.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

// Resource configuration shared by the command line tool and the service.
// Relative paths are resolved against base_dir.
//   {"vocabularies": [path...], "embeddings": path,
//    "ground_truth": {"<vocabulary_id>": path},
//    "asr": {"mode": "mock", "fixture": path} | {"mode": "remote", "endpoint", "credential", ...},
//    "matcher": {"min_similarity": x}, "pipeline": {...}, "training": {...}}
struct WorkspaceConfig {
  std::vector<std::filesystem::path> vocabularies;
  std::filesystem::path embeddings;
  std::map<std::string, std::filesystem::path> ground_truth;
  std::string asr_mode = "mock";
  std::filesystem::path mock_fixture;
  RemoteAsrSettings remote;
  MatcherConfig matcher;
  PipelineConfig pipeline;
  TrainingConfig training;

  static WorkspaceConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  static WorkspaceConfig load(const std::filesystem::path& path);  // also applies environment overrides
};

class Workspace {
 public:
  explicit Workspace(WorkspaceConfig config);
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const WorkspaceConfig& config() const noexcept { return config_; }
  PipelineConfig& pipeline() noexcept { return config_.pipeline; }
  const PipelineConfig& pipeline() const noexcept { return config_.pipeline; }

  const Vocabulary* vocabulary(const std::string& id) const;
  const Vocabulary& default_vocabulary() const;  // the training vocabulary, else the first one
  std::vector<std::string> vocabulary_ids() const;
  const GroundTruthSet* ground_truth(const std::string& vocabulary_id) const;
  const EmbeddingTable& embeddings() const noexcept { return table_; }
  const AsrGateway& gateway() const noexcept { return *gateway_; }
  void set_gateway(std::unique_ptr<AsrGateway> gateway) { gateway_ = std::move(gateway); }
  const LabelingContext& context() const noexcept { return context_; }

 private:
  WorkspaceConfig config_;
  std::vector<std::unique_ptr<Vocabulary>> vocabularies_;
  EmbeddingTable table_;
  std::vector<std::unique_ptr<LabelMatcher>> matchers_;
  std::map<std::string, std::unique_ptr<GroundTruthSet>> ground_truth_;
  std::unique_ptr<AsrGateway> gateway_;
  LabelingContext context_;
};

}  // namespace speechlabel
