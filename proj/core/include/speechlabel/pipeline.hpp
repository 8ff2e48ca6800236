#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechlabel/alignment.hpp"
#include "speechlabel/annotation.hpp"
#include "speechlabel/asr.hpp"
#include "speechlabel/dataset.hpp"
#include "speechlabel/matcher.hpp"
#include "speechlabel/report.hpp"
#include "speechlabel/session_store.hpp"

namespace speechlabel {

struct PipelineConfig {
  double delta_s = kDefaultDelta;
  bool phrase_hints = true;
  AsrConfig asr;  // phrase_hints are filled from the vocabulary
  int segment_parallelism = 4;
  int image_parallelism = 1;
  RetryPolicy retry;
  MetricsConfig metrics;

  void validate() const;  // throws ConfigError
  static PipelineConfig from_json(const nlohmann::json& doc);
};

// Per-vocabulary resources. Pointers are borrowed.
struct LabelingContext {
  std::map<std::string, const LabelMatcher*> matchers;
  std::map<std::string, const GroundTruthSet*> ground_truth;

  const LabelMatcher& matcher(const std::string& vocabulary_id) const;  // throws ValidationError
  const GroundTruthImage* gt(const std::string& vocabulary_id, const std::string& image_id) const;
};

AsrConfig asr_config_for(const Vocabulary& vocab, const PipelineConfig& config, bool with_hints);

// Splits the recording at the clicks, transcribes every non-empty segment and
// resolves each click to a class. Segments whose transcription failed are
// left unlabeled.
ImageLabeling process_image(const ImageSession& session, const AudioRef& audio, const LabelMatcher& matcher,
                            const AsrGateway& gateway, const PipelineConfig& config, bool with_hints = true);

// Spoken results paired with the typed entries of a training image, by click.
TrainingImageRecord training_record(const ImageSession& session, const ImageLabeling& spoken,
                                    const GroundTruthImage* gt, const Vocabulary& vocab);

nlohmann::json to_json(const ObjectAnnotation& a);
nlohmann::json to_json(const ImageLabeling& labeling);

struct SessionFailure {
  std::string session;
  std::string message;
};

struct CorpusRun {
  std::vector<std::string> names;  // store folder per labeling
  std::vector<ImageLabeling> labelings;
  std::vector<ImageEvaluation> evaluations;
  std::vector<SessionFailure> failures;
  TranscriptionRecords training;

  CorpusReport report(const MetricsConfig& metrics = {}) const;
};

// Processes every session in the store (sorted by folder name). A session that
// cannot be loaded or processed is reported as a failure and skipped; errors
// in configuration (ConfigError) abort the run.
CorpusRun process_corpus(const SessionStore& store, const LabelingContext& context, const AsrGateway& gateway,
                         const PipelineConfig& config);

// out/labels/<name>.json, out/report.json, out/per_image.csv, out/failures.json
void write_outputs(const CorpusRun& run, const std::filesystem::path& out_dir, const MetricsConfig& metrics = {});

std::string dump_json(const nlohmann::json& j);  // stable, indented, trailing newline

}  // namespace speechlabel
