#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechlabel/asr.hpp"
#include "speechlabel/session_store.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

struct TrainingConfig {
  int images_per_round = 80;
  double min_recall = 0.80;
  double min_precision = 0.85;
  std::string vocabulary_id;

  void validate() const;  // throws ConfigError
  static TrainingConfig from_json(const nlohmann::json& doc);
};

// Per-image grading of typed class names against ground truth. All names are
// normalized; correct and missed partition the GT set.
struct Feedback {
  std::set<std::string> missed;
  std::set<std::string> wrong;
  std::set<std::string> correct;
  std::optional<double> running_recall;
  std::optional<double> running_precision;
};

nlohmann::json to_json(const Feedback& f);

Feedback grade_image(std::span<const std::string> typed, const std::set<std::string>& gt_classes,
                     const Vocabulary& vocab);

struct TrainingImageRecord {
  std::string image_id;
  std::vector<TypedEntry> typed;
  std::vector<TranscriptionResult> spoken;  // parallel to typed, may be empty
  Feedback feedback;
};

struct RoundSummary {
  std::size_t correct = 0;
  std::size_t ground_truth = 0;
  std::size_t typed = 0;  // distinct per image, summed
  std::optional<double> recall;
  std::optional<double> precision;
  bool passed = false;
};

nlohmann::json to_json(const RoundSummary& s);

// Micro-averaged over the round. Throws ValidationError unless exactly
// images_per_round records are given.
RoundSummary round_summary(std::span<const TrainingImageRecord> records, const TrainingConfig& config);

// Fraction of typed entries that name a vocabulary class; nullopt without entries.
std::optional<double> vocabulary_usage_rate(std::span<const TrainingImageRecord> records, const Vocabulary& vocab);

// Training state of one annotator: rounds of images_per_round graded images.
// A failed round can be repeated; grading after a completed round starts the
// next one.
class TrainingRound {
 public:
  explicit TrainingRound(TrainingConfig config, std::size_t round_index = 0);

  const TrainingConfig& config() const noexcept { return config_; }
  std::size_t round_index() const noexcept { return round_index_; }
  const std::vector<TrainingImageRecord>& records() const noexcept { return records_; }
  bool complete() const noexcept;

  // Grades one image, stores the record and returns its feedback with running
  // recall/precision over the round so far.
  Feedback add(std::string image_id, std::vector<TypedEntry> typed, const std::set<std::string>& gt_classes,
               const Vocabulary& vocab, std::vector<TranscriptionResult> spoken = {});

  // Throws ValidationError while the round is incomplete.
  RoundSummary summary() const;

  nlohmann::json report(const std::string& annotator_id) const;
  static TrainingRound from_report(const nlohmann::json& doc, TrainingConfig config);

 private:
  TrainingConfig config_;
  std::size_t round_index_;
  std::vector<TrainingImageRecord> records_;
};

}  // namespace speechlabel
