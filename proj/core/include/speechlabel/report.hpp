#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechlabel/annotation.hpp"
#include "speechlabel/dataset.hpp"
#include "speechlabel/metrics.hpp"
#include "speechlabel/trainer.hpp"

namespace speechlabel {

struct MetricsConfig {
  double mouse_gap_s = 0.1;
  double time_histogram_bin_s = 2.0;
  double utterance_bin_s = 0.25;
};

// Everything the corpus report needs from one processed image.
struct ImageEvaluation {
  std::string image_id;
  std::string session;
  std::string annotator_id;
  bool has_ground_truth = false;
  std::set<std::string> predicted_classes;
  std::set<std::string> gt_classes;
  std::vector<ClickOutcome> click_outcomes;
  SessionTiming timing;
  double mouse_path_px = 0.0;
  SessionAllocation allocation;
  std::vector<double> utterance_durations;
  std::optional<double> size_order_rho;
};

// gt may be null (no ground truth for this image). Throws ValidationError for
// unbalanced show-classes events.
ImageEvaluation evaluate_image(const ImageLabeling& labeling, std::span<const Event> events,
                               const GroundTruthImage* gt, const MetricsConfig& config = {});

struct AnnotatorBreakdown {
  std::string annotator_id;
  std::size_t images = 0;
  PrfCounts counts;
  Prf prf;
  std::optional<double> time_per_image;
};

struct TranscriptionAccuracy {
  Ratio recall_at_1;
  Ratio recall_at_3;
};

struct CorpusReport {
  std::size_t images = 0;
  std::size_t failures = 0;
  std::size_t images_with_ground_truth = 0;

  std::optional<PrfCounts> counts;  // absent without ground truth
  std::optional<Prf> prf;
  std::vector<AnnotatorBreakdown> per_annotator;

  TimingReport timing;
  Ratio location_accuracy;
  std::size_t location_ignored = 0;
  TimeAllocation allocation;
  std::optional<double> mouse_path_px;  // mean per image

  std::optional<double> class_count_vs_time;  // Spearman
  std::size_t class_count_vs_time_n = 0;
  std::optional<double> size_vs_order_median;  // median of per-image Spearman
  std::size_t size_vs_order_n = 0;

  std::vector<HistogramBin> time_per_image_histogram;
  std::vector<HistogramBin> utterance_histogram;

  std::map<std::string, TranscriptionAccuracy> transcription;  // "with_hints" / "without_hints"
  Ratio vocabulary_usage;
};

struct TranscriptionRecords {
  std::vector<TrainingImageRecord> with_hints;
  std::vector<TrainingImageRecord> without_hints;
  std::size_t typed_entries = 0;
  std::size_t typed_in_vocabulary = 0;
};

CorpusReport build_report(std::span<const ImageEvaluation> images, std::size_t failures,
                          const TranscriptionRecords& training,
                          const MetricsConfig& config = {});

nlohmann::json to_json(const CorpusReport& report);
nlohmann::json to_json(const Ratio& r);
nlohmann::json to_json(const std::vector<HistogramBin>& bins);

// One row per image: image_id,annotator_id,predicted,gt,tp,time_s,labels,hits,misses,ignored,mouse_path_px,...
std::string per_image_csv(std::span<const ImageEvaluation> images);

}  // namespace speechlabel
