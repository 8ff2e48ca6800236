#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "speechlabel/annotation.hpp"
#include "speechlabel/dataset.hpp"
#include "speechlabel/events.hpp"
#include "speechlabel/intervals.hpp"
#include "speechlabel/trainer.hpp"

namespace speechlabel {

// A statistic that may be undefined (empty denominator). Undefined values are
// reported as absent together with their counts, never as 0.
struct Ratio {
  std::optional<double> value;
  double numerator = 0.0;
  double denominator = 0.0;

  static Ratio of(double numerator, double denominator);
};

// ---- semantic accuracy ----

struct PrfCounts {
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t ground_truth = 0;

  PrfCounts& operator+=(const PrfCounts& o);
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfCounts prf_counts(const std::set<std::string>& predicted, const std::set<std::string>& gt);
double f1_score(double precision, double recall);  // 0 when both are 0
// Micro-averaged. No predictions: precision 1 if there is also no GT, else 0
// (and symmetrically for recall).
Prf semantic_prf(const PrfCounts& counts);
Prf semantic_prf(const std::set<std::string>& predicted, const std::set<std::string>& gt);

// ---- location accuracy ----

enum class ClickOutcome { hit, miss, ignored };
std::string_view to_string(ClickOutcome o);

// One outcome per resolved annotation (duplicates included); clicks whose
// class is absent from the image are ignored.
std::vector<ClickOutcome> click_outcomes(std::span<const ObjectAnnotation> annotations, const GroundTruthImage& gt);
// hits / (hits + misses).
Ratio location_accuracy(std::span<const ClickOutcome> outcomes);

// ---- mouse ----

// Sum of Euclidean steps between consecutive pointer positions (mouse_move and click).
double mouse_path_length(std::span<const Event> events);

// The pointer is moving between consecutive mouse_move events at most max_gap_s apart.
std::vector<Interval> mouse_moving_intervals(std::span<const Event> events, double max_gap_s = 0.1);

// "Show classes" overlay intervals. Throws ValidationError on unbalanced or
// nested open/close events.
std::vector<Interval> consult_intervals(std::span<const Event> events);

// ---- timing ----

struct SessionTiming {
  double time_per_image = 0.0;  // submit t
  std::size_t labels = 0;
  std::optional<double> time_per_label;
  std::vector<double> per_click;        // t_k - t_{k-1}, t_0 = image_shown
  std::optional<double> final_review;   // submit - end of last speech (or last click)
};

SessionTiming session_timing(std::span<const Event> events, std::size_t distinct_labels,
                             std::optional<double> last_speech_end);

struct ClickIndexMean {
  std::size_t index = 0;  // 1-based click number
  double mean_s = 0.0;
  std::size_t count = 0;
};

struct TimingReport {
  std::size_t images = 0;
  std::optional<double> time_per_image;  // mean
  Ratio time_per_label;                  // total time / total labels
  std::optional<double> final_review;    // mean over images with clicks
  std::vector<ClickIndexMean> per_click_index_means;
};

TimingReport timing_report(std::span<const SessionTiming> sessions);

// ---- time allocation ----

struct SessionAllocation {
  double duration = 0.0;
  double speaking = 0.0;
  double mouse_moving = 0.0;
  double moving_during_speech = 0.0;
  double consult = 0.0;
  std::size_t consult_episodes = 0;
};

// speech holds absolute (image-clock) speaking intervals; overlaps are merged.
SessionAllocation session_allocation(std::span<const Event> events, std::span<const Interval> speech,
                                     double max_gap_s = 0.1);

struct TimeAllocation {
  Ratio speaking_frac;
  Ratio mouse_moving_frac;
  Ratio mouse_moving_during_speech_frac;
  Ratio consult_frac;
  Ratio consult_rate;            // images with a consult / images
  std::optional<double> mean_consult_s;  // per consulting image
};

TimeAllocation time_allocation(std::span<const SessionAllocation> sessions);

// ---- statistics ----

// Ranks starting at 1, ties get the average of their positions.
std::vector<double> average_ranks(std::span<const double> xs);
// Spearman's rho (Pearson correlation of average ranks). Throws
// ValidationError for mismatched lengths or fewer than 2 values; nullopt when
// either ranking has zero variance.
std::optional<double> spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys);
std::optional<double> median(std::vector<double> xs);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

// Contiguous fixed-width bins [k*w, (k+1)*w) from the lowest to the highest
// occupied bin; empty input gives no bins.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width);
std::vector<HistogramBin> utterance_duration_histogram(std::span<const double> durations, double bin_width = 0.25);

// Speaking time per annotation (union of its speech intervals), for
// annotations with any detected speech.
std::vector<double> utterance_durations(std::span<const ObjectAnnotation> annotations);

// ---- transcription accuracy ----

// Entries are typed names paired with the spoken result at the same position.
// Entries without alternatives are excluded. Counts entries whose normalized
// typed text equals one of the top-k normalized alternatives.
Ratio transcription_recall_at_k(std::span<const TrainingImageRecord> records, int k);

}  // namespace speechlabel
