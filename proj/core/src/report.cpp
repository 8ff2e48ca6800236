#include "speechlabel/report.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace speechlabel {
namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json prf_json(const std::optional<Prf>& prf, const std::optional<PrfCounts>& c) {
  if (!prf || !c) return nullptr;
  return {{"precision", prf->precision},
          {"recall", prf->recall},
          {"f1", prf->f1},
          {"true_positives", c->true_positives},
          {"predicted", c->predicted},
          {"ground_truth", c->ground_truth}};
}

std::optional<double> size_order_correlation(const ImageLabeling& labeling, const GroundTruthImage& gt) {
  std::vector<double> order;
  std::vector<double> size;
  for (std::size_t i : labeling.label_indices()) {
    const auto& a = labeling.annotations[i];
    if (const Instance* inst = instance_at(gt, a.resolution->class_name, a.click)) {
      order.push_back(static_cast<double>(order.size() + 1));
      size.push_back(inst->area());
    }
  }
  if (order.size() < 2) return std::nullopt;
  return spearman_rank_correlation(order, size);
}

}  // namespace

nlohmann::json to_json(const Ratio& r) {
  return {{"value", opt(r.value)}, {"numerator", r.numerator}, {"denominator", r.denominator}};
}

nlohmann::json to_json(const std::vector<HistogramBin>& bins) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : bins) arr.push_back({{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
  return arr;
}

ImageEvaluation evaluate_image(const ImageLabeling& labeling, std::span<const Event> events,
                               const GroundTruthImage* gt, const MetricsConfig& config) {
  ImageEvaluation e;
  e.image_id = labeling.image_id;
  e.session = labeling.session;
  e.annotator_id = labeling.annotator_id;
  for (const auto& name : labeling.label_names()) e.predicted_classes.insert(name);

  std::vector<Interval> speech;
  std::optional<double> last_speech_end;
  for (const auto& a : labeling.annotations) {
    for (const auto& s : a.transcription.speech) {
      const Interval abs{a.segment.start_s + s.start, a.segment.start_s + s.end};
      speech.push_back(abs);
      if (abs.length() > 0.0) last_speech_end = std::max(last_speech_end.value_or(abs.end), abs.end);
    }
  }
  e.timing = session_timing(events, e.predicted_classes.size(), last_speech_end);
  e.mouse_path_px = mouse_path_length(events);
  e.allocation = session_allocation(events, speech, config.mouse_gap_s);
  e.utterance_durations = utterance_durations(labeling.annotations);

  if (gt != nullptr) {
    e.has_ground_truth = true;
    e.gt_classes = gt->class_set();
    e.click_outcomes = click_outcomes(labeling.annotations, *gt);
    e.size_order_rho = size_order_correlation(labeling, *gt);
  }
  return e;
}

CorpusReport build_report(std::span<const ImageEvaluation> images, std::size_t failures,
                          const TranscriptionRecords& training,
                          const MetricsConfig& config) {
  CorpusReport r;
  r.images = images.size();
  r.failures = failures;

  // Sums are accumulated in a fixed order so the report does not depend on
  // how the sessions happen to be stored.
  std::vector<const ImageEvaluation*> ordered;
  for (const auto& img : images) ordered.push_back(&img);
  std::sort(ordered.begin(), ordered.end(), [](const ImageEvaluation* a, const ImageEvaluation* b) {
    return std::tie(a->image_id, a->annotator_id, a->session) < std::tie(b->image_id, b->annotator_id, b->session);
  });

  PrfCounts counts;
  std::map<std::string, AnnotatorBreakdown> by_annotator;
  std::map<std::string, double> annotator_time;
  std::vector<ClickOutcome> outcomes;
  std::vector<SessionTiming> timings;
  std::vector<SessionAllocation> allocations;
  std::vector<double> durations;
  std::vector<double> utterances;
  std::vector<double> class_counts;
  std::vector<double> gt_times;
  std::vector<double> rhos;
  double path = 0.0;

  for (const ImageEvaluation* eval : ordered) {
    const ImageEvaluation& img = *eval;
    timings.push_back(img.timing);
    allocations.push_back(img.allocation);
    durations.push_back(img.timing.time_per_image);
    utterances.insert(utterances.end(), img.utterance_durations.begin(), img.utterance_durations.end());
    path += img.mouse_path_px;

    auto& a = by_annotator[img.annotator_id];
    a.annotator_id = img.annotator_id;
    ++a.images;
    annotator_time[img.annotator_id] += img.timing.time_per_image;

    if (!img.has_ground_truth) continue;
    ++r.images_with_ground_truth;
    const PrfCounts c = prf_counts(img.predicted_classes, img.gt_classes);
    counts += c;
    a.counts += c;
    outcomes.insert(outcomes.end(), img.click_outcomes.begin(), img.click_outcomes.end());
    class_counts.push_back(static_cast<double>(img.gt_classes.size()));
    gt_times.push_back(img.timing.time_per_image);
    if (img.size_order_rho) rhos.push_back(*img.size_order_rho);
  }

  if (r.images_with_ground_truth > 0) {
    r.counts = counts;
    r.prf = semantic_prf(counts);
  }
  for (auto& [id, a] : by_annotator) {
    a.prf = semantic_prf(a.counts);
    a.time_per_image = annotator_time[id] / static_cast<double>(a.images);
    r.per_annotator.push_back(a);
  }

  r.timing = timing_report(timings);
  r.location_accuracy = location_accuracy(outcomes);
  r.location_ignored = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), ClickOutcome::ignored));
  r.allocation = time_allocation(allocations);
  if (!images.empty()) r.mouse_path_px = path / static_cast<double>(images.size());

  r.class_count_vs_time_n = class_counts.size();
  if (class_counts.size() >= 2) r.class_count_vs_time = spearman_rank_correlation(class_counts, gt_times);
  r.size_vs_order_n = rhos.size();
  r.size_vs_order_median = median(rhos);

  r.time_per_image_histogram = histogram(durations, config.time_histogram_bin_s);
  r.utterance_histogram = utterance_duration_histogram(utterances, config.utterance_bin_s);

  if (!training.with_hints.empty()) {
    r.transcription["with_hints"] = {transcription_recall_at_k(training.with_hints, 1),
                                     transcription_recall_at_k(training.with_hints, 3)};
  }
  if (!training.without_hints.empty()) {
    r.transcription["without_hints"] = {transcription_recall_at_k(training.without_hints, 1),
                                        transcription_recall_at_k(training.without_hints, 3)};
  }
  r.vocabulary_usage = Ratio::of(static_cast<double>(training.typed_in_vocabulary),
                                 static_cast<double>(training.typed_entries));
  return r;
}

nlohmann::json to_json(const CorpusReport& r) {
  nlohmann::json j;
  j["images"] = r.images;
  j["failures"] = r.failures;
  j["images_with_ground_truth"] = r.images_with_ground_truth;
  j["semantic"] = prf_json(r.prf, r.counts);

  nlohmann::json annotators = nlohmann::json::array();
  for (const auto& a : r.per_annotator) {
    annotators.push_back({{"annotator_id", a.annotator_id},
                          {"images", a.images},
                          {"precision", a.prf.precision},
                          {"recall", a.prf.recall},
                          {"f1", a.prf.f1},
                          {"time_per_image_s", opt(a.time_per_image)}});
  }
  j["per_annotator"] = std::move(annotators);

  nlohmann::json per_click = nlohmann::json::array();
  for (const auto& c : r.timing.per_click_index_means) {
    per_click.push_back({{"index", c.index}, {"mean_s", c.mean_s}, {"count", c.count}});
  }
  j["timing"] = {{"time_per_image_s", opt(r.timing.time_per_image)},
                 {"time_per_label_s", to_json(r.timing.time_per_label)},
                 {"final_review_s", opt(r.timing.final_review)},
                 {"per_click_index", std::move(per_click)}};

  auto loc = to_json(r.location_accuracy);
  loc["ignored"] = r.location_ignored;
  j["location_accuracy"] = std::move(loc);

  j["time_allocation"] = {{"speaking_frac", to_json(r.allocation.speaking_frac)},
                          {"mouse_moving_frac", to_json(r.allocation.mouse_moving_frac)},
                          {"mouse_moving_during_speech_frac", to_json(r.allocation.mouse_moving_during_speech_frac)},
                          {"consult_frac", to_json(r.allocation.consult_frac)},
                          {"consult_rate", to_json(r.allocation.consult_rate)},
                          {"mean_consult_s", opt(r.allocation.mean_consult_s)}};
  j["mouse_path_px_mean"] = opt(r.mouse_path_px);
  j["correlations"] = {
      {"class_count_vs_time", {{"method", "spearman"}, {"value", opt(r.class_count_vs_time)}, {"n", r.class_count_vs_time_n}}},
      {"size_vs_order", {{"method", "spearman, median over images"}, {"value", opt(r.size_vs_order_median)}, {"n", r.size_vs_order_n}}}};
  j["histograms"] = {{"time_per_image", to_json(r.time_per_image_histogram)},
                     {"utterance_duration", to_json(r.utterance_histogram)}};

  nlohmann::json tx = nlohmann::json::object();
  for (const auto& [cond, acc] : r.transcription) {
    tx[cond] = {{"recall_at_1", to_json(acc.recall_at_1)}, {"recall_at_3", to_json(acc.recall_at_3)}};
  }
  j["transcription"] = std::move(tx);
  j["vocabulary_usage"] = to_json(r.vocabulary_usage);
  return j;
}

std::string per_image_csv(std::span<const ImageEvaluation> images) {
  std::ostringstream os;
  os << "image_id,annotator_id,predicted,ground_truth,true_positives,time_s,labels,hits,misses,ignored,"
        "mouse_path_px,speaking_s,mouse_moving_s,consult_s\n";
  for (const auto& e : images) {
    const PrfCounts c = prf_counts(e.predicted_classes, e.gt_classes);
    const auto count = [&](ClickOutcome o) { return std::count(e.click_outcomes.begin(), e.click_outcomes.end(), o); };
    os << e.image_id << ',' << e.annotator_id << ',' << c.predicted << ',' << c.ground_truth << ','
       << c.true_positives << ',' << e.timing.time_per_image << ',' << e.timing.labels << ','
       << count(ClickOutcome::hit) << ',' << count(ClickOutcome::miss) << ',' << count(ClickOutcome::ignored) << ','
       << e.mouse_path_px << ',' << e.allocation.speaking << ',' << e.allocation.mouse_moving << ','
       << e.allocation.consult << '\n';
  }
  return os.str();
}

}  // namespace speechlabel
