#include "speechlabel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "speechlabel/error.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

Ratio Ratio::of(double numerator, double denominator) {
  Ratio r;
  r.numerator = numerator;
  r.denominator = denominator;
  if (denominator > 0.0) r.value = numerator / denominator;
  return r;
}

PrfCounts& PrfCounts::operator+=(const PrfCounts& o) {
  true_positives += o.true_positives;
  predicted += o.predicted;
  ground_truth += o.ground_truth;
  return *this;
}

PrfCounts prf_counts(const std::set<std::string>& predicted, const std::set<std::string>& gt) {
  PrfCounts c;
  c.predicted = predicted.size();
  c.ground_truth = gt.size();
  for (const auto& p : predicted) c.true_positives += gt.count(p);
  return c;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

Prf semantic_prf(const PrfCounts& c) {
  Prf r;
  const auto tp = static_cast<double>(c.true_positives);
  r.precision = c.predicted > 0 ? tp / static_cast<double>(c.predicted) : (c.ground_truth == 0 ? 1.0 : 0.0);
  r.recall = c.ground_truth > 0 ? tp / static_cast<double>(c.ground_truth) : (c.predicted == 0 ? 1.0 : 0.0);
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

Prf semantic_prf(const std::set<std::string>& predicted, const std::set<std::string>& gt) {
  return semantic_prf(prf_counts(predicted, gt));
}

std::string_view to_string(ClickOutcome o) {
  switch (o) {
    case ClickOutcome::hit: return "hit";
    case ClickOutcome::miss: return "miss";
    case ClickOutcome::ignored: return "ignored";
  }
  return "unknown";
}

std::vector<ClickOutcome> click_outcomes(std::span<const ObjectAnnotation> annotations, const GroundTruthImage& gt) {
  std::vector<ClickOutcome> out;
  for (const auto& a : annotations) {
    if (!a.resolution) continue;
    switch (point_in_class_mask(gt, a.resolution->class_name, a.click)) {
      case MaskHit::hit: out.push_back(ClickOutcome::hit); break;
      case MaskHit::miss: out.push_back(ClickOutcome::miss); break;
      case MaskHit::class_absent: out.push_back(ClickOutcome::ignored); break;
    }
  }
  return out;
}

Ratio location_accuracy(std::span<const ClickOutcome> outcomes) {
  double hits = 0;
  double misses = 0;
  for (auto o : outcomes) {
    if (o == ClickOutcome::hit) ++hits;
    if (o == ClickOutcome::miss) ++misses;
  }
  return Ratio::of(hits, hits + misses);
}

double mouse_path_length(std::span<const Event> events) {
  double total = 0.0;
  std::optional<Point> last;
  for (const auto& ev : events) {
    if ((ev.kind != EventKind::mouse_move && ev.kind != EventKind::click) || !ev.pos) continue;
    if (last) total += std::hypot(ev.pos->x - last->x, ev.pos->y - last->y);
    last = ev.pos;
  }
  return total;
}

std::vector<Interval> mouse_moving_intervals(std::span<const Event> events, double max_gap_s) {
  std::vector<Interval> raw;
  std::optional<double> prev;
  for (const auto& ev : events) {
    if (ev.kind != EventKind::mouse_move) continue;
    // Timestamps are decimal seconds; allow for their binary rounding.
    if (prev && ev.t - *prev <= max_gap_s + 1e-9) raw.push_back({*prev, ev.t});
    prev = ev.t;
  }
  return union_of(raw);
}

std::vector<Interval> consult_intervals(std::span<const Event> events) {
  std::vector<Interval> out;
  std::optional<double> open;
  for (const auto& ev : events) {
    if (ev.kind == EventKind::show_classes_open) {
      if (open) throw ValidationError("show_classes_open while the class list is already open");
      open = ev.t;
    } else if (ev.kind == EventKind::show_classes_close) {
      if (!open) throw ValidationError("show_classes_close without a matching open");
      out.push_back({*open, ev.t});
      open.reset();
    }
  }
  if (open) throw ValidationError("show_classes_open is never closed");
  return out;
}

SessionTiming session_timing(std::span<const Event> events, std::size_t distinct_labels,
                             std::optional<double> last_speech_end) {
  SessionTiming s;
  s.time_per_image = submit_time(events);
  s.labels = distinct_labels;
  if (distinct_labels > 0) s.time_per_label = s.time_per_image / static_cast<double>(distinct_labels);
  const ClickList cl = clicks(events);
  double prev = 0.0;
  for (const auto& c : cl.clicks) {
    s.per_click.push_back(c.t - prev);
    prev = c.t;
  }
  if (last_speech_end) {
    s.final_review = s.time_per_image - *last_speech_end;
  } else if (!cl.clicks.empty()) {
    s.final_review = s.time_per_image - cl.clicks.back().t;
  }
  return s;
}

TimingReport timing_report(std::span<const SessionTiming> sessions) {
  TimingReport r;
  r.images = sessions.size();
  double total = 0.0;
  double labels = 0.0;
  double review = 0.0;
  std::size_t review_n = 0;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  for (const auto& s : sessions) {
    total += s.time_per_image;
    labels += static_cast<double>(s.labels);
    if (s.final_review) {
      review += *s.final_review;
      ++review_n;
    }
    if (s.per_click.size() > sums.size()) {
      sums.resize(s.per_click.size(), 0.0);
      counts.resize(s.per_click.size(), 0);
    }
    for (std::size_t k = 0; k < s.per_click.size(); ++k) {
      sums[k] += s.per_click[k];
      ++counts[k];
    }
  }
  if (!sessions.empty()) r.time_per_image = total / static_cast<double>(sessions.size());
  r.time_per_label = Ratio::of(total, labels);
  if (review_n > 0) r.final_review = review / static_cast<double>(review_n);
  for (std::size_t k = 0; k < sums.size(); ++k) {
    r.per_click_index_means.push_back({k + 1, sums[k] / static_cast<double>(counts[k]), counts[k]});
  }
  return r;
}

SessionAllocation session_allocation(std::span<const Event> events, std::span<const Interval> speech,
                                     double max_gap_s) {
  SessionAllocation a;
  a.duration = submit_time(events);
  const auto speaking = union_of(speech);
  const auto moving = mouse_moving_intervals(events, max_gap_s);
  const auto consult = consult_intervals(events);
  a.speaking = total_length(speaking);
  a.mouse_moving = total_length(moving);
  a.moving_during_speech = intersection_length(moving, speaking);
  a.consult = total_length(union_of(consult));
  a.consult_episodes = consult.size();
  return a;
}

TimeAllocation time_allocation(std::span<const SessionAllocation> sessions) {
  double duration = 0;
  double speaking = 0;
  double moving = 0;
  double moving_speech = 0;
  double consult = 0;
  double consulted = 0;
  for (const auto& s : sessions) {
    duration += s.duration;
    speaking += s.speaking;
    moving += s.mouse_moving;
    moving_speech += s.moving_during_speech;
    consult += s.consult;
    if (s.consult_episodes > 0) ++consulted;
  }
  TimeAllocation t;
  t.speaking_frac = Ratio::of(speaking, duration);
  t.mouse_moving_frac = Ratio::of(moving, duration);
  t.mouse_moving_during_speech_frac = Ratio::of(moving_speech, speaking);
  t.consult_frac = Ratio::of(consult, duration);
  t.consult_rate = Ratio::of(consulted, static_cast<double>(sessions.size()));
  if (consulted > 0) t.mean_consult_s = consult / consulted;
  return t;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    // Positions i..j (0-based) share the mean of ranks i+1..j+1.
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman_rank_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw ValidationError("spearman: inputs differ in length");
  if (xs.size() < 2) throw ValidationError("spearman: need at least 2 observations");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  // Both rankings have mean (n+1)/2.
  const double mean = (static_cast<double>(xs.size()) + 1.0) / 2.0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> median(std::vector<double> xs) {
  if (xs.empty()) return std::nullopt;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw ValidationError("histogram bin width must be > 0");
  std::vector<HistogramBin> bins;
  if (values.empty()) return bins;
  auto index = [&](double v) { return static_cast<long long>(std::floor(v / bin_width)); };
  long long lo = index(values[0]);
  long long hi = lo;
  for (double v : values) {
    lo = std::min(lo, index(v));
    hi = std::max(hi, index(v));
  }
  for (long long k = lo; k <= hi; ++k) {
    bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, 0});
  }
  for (double v : values) ++bins[static_cast<std::size_t>(index(v) - lo)].count;
  return bins;
}

std::vector<HistogramBin> utterance_duration_histogram(std::span<const double> durations, double bin_width) {
  return histogram(durations, bin_width);
}

std::vector<double> utterance_durations(std::span<const ObjectAnnotation> annotations) {
  std::vector<double> out;
  for (const auto& a : annotations) {
    const double d = total_length(union_of(a.transcription.speech));
    if (d > 0.0) out.push_back(d);
  }
  return out;
}

Ratio transcription_recall_at_k(std::span<const TrainingImageRecord> records, int k) {
  if (k < 1) throw ValidationError("recall@k needs k >= 1");
  double counted = 0;
  double found = 0;
  for (const auto& r : records) {
    const std::size_t n = std::min(r.typed.size(), r.spoken.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& alts = r.spoken[i].alternatives;
      if (alts.empty()) continue;
      ++counted;
      const auto typed = try_normalize(r.typed[i].text);
      if (!typed) continue;
      const std::size_t top = std::min(alts.size(), static_cast<std::size_t>(k));
      for (std::size_t j = 0; j < top; ++j) {
        if (try_normalize(alts[j].text) == typed) {
          ++found;
          break;
        }
      }
    }
  }
  return Ratio::of(found, counted);
}

}  // namespace speechlabel
