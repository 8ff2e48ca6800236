#include "speechlabel/trainer.hpp"

#include <algorithm>

#include "speechlabel/error.hpp"

namespace speechlabel {
namespace {

struct Totals {
  std::size_t correct = 0;
  std::size_t gt = 0;
  std::size_t typed = 0;
};

Totals totals(std::span<const TrainingImageRecord> records) {
  Totals t;
  for (const auto& r : records) {
    t.correct += r.feedback.correct.size();
    t.gt += r.feedback.correct.size() + r.feedback.missed.size();
    t.typed += r.feedback.correct.size() + r.feedback.wrong.size();
  }
  return t;
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void TrainingConfig::validate() const {
  if (images_per_round < 1) throw ConfigError("images_per_round must be >= 1");
  if (min_recall < 0 || min_recall > 1) throw ConfigError("min_recall must be in [0, 1]");
  if (min_precision < 0 || min_precision > 1) throw ConfigError("min_precision must be in [0, 1]");
}

TrainingConfig TrainingConfig::from_json(const nlohmann::json& doc) {
  TrainingConfig c;
  c.images_per_round = doc.value("images_per_round", c.images_per_round);
  c.min_recall = doc.value("min_recall", c.min_recall);
  c.min_precision = doc.value("min_precision", c.min_precision);
  c.vocabulary_id = doc.value("vocabulary_id", c.vocabulary_id);
  c.validate();
  return c;
}

nlohmann::json to_json(const Feedback& f) {
  return {{"missed", f.missed},
          {"wrong", f.wrong},
          {"correct", f.correct},
          {"running_recall", opt(f.running_recall)},
          {"running_precision", opt(f.running_precision)}};
}

Feedback grade_image(std::span<const std::string> typed, const std::set<std::string>& gt_classes,
                     const Vocabulary& vocab) {
  std::set<std::string> names;
  for (const auto& t : typed) {
    // In-vocabulary names take the vocabulary's canonical form; anything else
    // is kept as typed (normalized) and can only be wrong.
    if (const ClassName* c = vocab.find(t)) {
      names.insert(c->normalized);
    } else if (auto n = try_normalize(t)) {
      names.insert(*n);
    }
  }
  Feedback f;
  for (const auto& n : names) {
    (gt_classes.count(n) ? f.correct : f.wrong).insert(n);
  }
  for (const auto& g : gt_classes) {
    if (!names.count(g)) f.missed.insert(g);
  }
  return f;
}

nlohmann::json to_json(const RoundSummary& s) {
  return {{"recall", opt(s.recall)},   {"precision", opt(s.precision)},   {"passed", s.passed},
          {"correct", s.correct},      {"ground_truth", s.ground_truth}, {"typed", s.typed}};
}

RoundSummary round_summary(std::span<const TrainingImageRecord> records, const TrainingConfig& config) {
  config.validate();
  if (records.size() != static_cast<std::size_t>(config.images_per_round)) {
    throw ValidationError("training round incomplete: " + std::to_string(records.size()) + " of " +
                          std::to_string(config.images_per_round) + " images graded");
  }
  const Totals t = totals(records);
  RoundSummary s;
  s.correct = t.correct;
  s.ground_truth = t.gt;
  s.typed = t.typed;
  s.recall = ratio(t.correct, t.gt);
  s.precision = ratio(t.correct, t.typed);
  const bool recall_ok = !s.recall || *s.recall >= config.min_recall;
  const bool precision_ok = !s.precision || *s.precision >= config.min_precision;
  s.passed = recall_ok && precision_ok;
  return s;
}

std::optional<double> vocabulary_usage_rate(std::span<const TrainingImageRecord> records, const Vocabulary& vocab) {
  std::size_t total = 0;
  std::size_t in_vocab = 0;
  for (const auto& r : records) {
    for (const auto& e : r.typed) {
      ++total;
      if (vocab.contains(e.text)) ++in_vocab;
    }
  }
  return ratio(in_vocab, total);
}

TrainingRound::TrainingRound(TrainingConfig config, std::size_t round_index)
    : config_(std::move(config)), round_index_(round_index) {
  config_.validate();
}

bool TrainingRound::complete() const noexcept {
  return records_.size() >= static_cast<std::size_t>(config_.images_per_round);
}

Feedback TrainingRound::add(std::string image_id, std::vector<TypedEntry> typed,
                            const std::set<std::string>& gt_classes, const Vocabulary& vocab,
                            std::vector<TranscriptionResult> spoken) {
  if (complete()) {
    records_.clear();
    ++round_index_;
  }
  std::vector<std::string> texts;
  texts.reserve(typed.size());
  for (const auto& e : typed) texts.push_back(e.text);
  TrainingImageRecord rec{std::move(image_id), std::move(typed), std::move(spoken), grade_image(texts, gt_classes, vocab)};
  records_.push_back(std::move(rec));
  const Totals t = totals(records_);
  records_.back().feedback.running_recall = ratio(t.correct, t.gt);
  records_.back().feedback.running_precision = ratio(t.correct, t.typed);
  return records_.back().feedback;
}

RoundSummary TrainingRound::summary() const { return round_summary(records_, config_); }

nlohmann::json TrainingRound::report(const std::string& annotator_id) const {
  nlohmann::json per_image = nlohmann::json::array();
  for (const auto& r : records_) {
    nlohmann::json typed = to_json(r.typed);
    per_image.push_back({{"image_id", r.image_id},
                         {"missed", r.feedback.missed},
                         {"wrong", r.feedback.wrong},
                         {"correct", r.feedback.correct},
                         {"typed", std::move(typed)}});
  }
  nlohmann::json j{{"annotator_id", annotator_id},
                   {"round_index", round_index_},
                   {"images_per_round", config_.images_per_round},
                   {"graded", records_.size()},
                   {"per_image", std::move(per_image)}};
  if (complete()) {
    const RoundSummary s = summary();
    j["recall"] = opt(s.recall);
    j["precision"] = opt(s.precision);
    j["passed"] = s.passed;
  } else {
    const Totals t = totals(records_);
    j["recall"] = opt(ratio(t.correct, t.gt));
    j["precision"] = opt(ratio(t.correct, t.typed));
    j["passed"] = nullptr;
  }
  return j;
}

TrainingRound TrainingRound::from_report(const nlohmann::json& doc, TrainingConfig config) {
  TrainingRound round(std::move(config), doc.value("round_index", std::size_t{0}));
  for (const auto& img : doc.value("per_image", nlohmann::json::array())) {
    TrainingImageRecord r;
    r.image_id = img.at("image_id").get<std::string>();
    r.feedback.missed = img.at("missed").get<std::set<std::string>>();
    r.feedback.wrong = img.at("wrong").get<std::set<std::string>>();
    r.feedback.correct = img.at("correct").get<std::set<std::string>>();
    if (img.contains("typed")) r.typed = parse_typed_entries(img["typed"]);
    round.records_.push_back(std::move(r));
  }
  return round;
}

}  // namespace speechlabel
