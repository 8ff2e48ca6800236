#include "speechlabel/matcher.hpp"

#include <set>

#include "speechlabel/error.hpp"

namespace speechlabel {

std::string_view to_string(ResolutionMethod m) { return m == ResolutionMethod::exact ? "exact" : "embedding"; }

std::vector<std::size_t> ImageLabeling::label_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const auto& a = annotations[i];
    if (a.resolution && !a.duplicate) out.push_back(i);
  }
  return out;
}

std::vector<std::string> ImageLabeling::label_names() const {
  std::vector<std::string> out;
  for (std::size_t i : label_indices()) out.push_back(annotations[i].resolution->class_name);
  return out;
}

std::size_t ImageLabeling::duplicate_count() const {
  std::size_t n = 0;
  for (const auto& a : annotations) n += a.duplicate ? 1 : 0;
  return n;
}

std::size_t ImageLabeling::unlabeled_count() const {
  std::size_t n = 0;
  for (const auto& a : annotations) n += a.unlabeled ? 1 : 0;
  return n;
}

LabelMatcher::LabelMatcher(const Vocabulary& vocab, const EmbeddingTable& table, MatcherConfig config)
    : vocab_(vocab), table_(table), config_(config) {
  class_vectors_.reserve(vocab_.size());
  for (const auto& e : vocab_.entries()) {
    auto v = embed_phrase(e.name.normalized, table_);
    // A zero mean vector has no direction; treat the class as non-embeddable.
    if (v && !cosine_similarity(*v, *v)) v.reset();
    class_vectors_.push_back(std::move(v));
  }
}

std::optional<LabelResolution> LabelMatcher::resolve(const TranscriptionResult& result) const {
  const auto& alts = result.alternatives;
  for (const auto& alt : alts) {
    if (auto idx = vocab_.index_of(alt.text)) {
      return LabelResolution{*idx, vocab_[*idx].normalized, ResolutionMethod::exact, alt.rank, std::nullopt};
    }
  }

  std::optional<LabelResolution> best;
  for (const auto& alt : alts) {
    const auto v = embed_phrase(alt.text, table_);
    if (!v) continue;
    for (std::size_t c = 0; c < class_vectors_.size(); ++c) {
      if (!class_vectors_[c]) continue;
      const auto sim = cosine_similarity(*v, *class_vectors_[c]);
      if (!sim) continue;
      // Ties (equal up to rounding) keep the earlier pair: lower rank, then
      // earlier class.
      if (!best || *sim > *best->similarity + kSimilarityTieTolerance) {
        best = LabelResolution{c, vocab_[c].normalized, ResolutionMethod::embedding, alt.rank, *sim};
      }
    }
  }
  if (best && *best->similarity < config_.min_similarity) return std::nullopt;
  return best;
}

std::optional<LabelResolution> resolve(const TranscriptionResult& result, const Vocabulary& vocab,
                                       const EmbeddingTable& table, MatcherConfig config) {
  return LabelMatcher(vocab, table, config).resolve(result);
}

std::vector<ObjectAnnotation> resolve_session(std::span<const Click> clicks, std::span<const AudioSegment> segments,
                                              std::span<const TranscriptionResult> results,
                                              const LabelMatcher& matcher) {
  if (clicks.size() != segments.size() || clicks.size() != results.size()) {
    throw ValidationError("resolve_session needs one segment and one transcription per click");
  }
  std::vector<ObjectAnnotation> out;
  out.reserve(clicks.size());
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    ObjectAnnotation a;
    a.object_index = i;
    a.click = clicks[i].p;
    a.click_time = clicks[i].t;
    a.segment = segments[i];
    a.transcription = results[i];
    a.resolution = matcher.resolve(results[i]);
    if (!a.resolution) {
      a.unlabeled = true;
    } else if (!seen.insert(a.resolution->class_index).second) {
      a.duplicate = true;
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace speechlabel
