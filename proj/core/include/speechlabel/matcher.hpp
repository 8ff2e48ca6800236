#pragma once

#include <optional>
#include <span>
#include <vector>

#include "speechlabel/annotation.hpp"
#include "speechlabel/embeddings.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

// Cosine similarities closer than this are treated as equal.
inline constexpr double kSimilarityTieTolerance = 1e-12;

struct MatcherConfig {
  // Embedding fallback returns nothing below this cosine; -1 disables the floor.
  double min_similarity = -1.0;
};

// Maps ranked transcription alternatives onto a closed vocabulary:
//  1. the best-ranked alternative that equals a class name (after normalize);
//  2. otherwise the class with the highest cosine similarity to any
//     alternative, comparing every (alternative, class) pair. Ties go to the
//     lower alternative rank, then to the earlier class.
// Holds references to vocab and table; both must outlive the matcher.
class LabelMatcher {
 public:
  LabelMatcher(const Vocabulary& vocab, const EmbeddingTable& table, MatcherConfig config = {});

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const EmbeddingTable& table() const noexcept { return table_; }

  std::optional<LabelResolution> resolve(const TranscriptionResult& result) const;

 private:
  const Vocabulary& vocab_;
  const EmbeddingTable& table_;
  MatcherConfig config_;
  std::vector<std::optional<std::vector<double>>> class_vectors_;
};

std::optional<LabelResolution> resolve(const TranscriptionResult& result, const Vocabulary& vocab,
                                       const EmbeddingTable& table, MatcherConfig config = {});

// One annotation per click, in click order. The first click resolving to a
// class represents it; later ones are flagged duplicate. Clicks without a
// resolution are flagged unlabeled. Inputs are parallel arrays.
std::vector<ObjectAnnotation> resolve_session(std::span<const Click> clicks, std::span<const AudioSegment> segments,
                                              std::span<const TranscriptionResult> results,
                                              const LabelMatcher& matcher);

}  // namespace speechlabel
