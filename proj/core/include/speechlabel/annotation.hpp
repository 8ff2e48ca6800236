#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speechlabel/alignment.hpp"
#include "speechlabel/asr.hpp"
#include "speechlabel/events.hpp"

namespace speechlabel {

enum class ResolutionMethod { exact, embedding };
std::string_view to_string(ResolutionMethod m);

struct LabelResolution {
  std::size_t class_index = 0;
  std::string class_name;  // normalized vocabulary name
  ResolutionMethod method = ResolutionMethod::exact;
  int matched_rank = 1;
  std::optional<double> similarity;  // embedding method only
  friend bool operator==(const LabelResolution&, const LabelResolution&) = default;
};

// o_i: one click with its audio segment, transcription and resolved class.
struct ObjectAnnotation {
  std::size_t object_index = 0;
  Point click;
  double click_time = 0.0;
  AudioSegment segment;
  TranscriptionResult transcription;
  std::optional<LabelResolution> resolution;
  bool duplicate = false;  // class already represented by an earlier click
  bool unlabeled = false;  // no class could be resolved (silence, ASR failure)
};

struct ImageLabeling {
  std::string image_id;
  std::string session;  // SessionMeta::key()
  std::string annotator_id;
  std::string vocabulary_id;
  std::vector<ObjectAnnotation> annotations;
  std::vector<std::string> warnings;

  // Indices into annotations of the class representatives, in click order.
  std::vector<std::size_t> label_indices() const;
  std::vector<std::string> label_names() const;
  std::size_t duplicate_count() const;
  std::size_t unlabeled_count() const;
};

}  // namespace speechlabel
