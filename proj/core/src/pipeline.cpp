#include "speechlabel/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "speechlabel/error.hpp"

namespace speechlabel {

void PipelineConfig::validate() const {
  if (!std::isfinite(delta_s) || delta_s < 0.0) throw ConfigError("delta_s must be a non-negative number");
  if (segment_parallelism < 1 || image_parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be at least 1");
  asr.validate();
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc) {
  PipelineConfig c;
  try {
    c.delta_s = doc.value("delta_s", c.delta_s);
    c.phrase_hints = doc.value("phrase_hints", c.phrase_hints);
    c.asr.language_tag = doc.value("language_tag", c.asr.language_tag);
    c.asr.max_alternatives = doc.value("max_alternatives", c.asr.max_alternatives);
    c.segment_parallelism = doc.value("segment_parallelism", c.segment_parallelism);
    c.image_parallelism = doc.value("image_parallelism", c.image_parallelism);
    c.retry.max_attempts = doc.value("retry_attempts", c.retry.max_attempts);
    c.retry.backoff = std::chrono::milliseconds(doc.value("retry_backoff_ms", 0));
    c.metrics.mouse_gap_s = doc.value("mouse_gap_s", c.metrics.mouse_gap_s);
    c.metrics.time_histogram_bin_s = doc.value("time_histogram_bin_s", c.metrics.time_histogram_bin_s);
    c.metrics.utterance_bin_s = doc.value("utterance_bin_s", c.metrics.utterance_bin_s);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }
  c.validate();
  return c;
}

const LabelMatcher& LabelingContext::matcher(const std::string& vocabulary_id) const {
  auto it = matchers.find(vocabulary_id);
  if (it == matchers.end() || it->second == nullptr) {
    throw ValidationError("unknown vocabulary: " + vocabulary_id);
  }
  return *it->second;
}

const GroundTruthImage* LabelingContext::gt(const std::string& vocabulary_id, const std::string& image_id) const {
  auto it = ground_truth.find(vocabulary_id);
  if (it == ground_truth.end() || it->second == nullptr) return nullptr;
  return it->second->find(image_id);
}

AsrConfig asr_config_for(const Vocabulary& vocab, const PipelineConfig& config, bool with_hints) {
  AsrConfig asr = config.asr;
  asr.phrase_hints.clear();
  if (config.phrase_hints && with_hints) asr.phrase_hints = vocab.phrase_hints();
  return asr;
}

ImageLabeling process_image(const ImageSession& session, const AudioRef& audio, const LabelMatcher& matcher,
                            const AsrGateway& gateway, const PipelineConfig& config, bool with_hints) {
  ImageLabeling out;
  out.image_id = session.meta.image_id;
  out.session = session.meta.key();
  out.annotator_id = session.meta.annotator_id;
  out.vocabulary_id = session.meta.vocabulary_id;

  ClickList list = clicks(session.events);
  out.warnings = std::move(list.warnings);

  const double duration = audio.duration();
  std::vector<double> times;
  times.reserve(list.clicks.size());
  for (const auto& c : list.clicks) {
    if (c.t > duration) {
      out.warnings.push_back("click at " + std::to_string(c.t) + " s is past the end of the audio");
    }
    times.push_back(std::min(c.t, duration));
  }
  const auto segments = segment_recording(times, duration, config.delta_s);

  std::vector<BatchJob> jobs;
  std::vector<std::size_t> job_of(segments.size(), segments.size());
  for (const auto& seg : segments) {
    if (seg.length() <= 0.0) continue;
    job_of[seg.object_index] = jobs.size();
    jobs.push_back({slice_audio(audio, seg.start_s, seg.end_s), {out.session, seg.object_index}});
  }
  const AsrConfig asr = asr_config_for(matcher.vocabulary(), config, with_hints);
  auto transcribed = batch_transcribe(gateway, jobs, asr, config.segment_parallelism, config.retry);

  std::vector<TranscriptionResult> results(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (job_of[i] < transcribed.size()) {
      results[i] = std::move(transcribed[job_of[i]]);
    } else {
      results[i].segment = {out.session, i};
    }
    if (results[i].failed()) {
      out.warnings.push_back("transcription failed for object " + std::to_string(i) + ": " + *results[i].error);
    }
  }
  out.annotations = resolve_session(list.clicks, segments, results, matcher);
  return out;
}

TrainingImageRecord training_record(const ImageSession& session, const ImageLabeling& spoken,
                                    const GroundTruthImage* gt, const Vocabulary& vocab) {
  TrainingImageRecord rec;
  rec.image_id = session.meta.image_id;
  rec.typed = session.typed;
  std::vector<bool> used(spoken.annotations.size(), false);
  for (const auto& entry : session.typed) {
    TranscriptionResult match;
    for (std::size_t i = 0; i < spoken.annotations.size(); ++i) {
      const auto& a = spoken.annotations[i];
      if (!used[i] && std::abs(a.click_time - entry.t) < 1e-6) {
        used[i] = true;
        match = a.transcription;
        break;
      }
    }
    rec.spoken.push_back(std::move(match));
  }
  if (gt != nullptr) {
    std::vector<std::string> texts;
    for (const auto& t : session.typed) texts.push_back(t.text);
    rec.feedback = grade_image(texts, gt->class_set(), vocab);
  }
  return rec;
}

nlohmann::json to_json(const ObjectAnnotation& a) {
  nlohmann::json j;
  j["object_index"] = a.object_index;
  j["x"] = a.click.x;
  j["y"] = a.click.y;
  j["t"] = a.click_time;
  j["segment"] = {a.segment.start_s, a.segment.end_s};
  j["transcription"] = to_json(a.transcription);
  if (a.resolution) {
    j["class"] = a.resolution->class_name;
    j["method"] = to_string(a.resolution->method);
    j["rank"] = a.resolution->matched_rank;
    if (a.resolution->similarity) j["similarity"] = *a.resolution->similarity;
  } else {
    j["class"] = nullptr;
  }
  j["duplicate"] = a.duplicate;
  j["unlabeled"] = a.unlabeled;
  return j;
}

nlohmann::json to_json(const ImageLabeling& labeling) {
  nlohmann::json labels = nlohmann::json::array();
  for (std::size_t i : labeling.label_indices()) {
    const auto& a = labeling.annotations[i];
    nlohmann::json alternatives = nlohmann::json::array();
    for (const auto& alt : a.transcription.alternatives) alternatives.push_back(alt.text);
    labels.push_back({{"class", a.resolution->class_name},
                      {"x", a.click.x},
                      {"y", a.click.y},
                      {"t", a.click_time},
                      {"method", to_string(a.resolution->method)},
                      {"alternatives", std::move(alternatives)}});
  }
  nlohmann::json duplicates = nlohmann::json::array();
  nlohmann::json unlabeled = nlohmann::json::array();
  nlohmann::json annotations = nlohmann::json::array();
  for (const auto& a : labeling.annotations) {
    if (a.duplicate) duplicates.push_back(a.object_index);
    if (a.unlabeled) unlabeled.push_back(a.object_index);
    annotations.push_back(to_json(a));
  }
  return {{"image_id", labeling.image_id},
          {"session", labeling.session},
          {"annotator_id", labeling.annotator_id},
          {"vocabulary_id", labeling.vocabulary_id},
          {"labels", std::move(labels)},
          {"flags", {{"duplicate", std::move(duplicates)}, {"unlabeled", std::move(unlabeled)}}},
          {"annotations", std::move(annotations)},
          {"warnings", labeling.warnings}};
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

CorpusReport CorpusRun::report(const MetricsConfig& metrics) const {
  return build_report(evaluations, failures.size(), training, metrics);
}

namespace {

struct SessionOutput {
  bool ok = false;
  bool training = false;
  std::string error;
  ImageLabeling labeling;
  ImageEvaluation evaluation;
  TrainingImageRecord with_hints;
  TrainingImageRecord without_hints;
  std::size_t typed_entries = 0;
  std::size_t typed_in_vocabulary = 0;
};

SessionOutput run_session(const SessionStore& store, const std::string& name, const LabelingContext& context,
                          const AsrGateway& gateway, const PipelineConfig& config) {
  SessionOutput out;
  try {
    const ImageSession session = store.load(name);
    const AudioRef audio = store.load_audio(name);
    const LabelMatcher& matcher = context.matcher(session.meta.vocabulary_id);
    const GroundTruthImage* gt = context.gt(session.meta.vocabulary_id, session.meta.image_id);
    if (session.meta.mode == SessionMode::training) {
      out.training = true;
      const auto& vocab = matcher.vocabulary();
      out.with_hints = training_record(session, process_image(session, audio, matcher, gateway, config, true), gt, vocab);
      out.without_hints =
          training_record(session, process_image(session, audio, matcher, gateway, config, false), gt, vocab);
      for (const auto& t : session.typed) {
        ++out.typed_entries;
        if (vocab.contains(t.text)) ++out.typed_in_vocabulary;
      }
    } else {
      out.labeling = process_image(session, audio, matcher, gateway, config, true);
      out.evaluation = evaluate_image(out.labeling, session.events, gt, config.metrics);
    }
    out.ok = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

CorpusRun process_corpus(const SessionStore& store, const LabelingContext& context, const AsrGateway& gateway,
                         const PipelineConfig& config) {
  config.validate();
  const auto names = store.list();
  std::vector<SessionOutput> outputs(names.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        outputs[i] = run_session(store, names[i], context, gateway, config);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        next = names.size();
      }
    }
  };
  {
    const auto n = static_cast<std::size_t>(std::max(1, config.image_parallelism));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < std::min(n, names.size()); ++i) pool.emplace_back(worker);
    worker();
  }
  if (fatal) std::rethrow_exception(fatal);

  CorpusRun run;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto& o = outputs[i];
    if (!o.ok) {
      run.failures.push_back({names[i], o.error});
    } else if (o.training) {
      run.training.with_hints.push_back(std::move(o.with_hints));
      run.training.without_hints.push_back(std::move(o.without_hints));
      run.training.typed_entries += o.typed_entries;
      run.training.typed_in_vocabulary += o.typed_in_vocabulary;
    } else {
      run.names.push_back(names[i]);
      run.labelings.push_back(std::move(o.labeling));
      run.evaluations.push_back(std::move(o.evaluation));
    }
  }
  return run;
}

void write_outputs(const CorpusRun& run, const std::filesystem::path& out_dir, const MetricsConfig& metrics) {
  std::filesystem::create_directories(out_dir / "labels");
  for (std::size_t i = 0; i < run.labelings.size(); ++i) {
    write_file_atomic(out_dir / "labels" / (run.names[i] + ".json"), dump_json(to_json(run.labelings[i])));
  }
  write_file_atomic(out_dir / "report.json", dump_json(to_json(run.report(metrics))));
  write_file_atomic(out_dir / "per_image.csv", per_image_csv(run.evaluations));
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : run.failures) failures.push_back({{"session", f.session}, {"message", f.message}});
  write_file_atomic(out_dir / "failures.json", dump_json(failures));
}

}  // namespace speechlabel
