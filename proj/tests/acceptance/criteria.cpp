#include "criteria.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "speechlabel/alignment.hpp"
#include "speechlabel/error.hpp"
#include "speechlabel/matcher.hpp"
#include "speechlabel/metrics.hpp"
#include "speechlabel/pipeline.hpp"
#include "speechlabel/service.hpp"
#include "speechlabel/session_store.hpp"
#include "speechlabel/trainer.hpp"
#include "speechlabel/workspace.hpp"
#include "temp_dir.hpp"

namespace acceptance {
namespace {

using namespace speechlabel;
using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

std::string ratio_text(const Ratio& r) {
  return fmt(r.numerator) + "/" + fmt(r.denominator) + "=" + (r.value ? fmt(*r.value) : "n/a");
}

bool same_ratio(const Ratio& r, double num, double den) {
  return r.value && r.numerator == num && r.denominator == den && std::abs(*r.value - num / den) <= 1e-12;
}

TranscriptionResult alternatives(const std::vector<std::string>& texts) {
  TranscriptionResult r;
  for (std::size_t k = 0; k < texts.size(); ++k) r.alternatives.push_back({texts[k], static_cast<int>(k) + 1, std::nullopt});
  return r;
}

fs::path coco_dir() { return fixture_dir() / "coco300"; }
fs::path train_dir() { return fixture_dir() / "train240"; }

// ---------------------------------------------------------------------------

Outcome alignment() {
  std::mt19937_64 gen(20240101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::array<double, 4> deltas{0.0, 0.25, 0.5, 1.0};
  std::size_t mismatches = 0;
  std::size_t violations = 0;
  std::size_t segments = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const double duration = 5.0 + 55.0 * unit(gen);
    std::vector<double> clicks(gen() % 21);
    for (auto& c : clicks) c = duration * unit(gen);
    std::sort(clicks.begin(), clicks.end());
    const double delta = deltas[gen() % deltas.size()];

    const auto got = segment_recording(clicks, duration, delta);
    const auto want = oracle::segments(clicks, duration, delta);
    segments += got.size();
    if (got.size() != want.size()) {
      ++mismatches;
      continue;
    }
    if (got.size() != clicks.size()) ++violations;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].start_s != want[i].start || got[i].end_s != want[i].end || got[i].object_index != i) ++mismatches;
      if (!(got[i].start_s <= clicks[i] && clicks[i] <= got[i].end_s)) ++violations;
      if (got[i].start_s < 0.0 || got[i].start_s != std::max(0.0, clicks[i] - delta)) ++violations;
      const double chained = i + 1 < clicks.size() ? clicks[i + 1] : duration;
      if (got[i].end_s != chained) ++violations;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {mismatches == 0 && violations == 0 && secs < 5.0,
          "1000 streams, " + std::to_string(segments) + " segments, " + std::to_string(mismatches) +
              " oracle mismatches, " + std::to_string(violations) + " invariant violations, " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------------------

std::string pseudo_word(std::mt19937_64& gen) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
  std::string w;
  for (std::size_t n = 3 + gen() % 5; w.size() < n;) w.push_back(letters[gen() % letters.size()]);
  return w;
}

// Surface variants that must normalize back to the canonical phrase.
std::string decorate(const std::string& canonical, std::mt19937_64& gen) {
  std::string s = canonical;
  switch (gen() % 4) {
    case 1: s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0]))); break;
    case 2: s = "  " + s + " "; break;
    case 3: s += "."; break;
    default: break;
  }
  return s;
}

Outcome matcher() {
  std::mt19937_64 gen(77);
  std::size_t exact_cases = 0;
  std::size_t fallback_cases = 0;
  std::size_t violations = 0;

  // Rule (i) and closure over random vocabularies.
  std::vector<std::string> pool;
  std::set<std::string> seen;
  while (pool.size() < 500) {
    std::string w = pseudo_word(gen);
    if (seen.insert(w).second) pool.push_back(w);
  }
  EmbeddingTable table(8);
  std::normal_distribution<double> normal;
  for (const auto& w : pool) {
    std::vector<float> v(8);
    for (auto& x : v) x = static_cast<float>(normal(gen));
    table.add(w, v);
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 5 + gen() % 196;
    std::vector<std::string> names;
    std::set<std::string> name_set;
    while (names.size() < n) {
      std::string name = pool[gen() % pool.size()];
      if (gen() % 3 == 0) name += " " + pool[gen() % pool.size()];
      if (name_set.insert(name).second) names.push_back(name);
    }
    const auto vocab = Vocabulary::from_names("random", names);
    std::vector<std::string> canonical;
    std::vector<std::string> surface;
    for (std::size_t k = 0, m = gen() % 6; k < m; ++k) {
      std::string c = gen() % 2 ? names[gen() % names.size()] : pool[gen() % pool.size()] + " " + pool[gen() % pool.size()];
      surface.push_back(decorate(c, gen));
      canonical.push_back(std::move(c));
    }
    const auto got = resolve(alternatives(surface), vocab, table);
    const auto first = std::find_if(canonical.begin(), canonical.end(), [&](const auto& c) { return name_set.count(c) > 0; });
    if (got && (got->class_index >= names.size() || names[got->class_index] != got->class_name)) ++violations;
    if (first != canonical.end()) {
      ++exact_cases;
      const int rank = static_cast<int>(first - canonical.begin()) + 1;
      if (!got || got->method != ResolutionMethod::exact || got->class_name != *first || got->matched_rank != rank) {
        ++violations;
      }
    } else if (got && got->method == ResolutionMethod::exact) {
      ++violations;
    }
  }

  // Fallback against the brute-force argmax on small tables full of ties.
  const std::vector<std::string> words{"ab", "cd", "ef", "gh", "ij", "kl", "mn", "op", "qr", "st"};
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    oracle::Table otable;
    EmbeddingTable small(3);
    for (const auto& w : words) {
      std::vector<float> v(3);
      for (auto& x : v) x = static_cast<float>(static_cast<int>(gen() % 3) - 1);
      small.add(w, v);
      otable[w] = {v.begin(), v.end()};
    }
    std::vector<std::string> names;
    std::set<std::string> name_set;
    while (names.size() < 5 + gen() % 10) {
      std::string n = words[gen() % words.size()];
      if (gen() % 2) n += " " + words[gen() % words.size()];
      if (name_set.insert(n).second) names.push_back(n);
    }
    const auto vocab = Vocabulary::from_names("small", names);
    std::vector<std::string> alts;
    for (std::size_t k = 0, m = 1 + gen() % 3; k < m; ++k) {
      alts.push_back(gen() % 6 == 0 ? std::string("zz") : words[gen() % words.size()] + (gen() % 2 ? " " + words[gen() % words.size()] : ""));
    }
    const auto got = resolve(alternatives(alts), vocab, small);
    const auto want = oracle::resolve(alts, names, otable);
    if (want && !want->exact) ++fallback_cases;
    const bool agree = got.has_value() == want.has_value() &&
                       (!got || (got->class_name == want->class_name && got->matched_rank == want->rank &&
                                 (got->method == ResolutionMethod::exact) == want->exact));
    if (!agree) ++disagreements;
  }

  // Bundled vocabulary and embeddings.
  const auto ilsvrc = load_vocabulary(data_dir() / "vocabularies" / "ilsvrc200.json");
  const auto bundled = EmbeddingTable::load(data_dir() / "embeddings" / "fixture_embeddings.txt");
  const auto oven = resolve(alternatives({"oven"}), ilsvrc, bundled);
  const bool oven_ok = oven && oven->class_name == "stove" && oven->method == ResolutionMethod::embedding;

  return {violations == 0 && disagreements == 0 && oven_ok && exact_cases > 0 && fallback_cases > 0,
          std::to_string(exact_cases) + " exact cases, " + std::to_string(violations) + " rule violations; " +
              std::to_string(fallback_cases) + " fallback cases, " + std::to_string(disagreements) +
              " oracle disagreements; oven -> " + (oven ? oven->class_name : std::string("none"))};
}

// ---------------------------------------------------------------------------

// Corpus-level counts implied by the scripted behaviours of the replay corpus:
// image i has 2 + i % 3 classes; by i % 30, 0 leaves its last class unspoken,
// 2 adds two clicks named after absent classes, 3 has its first click heard as
// an absent class (rank 1) with the true class at rank 2. Synonyms (1),
// duplicates (4), silent clicks (5), misplaced clicks (6) and consults (7, 17)
// do not change the class sets.
struct Expected {
  double tp = 0;
  double predicted = 0;
  double gt = 0;
};

Expected designed_semantic_counts() {
  Expected e;
  for (int i = 0; i < 300; ++i) {
    const int k = 2 + i % 3;
    const int r = i % 30;
    e.gt += k;
    double tp = k;
    double pred = k;
    if (r == 0) tp -= 1, pred -= 1;
    if (r == 2) pred += 2;
    if (r == 3) tp -= 1;
    e.tp += tp;
    e.predicted += pred;
  }
  return e;
}

std::map<std::string, std::string> read_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = read_file(e.path());
  return out;
}

struct ServiceReplay {
  std::map<std::string, std::string> labels;  // image_id -> labeling bytes
  json report;
  std::size_t http_errors = 0;
};

ServiceReplay replay_through_service(const fs::path& root) {
  const fs::path coco = coco_dir();
  fs::create_directories(root / "data");
  fs::copy_file(coco / "manifest.json", root / "data" / "manifest.json");
  fs::copy(coco / "images", root / "data" / "images");
  json cfg = json::parse(read_file(coco / "workspace.json"));
  cfg["ground_truth"]["coco80"] = (coco / "gt.json").string();
  cfg["asr"]["fixture"] = (coco / "mock_asr.json").string();
  cfg["listen"] = "127.0.0.1:0";
  cfg["data_dir"] = (root / "data").string();
  Service service(ServiceConfig::from_json(cfg, root));
  httplib::Client client("127.0.0.1", service.start());
  client.set_read_timeout(60, 0);

  ServiceReplay out;
  const SessionStore store(coco);
  std::map<std::string, std::string> session_of;
  for (const auto& name : store.list()) {
    const ImageSession s = store.load(name);
    auto& sid = session_of[s.meta.annotator_id];
    if (sid.empty()) {
      auto r = client.Post("/sessions", json{{"annotator_id", s.meta.annotator_id}, {"mode", "main"}}.dump(), "application/json");
      if (!r || r->status != 201) throw Error("session creation failed");
      sid = json::parse(r->body)["session_id"].get<std::string>();
    }
    const std::string base = "/sessions/" + sid + "/images/" + s.meta.image_id;
    auto ev = client.Post(base + "/events", read_file(store.dir(name) / SessionStore::kEvents), "application/x-ndjson");
    auto au = client.Post(base + "/audio", read_file(store.dir(name) / SessionStore::kAudio), "audio/wav");
    auto fin = client.Post(base + "/finalize", "{}", "application/json");
    if (!ev || ev->status != 202 || !au || au->status != 202 || !fin || fin->status != 200) {
      ++out.http_errors;
      continue;
    }
    out.labels[s.meta.image_id] = dump_json(json::parse(fin->body)["labeling"]);
    const fs::path stored = root / "data" / "sessions" / sid / "results" / (s.meta.image_id + ".json");
    if (read_file(stored) != out.labels[s.meta.image_id]) ++out.http_errors;
  }
  auto rep = client.Get("/reports/corpus");
  if (!rep || rep->status != 200) throw Error("corpus report failed");
  out.report = json::parse(rep->body);
  service.stop();
  return out;
}

Outcome end_to_end() {
  TempDir tmp("acceptance-e2e");
  const std::string cli = cli_path().string();
  const std::string store = coco_dir().string();
  std::string err;
  for (const char* run : {"run1", "run2"}) {
    if (run_command(cli + " process --store " + store + " --out " + (tmp / run).string(), nullptr, &err) != 0) {
      return {false, "process failed: " + err};
    }
  }
  const auto run1 = read_dir(tmp / "run1" / "labels");
  const auto run2 = read_dir(tmp / "run2" / "labels");
  const bool runs_identical = run1.size() == 300 && run1 == run2 &&
                              read_file(tmp / "run1" / "report.json") == read_file(tmp / "run2" / "report.json");

  const ServiceReplay svc = replay_through_service(tmp / "service");
  std::size_t service_diffs = svc.http_errors;
  for (const auto& [file, bytes] : run1) {
    const std::string image_id = file.substr(file.find('_') + 1, file.size() - file.find('_') - 1 - 5);
    auto it = svc.labels.find(image_id);
    if (it == svc.labels.end() || it->second != bytes) ++service_diffs;
  }

  const json cli_report = json::parse(read_file(tmp / "run1" / "report.json"));
  const bool reports_equal = cli_report == svc.report;

  const Expected e = designed_semantic_counts();
  const json& sem = cli_report["semantic"];
  const double p = sem["precision"].get<double>();
  const double r = sem["recall"].get<double>();
  const double f1 = sem["f1"].get<double>();
  const double want_p = e.tp / e.predicted;
  const double want_r = e.tp / e.gt;
  const double want_f1 = 2 * want_p * want_r / (want_p + want_r);
  const bool counts_ok = sem["true_positives"].get<double>() == e.tp && sem["predicted"].get<double>() == e.predicted &&
                         sem["ground_truth"].get<double>() == e.gt;
  const bool prf_ok = std::abs(p - want_p) <= 1e-9 && std::abs(r - want_r) <= 1e-9 && std::abs(f1 - want_f1) <= 1e-9;

  return {runs_identical && service_diffs == 0 && reports_equal && counts_ok && prf_ok,
          std::string("CLI runs identical: ") + (runs_identical ? "yes" : "no") + ", service label diffs: " +
              std::to_string(service_diffs) + ", service report equal: " + (reports_equal ? "yes" : "no") + ", P=" + fmt(p) +
              " (want " + fmt(want_p) + ") R=" + fmt(r) + " (want " + fmt(want_r) + ") F1=" + fmt(f1) + " (want " +
              fmt(want_f1) + ")"};
}

// ---------------------------------------------------------------------------

Polygon random_polygon(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  Polygon poly(3 + gen() % 10);
  for (auto& p : poly) p = {coord(gen), coord(gen)};
  return poly;
}

ObjectAnnotation labelled_click(const std::string& cls, std::size_t index, Point p, const Vocabulary& vocab) {
  ObjectAnnotation a;
  a.object_index = index;
  a.click = p;
  a.resolution = LabelResolution{*vocab.index_of(cls), cls, ResolutionMethod::exact, 1, std::nullopt};
  return a;
}

Outcome location() {
  std::mt19937_64 gen(500);
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  std::size_t probes = 0;
  std::size_t discrepancies = 0;
  std::size_t far_discrepancies = 0;
  for (int k = 0; k < 500; ++k) {
    const Polygon poly = random_polygon(gen);
    GroundTruthImage img;
    img.image_id = "p" + std::to_string(k);
    img.size = {100, 100};
    img.instances.push_back({0, "shape", {poly}});
    const auto raster = oracle::rasterize(poly);
    for (int n = 0; n < 200; ++n) {
      const Point q{coord(gen), coord(gen)};
      ++probes;
      const bool got = point_in_class_mask(img, "shape", q) == MaskHit::hit;
      if (got != raster.at(q.x, q.y)) {
        ++discrepancies;
        if (oracle::distance_to_boundary(poly, q) > 1.0) ++far_discrepancies;
      }
    }
  }
  const bool raster_ok = far_discrepancies == 0 && discrepancies * 50 <= probes;

  // 100 countable clicks, 96 on their object, plus clicks naming absent classes.
  const auto vocab = Vocabulary::from_names("loc", {"dog", "person", "cat", "kite"});
  GroundTruthImage img;
  img.image_id = "loc";
  img.size = {400, 400};
  img.instances.push_back({0, "dog", {{{0, 0}, {100, 0}, {100, 100}, {0, 100}}}});
  img.instances.push_back({1, "person", {{{200, 200}, {300, 200}, {250, 300}}}});
  std::vector<ObjectAnnotation> with_absent;
  std::vector<ObjectAnnotation> without_absent;
  for (std::size_t i = 0; i < 100; ++i) {
    const bool dog = i % 2 == 0;
    Point p = dog ? Point{10.0 + static_cast<double>(i % 80), 50.0} : Point{250.0, 220.0 + static_cast<double>(i % 50)};
    if (i % 25 == 3) p = dog ? Point{150.0, 150.0} : Point{350.0, 350.0};
    auto a = labelled_click(dog ? "dog" : "person", with_absent.size(), p, vocab);
    with_absent.push_back(a);
    without_absent.push_back(a);
    if (i % 10 == 0) {
      with_absent.push_back(labelled_click(i % 20 == 0 ? "cat" : "kite", with_absent.size(), {50.0, 50.0}, vocab));
    }
  }
  const auto outcomes = click_outcomes(with_absent, img);
  const Ratio acc = location_accuracy(outcomes);
  const Ratio acc_without = location_accuracy(click_outcomes(without_absent, img));
  const std::size_t ignored = static_cast<std::size_t>(std::count(outcomes.begin(), outcomes.end(), ClickOutcome::ignored));
  const bool fixture_ok = same_ratio(acc, 96, 100) && *acc.value == 0.96 && ignored == 10 &&
                          acc.numerator == acc_without.numerator && acc.denominator == acc_without.denominator;

  return {raster_ok && fixture_ok,
          std::to_string(probes) + " probes, " + std::to_string(discrepancies) + " boundary discrepancies (" +
              std::to_string(far_discrepancies) + " beyond 1 px); fixture accuracy " + ratio_text(acc) + " with " +
              std::to_string(ignored) + " absent-class clicks ignored, without them " + ratio_text(acc_without)};
}

// ---------------------------------------------------------------------------

TrainingImageRecord spoken_record(std::size_t n_spoken, std::size_t hit_rank, std::mt19937_64& gen) {
  // One entry; the typed class is "dog" and appears at hit_rank (0 = absent).
  TrainingImageRecord rec;
  rec.typed.push_back({"dog", {}, 0.0});
  TranscriptionResult r;
  for (std::size_t k = 1; k <= n_spoken; ++k) {
    r.alternatives.push_back({k == hit_rank ? "dog" : pseudo_word(gen), static_cast<int>(k), std::nullopt});
  }
  rec.spoken.push_back(r);
  return rec;
}

Outcome metrics() {
  std::mt19937_64 gen(4242);
  double worst_spearman = 0.0;
  std::size_t spearman_cases = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 3 + gen() % 40;
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (auto& v : x) v = static_cast<double>(gen() % 6);
    for (auto& v : y) v = static_cast<double>(gen() % 4) * 0.5;
    const auto got = spearman_rank_correlation(x, y);
    const auto want = oracle::spearman(x, y);
    if (got.has_value() != want.has_value()) {
      worst_spearman = INFINITY;
      continue;
    }
    if (got) {
      ++spearman_cases;
      worst_spearman = std::max(worst_spearman, std::abs(*got - *want));
    }
  }

  const double f1 = f1_score(0.873, 0.839);

  double worst_path = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Event> ev{{EventKind::image_shown, 0.0, std::nullopt}};
    std::vector<Point> pts;
    Point p{320, 240};
    std::normal_distribution<double> step(0.0, 8.0);
    double t = 0.0;
    for (int k = 0; k < 300; ++k) {
      p.x = std::clamp(p.x + step(gen), 0.0, 640.0);
      p.y = std::clamp(p.y + step(gen), 0.0, 480.0);
      t += 0.02;
      ev.push_back({gen() % 12 == 0 ? EventKind::click : EventKind::mouse_move, t, p});
      pts.push_back(p);
    }
    ev.push_back({EventKind::submit, t + 1.0, std::nullopt});
    const double want = oracle::path_length(pts);
    worst_path = std::max(worst_path, std::abs(mouse_path_length(ev) - want) / std::max(1.0, want));
  }

  // Designed outcome of the i-th spoken training entry: with hints the typed
  // class is first below 931 and within three below 965 of (379 i) mod 1000,
  // without hints below 705 and 847 of (613 i + 101) mod 1000.
  double with1 = 0, with3 = 0, without1 = 0, without3 = 0;
  for (int q = 0; q < 1000; ++q) {
    const int u = (q * 379) % 1000;
    const int v = (q * 613 + 101) % 1000;
    with1 += u < 931;
    with3 += u < 965;
    without1 += v < 705;
    without3 += v < 847;
  }
  Workspace ws(WorkspaceConfig::load(train_dir() / "workspace.json"));
  const SessionStore store(train_dir());
  const CorpusRun run = process_corpus(store, ws.context(), ws.gateway(), ws.pipeline());
  const auto& with = run.training.with_hints;
  const auto& without = run.training.without_hints;
  const Ratio w1 = transcription_recall_at_k(with, 1);
  const Ratio w3 = transcription_recall_at_k(with, 3);
  const Ratio o1 = transcription_recall_at_k(without, 1);
  const Ratio o3 = transcription_recall_at_k(without, 3);
  const bool rates_ok = same_ratio(w1, with1, 1000) && same_ratio(w3, with3, 1000) && same_ratio(o1, without1, 1000) &&
                        same_ratio(o3, without3, 1000);

  std::size_t order_violations = 0;
  if (*w1.value > *w3.value || *o1.value > *o3.value) ++order_violations;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<TrainingImageRecord> records;
    for (std::size_t k = 0, n = 1 + gen() % 30; k < n; ++k) records.push_back(spoken_record(gen() % 6, gen() % 7, gen));
    const Ratio r1 = transcription_recall_at_k(records, 1);
    const Ratio r3 = transcription_recall_at_k(records, 3);
    if (r1.value && r3.value && *r1.value > *r3.value) ++order_violations;
  }

  const bool pass = worst_spearman <= 1e-12 && spearman_cases > 0 && std::abs(f1 - 0.8557) <= 1e-4 && worst_path <= 1e-12 &&
                    rates_ok && order_violations == 0;
  return {pass, "Spearman max error " + fmt(worst_spearman) + " over " + std::to_string(spearman_cases) +
                    " tied samples; F1(0.873, 0.839)=" + fmt(f1) + "; path length max rel error " + fmt(worst_path) +
                    "; with hints R@1 " + ratio_text(w1) + " R@3 " + ratio_text(w3) + ", without R@1 " + ratio_text(o1) +
                    " R@3 " + ratio_text(o3) + "; ordering violations " + std::to_string(order_violations)};
}

// ---------------------------------------------------------------------------

std::vector<TypedEntry> typed_entries(const std::vector<std::string>& names) {
  std::vector<TypedEntry> out;
  for (const auto& n : names) out.push_back({n, {}, 0.0});
  return out;
}

// 80 images whose GT sizes sum to gt_total, with `correct` GT classes typed.
std::optional<RoundSummary> graded_round(const Vocabulary& vocab, std::size_t gt_total, std::size_t correct) {
  TrainingConfig config;
  config.images_per_round = 80;
  config.min_recall = 0.80;
  config.min_precision = 0.85;
  TrainingRound round(config);
  const auto names = vocab.phrase_hints();
  std::size_t gt_left = gt_total;
  std::size_t correct_left = correct;
  for (std::size_t i = 0; i < 80; ++i) {
    const std::size_t n = gt_left / (80 - i) + (gt_left % (80 - i) != 0 ? 1 : 0);
    std::set<std::string> gt(names.begin() + static_cast<long>(i % 20), names.begin() + static_cast<long>(i % 20 + n));
    const std::size_t hit = std::min(n, correct_left / (80 - i) + (correct_left % (80 - i) != 0 ? 1 : 0));
    std::vector<std::string> typed(gt.begin(), std::next(gt.begin(), static_cast<long>(hit)));
    round.add("img" + std::to_string(i), typed_entries(typed), gt, vocab, {});
    gt_left -= n;
    correct_left -= hit;
  }
  if (!round.complete()) return std::nullopt;
  return round.summary();
}

Outcome trainer() {
  std::mt19937_64 gen(99);
  const auto vocab = load_vocabulary(data_dir() / "vocabularies" / "coco80.json");
  const auto names = vocab.phrase_hints();
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> typed;
    std::set<std::string> gt;
    for (std::size_t k = 0, n = gen() % 10; k < n; ++k) typed.push_back(names[gen() % 25]);
    for (std::size_t k = 0, n = gen() % 8; k < n; ++k) gt.insert(names[gen() % 25]);
    const Feedback fb = grade_image(typed, gt, vocab);
    const auto want = oracle::grade(typed, {gt.begin(), gt.end()});
    if (fb.correct != want.correct || fb.missed != want.missed || fb.wrong != want.wrong) ++disagreements;
  }

  const auto at_threshold = graded_round(vocab, 400, 320);
  const auto below = graded_round(vocab, 1000, 799);
  const bool rounds_ok = at_threshold && below && at_threshold->correct == 320 && at_threshold->ground_truth == 400 &&
                         at_threshold->recall == 0.80 && at_threshold->passed && below->correct == 799 &&
                         below->ground_truth == 1000 && below->recall == 0.799 && !below->passed;

  std::vector<TrainingImageRecord> records(40);
  for (std::size_t i = 0; i < 200; ++i) {
    records[i % 40].typed.push_back({i == 117 ? std::string("red panda") : names[i % names.size()], {}, 0.0});
  }
  const auto usage = vocabulary_usage_rate(records, vocab);
  const bool usage_ok = usage && *usage == 199.0 / 200.0 && std::abs(*usage - 0.995) <= 1e-12;

  return {disagreements == 0 && rounds_ok && usage_ok,
          std::to_string(disagreements) + " grading disagreements in 200 pairs; round 320/400 recall " +
              (at_threshold && at_threshold->recall ? fmt(*at_threshold->recall) : "n/a") + " passed=" +
              (at_threshold && at_threshold->passed ? "yes" : "no") + ", round 799/1000 recall " +
              (below && below->recall ? fmt(*below->recall) : "n/a") + " passed=" + (below && below->passed ? "yes" : "no") +
              "; vocabulary usage " + (usage ? fmt(*usage) : "n/a")};
}

// ---------------------------------------------------------------------------

// Fails every attempt for one object of one session.
class FaultyGateway final : public AsrGateway {
 public:
  FaultyGateway(const AsrGateway& inner, SegmentRef broken) : inner_(inner), broken_(std::move(broken)) {}
  TranscriptionResult transcribe(const AudioRef& segment, const SegmentRef& ref, const AsrConfig& config) const override {
    if (ref == broken_) throw TransportError("connection reset");
    return inner_.transcribe(segment, ref, config);
  }

 private:
  const AsrGateway& inner_;
  SegmentRef broken_;
};

Outcome robustness() {
  TempDir tmp("acceptance-robust");
  const fs::path copy = tmp / "coco300";
  fs::copy(coco_dir(), copy, fs::copy_options::recursive);
  const std::string victim = "a03_100150";
  write_file_atomic(copy / victim / SessionStore::kAudio, "RIFF\x10\0\0\0WAVEjunk");

  Workspace ws(WorkspaceConfig::load(copy / "workspace.json"));
  ws.pipeline().retry.max_attempts = 2;
  ws.pipeline().retry.backoff = std::chrono::milliseconds(0);
  const SessionStore store(copy);
  const CorpusRun run = process_corpus(store, ws.context(), ws.gateway(), ws.pipeline());
  const bool corrupt_ok =
      run.labelings.size() == 299 && run.failures.size() == 1 && run.failures[0].session.find(victim) != std::string::npos;

  const ImageSession s = store.load("a01_100001");
  const FaultyGateway faulty(ws.gateway(), {s.meta.key(), 1});
  bool aborted = false;
  ImageLabeling labeling;
  try {
    labeling = process_image(s, store.load_audio("a01_100001"), ws.context().matcher("coco80"), faulty, ws.pipeline());
  } catch (const std::exception&) {
    aborted = true;
  }
  const bool fault_ok = !aborted && labeling.annotations.size() > 1 && labeling.annotations[1].unlabeled &&
                        labeling.annotations[1].transcription.failed() && !labeling.annotations[0].unlabeled &&
                        !labeling.warnings.empty();

  return {corrupt_ok && fault_ok,
          std::to_string(run.labelings.size()) + "/300 images labelled, " + std::to_string(run.failures.size()) +
              " failure(s)" + (run.failures.empty() ? "" : " (" + run.failures[0].session + ")") +
              "; failing segment " + (aborted ? "aborted the image" : (fault_ok ? "left unlabeled" : "mishandled"))};
}

}  // namespace

std::vector<Criterion> all_criteria() {
  return {
      {"alignment-oracle-equivalence", alignment},
      {"matcher-closed-world", matcher},
      {"end-to-end-replay", end_to_end},
      {"location-accuracy", location},
      {"metrics-oracles", metrics},
      {"trainer-grading", trainer},
      {"pipeline-robustness", robustness},
  };
}

}  // namespace acceptance
