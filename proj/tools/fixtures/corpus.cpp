#include "corpus.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "speechlabel/audio.hpp"
#include "speechlabel/events.hpp"
#include "speechlabel/session_store.hpp"
#include "speechlabel/vocabulary.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace speechlabel;

namespace {

const std::vector<std::string> kCoco = {
    "person", "bicycle", "car", "motorcycle", "airplane", "bus", "train", "truck", "boat", "traffic light",
    "fire hydrant", "stop sign", "parking meter", "bench", "bird", "cat", "dog", "horse", "sheep", "cow",
    "elephant", "bear", "zebra", "giraffe", "backpack", "umbrella", "handbag", "tie", "suitcase", "frisbee",
    "skis", "snowboard", "sports ball", "kite", "baseball bat", "baseball glove", "skateboard", "surfboard",
    "tennis racket", "bottle", "wine glass", "cup", "fork", "knife", "spoon", "bowl", "banana", "apple",
    "sandwich", "orange", "broccoli", "carrot", "hot dog", "pizza", "donut", "cake", "chair", "couch",
    "potted plant", "bed", "dining table", "toilet", "tv", "laptop", "mouse", "remote", "keyboard",
    "cell phone", "microwave", "oven", "toaster", "sink", "refrigerator", "book", "clock", "vase", "scissors",
    "teddy bear", "hair drier", "toothbrush"};

const std::vector<std::string> kIlsvrc = {
    "accordion", "airplane", "ant", "antelope", "apple", "armadillo", "artichoke", "axe", "baby bed", "backpack",
    "bagel", "balance beam", "banana", "band aid", "banjo", "baseball", "basketball", "bathing cap", "beaker",
    "bear", "bee", "bell pepper", "bench", "bicycle", "binder", "bird", "bookshelf", "bow tie", "bow", "bowl",
    "brassiere", "burrito", "bus", "butterfly", "camel", "can opener", "car", "cart", "cattle", "cello",
    "centipede", "chain saw", "chair", "chime", "cocktail shaker", "coffee maker", "computer keyboard",
    "computer mouse", "corkscrew", "cream", "croquet ball", "crutch", "cucumber", "cup or mug", "diaper",
    "digital clock", "dishwasher", "dog", "domestic cat", "dragonfly", "drum", "dumbbell", "electric fan",
    "elephant", "face powder", "fig", "filing cabinet", "flower pot", "flute", "fox", "french horn", "frog",
    "frying pan", "giant panda", "goldfish", "golf ball", "golfcart", "guacamole", "guitar", "hair dryer",
    "hair spray", "hamburger", "hammer", "hamster", "harmonica", "harp", "hat with a wide brim", "head cabbage",
    "helmet", "hippopotamus", "horizontal bar", "horse", "hotdog", "iPod", "isopod", "jellyfish", "koala bear",
    "ladle", "ladybug", "lamp", "laptop", "lemon", "lion", "lipstick", "lizard", "lobster", "maillot", "maraca",
    "microphone", "microwave", "milk can", "miniskirt", "monkey", "motorcycle", "mushroom", "nail", "neck brace",
    "oboe", "orange", "otter", "pencil box", "pencil sharpener", "perfume", "person", "piano", "pineapple",
    "ping-pong ball", "pitcher", "pizza", "plastic bag", "plate rack", "pomegranate", "popsicle", "porcupine",
    "power drill", "pretzel", "printer", "puck", "punching bag", "purse", "rabbit", "racket", "ray", "red panda",
    "refrigerator", "remote control", "rubber eraser", "rugby ball", "ruler", "salt or pepper shaker",
    "saxophone", "scorpion", "screwdriver", "seal", "sheep", "ski", "skunk", "snail", "snake", "snowmobile",
    "snowplow", "soap dispenser", "soccer ball", "sofa", "spatula", "squirrel", "starfish", "stethoscope",
    "stove", "strainer", "strawberry", "stretcher", "sunglasses", "swimming trunks", "swine", "syringe", "table",
    "tape player", "tennis ball", "tick", "tie", "tiger", "toaster", "traffic light", "train", "trombone",
    "trumpet", "turtle", "tv or monitor", "unicycle", "vacuum", "violin", "volleyball", "waffle iron", "washer",
    "water bottle", "watercraft", "whale", "wine bottle", "zebra"};

// Near-synonyms: the token's vector is its base's plus a little noise.
const std::map<std::string, std::string> kSynonyms = {
    {"aeroplane", "airplane"}, {"automobile", "car"}, {"bike", "bicycle"}, {"calf", "cow"},
    {"cellphone", "phone"},    {"doughnut", "donut"},  {"kitten", "cat"},   {"lamb", "sheep"},
    {"lorry", "truck"},        {"motorbike", "motorcycle"}, {"oven", "stove"}, {"pony", "horse"},
    {"puppy", "dog"},          {"ship", "boat"},       {"signal", "light"}, {"sofa", "couch"},
    {"television", "tv"},      {"telly", "tv"}};

// Single-token COCO classes with a synonym, used for the embedding fallback images.
const std::vector<std::pair<std::string, std::string>> kSpokenSynonyms = {
    {"dog", "puppy"},   {"cat", "kitten"},   {"couch", "sofa"},       {"motorcycle", "motorbike"},
    {"airplane", "aeroplane"}, {"bicycle", "bike"}, {"car", "automobile"}, {"truck", "lorry"},
    {"horse", "pony"},  {"sheep", "lamb"},   {"boat", "ship"},        {"cow", "calf"},
    {"donut", "doughnut"}};

const std::vector<std::string> kFiller = {"the", "please", "thing", "stuff", "object", "kitty", "doggo", "gadget"};

constexpr int kDim = 32;
constexpr int kWidth = 640;
constexpr int kHeight = 480;
constexpr std::uint32_t kRate = 4000;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double gauss() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
};

std::string slug(const std::string& name) {
  std::string s = normalize(name);
  for (char& c : s) {
    if (c == ' ') c = '-';
  }
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json vocabulary_json(const std::string& id, const std::vector<std::string>& names) {
  json classes = json::array();
  for (const auto& n : names) classes.push_back({{"name", n}, {"symbol_uri", "symbols/" + slug(n) + ".svg"}});
  return {{"name", id}, {"classes", classes}};
}

std::vector<std::string> tokens(const std::string& name) {
  std::vector<std::string> out;
  std::istringstream in(normalize(name));
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double sec(int ms) { return ms / 1000.0; }

// ---- scripted sessions ----

struct ScriptClick {
  int t_ms = 0;
  Point p;
  std::vector<std::string> with_hints;
  std::vector<std::string> without_hints;
  bool speaks = true;
};

struct Script {
  std::string annotator;
  std::string image_id;
  SessionMode mode = SessionMode::main;
  std::vector<ScriptClick> clicks;
  std::optional<std::pair<int, int>> consult_ms;
  int review_ms = 3900;
  std::vector<TypedEntry> typed;
};

constexpr int kSpeechLeadMs = 300;
constexpr int kSpeechTailMs = 600;

int submit_ms(const Script& s) {
  const int last = s.clicks.empty() ? 1000 : s.clicks.back().t_ms + kSpeechTailMs;
  return last + s.review_ms;
}

std::vector<Event> script_events(const Script& s) {
  std::vector<Event> ev;
  ev.push_back({EventKind::image_shown, 0.0, std::nullopt});
  if (s.consult_ms) {
    ev.push_back({EventKind::show_classes_open, sec(s.consult_ms->first), std::nullopt});
    ev.push_back({EventKind::show_classes_close, sec(s.consult_ms->second), std::nullopt});
  }
  Point pos{kWidth / 2.0, kHeight / 2.0};
  for (const auto& c : s.clicks) {
    // 25 Hz pointer trace over the 0.8 s before the click.
    for (int step = 1; step < 20; ++step) {
      const double f = step / 20.0;
      const Point q{std::round((pos.x + (c.p.x - pos.x) * f) * 10.0) / 10.0,
                    std::round((pos.y + (c.p.y - pos.y) * f) * 10.0) / 10.0};
      ev.push_back({EventKind::mouse_move, sec(c.t_ms - 800 + 40 * step), q});
    }
    ev.push_back({EventKind::click, sec(c.t_ms), c.p});
    pos = c.p;
  }
  ev.push_back({EventKind::submit, sec(submit_ms(s)), std::nullopt});
  return ev;
}

AudioRef script_audio(const Script& s) {
  AudioRef a;
  a.sample_rate = kRate;
  a.samples.assign(static_cast<std::size_t>(submit_ms(s)) * kRate / 1000, 0);
  for (const auto& c : s.clicks) {
    if (!c.speaks) continue;
    const std::size_t b = static_cast<std::size_t>(c.t_ms - kSpeechLeadMs) * kRate / 1000;
    const std::size_t e = static_cast<std::size_t>(c.t_ms + kSpeechTailMs) * kRate / 1000;
    for (std::size_t i = b; i < e && i < a.samples.size(); ++i) {
      a.samples[i] = static_cast<std::int16_t>(8000.0 * std::sin(2.0 * M_PI * 300.0 * static_cast<double>(i) / kRate));
    }
  }
  return a;
}

json alternatives_json(const std::vector<std::string>& alts) {
  json arr = json::array();
  for (std::size_t r = 0; r < alts.size(); ++r) {
    arr.push_back({{"text", alts[r]}, {"confidence", 0.9 - 0.2 * static_cast<double>(r)}});
  }
  return arr;
}

void add_mock_entries(const Script& s, json& entries) {
  for (std::size_t i = 0; i < s.clicks.size(); ++i) {
    const auto& c = s.clicks[i];
    json e{{"key", {{"session", s.annotator + ":" + s.image_id}, {"object_index", i}}},
           {"with_hints", alternatives_json(c.with_hints)},
           {"without_hints", alternatives_json(c.without_hints)}};
    if (c.speaks) {
      const int seg_start = std::max(0, c.t_ms - 500);
      e["speech"] = json::array({json::array({sec(c.t_ms - kSpeechLeadMs - seg_start), sec(c.t_ms + kSpeechTailMs - seg_start)})});
    } else {
      e["speech"] = json::array();
    }
    entries.push_back(std::move(e));
  }
}

void save_script(const SessionStore& store, const Script& s) {
  ImageSession session;
  session.name = s.annotator + "_" + s.image_id;
  session.meta = {s.image_id, {kWidth, kHeight}, "coco80", s.annotator, s.mode};
  session.events = script_events(s);
  session.typed = s.typed;
  store.save(session, script_audio(s));
}

// ---- ground truth geometry ----

struct Cell {
  double cx;
  double cy;
};

Cell cell(int j) { return {80.0 + 160.0 * (j % 4), 120.0 + 240.0 * (j / 4)}; }

json octagon(Cell c, double r) {
  json flat = json::array();
  for (int k = 0; k < 8; ++k) {
    const double a = k * M_PI / 4.0;
    flat.push_back(std::round((c.cx + r * std::cos(a)) * 2.0) / 2.0);
    flat.push_back(std::round((c.cy + r * std::sin(a)) * 2.0) / 2.0);
  }
  return flat;
}

json categories_json() {
  json cats = json::array();
  for (std::size_t i = 0; i < kCoco.size(); ++i) cats.push_back({{"id", i + 1}, {"name", kCoco[i]}});
  return cats;
}

std::size_t coco_index(const std::string& name) {
  for (std::size_t i = 0; i < kCoco.size(); ++i) {
    if (kCoco[i] == name) return i;
  }
  throw std::runtime_error("not a COCO class: " + name);
}

// Distinct classes from the arithmetic sequence (a + m*b) mod 80, skipping `avoid`.
std::vector<std::size_t> pick_classes(std::size_t count, std::size_t a, std::size_t b, const std::set<std::size_t>& avoid) {
  std::vector<std::size_t> out;
  std::set<std::size_t> seen = avoid;
  for (std::size_t m = 0; out.size() < count; ++m) {
    const std::size_t c = (a + m * b) % kCoco.size();
    if (seen.insert(c).second) out.push_back(c);
  }
  return out;
}

void write_ppm(const fs::path& path, int seed) {
  std::string img = "P6\n64 48\n255\n";
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      const int cellv = (x / 16) + 4 * (y / 24);
      img.push_back(static_cast<char>((cellv * 37 + seed * 11) % 256));
      img.push_back(static_cast<char>((cellv * 71 + seed * 5) % 256));
      img.push_back(static_cast<char>((cellv * 13 + seed * 3) % 256));
    }
  }
  write_text(path, img);
}

json workspace_json(const fs::path& data_dir) {
  const fs::path d = fs::absolute(data_dir);
  return {{"vocabularies", {(d / "vocabularies" / "coco80.json").string(), (d / "vocabularies" / "ilsvrc200.json").string()}},
          {"embeddings", (d / "embeddings" / "fixture_embeddings.txt").string()},
          {"ground_truth", {{"coco80", "gt.json"}}},
          {"asr", {{"mode", "mock"}, {"fixture", "mock_asr.json"}}},
          {"training", {{"images_per_round", 80}, {"min_recall", 0.80}, {"min_precision", 0.85}, {"vocabulary_id", "coco80"}}}};
}

std::vector<std::string> exact(const std::string& name) { return {name, name + "s", "the " + name}; }

}  // namespace

void write_reference_data(const fs::path& data_dir) {
  write_text(data_dir / "vocabularies" / "coco80.json", vocabulary_json("coco80", kCoco).dump(2) + "\n");
  write_text(data_dir / "vocabularies" / "ilsvrc200.json", vocabulary_json("ilsvrc200", kIlsvrc).dump(2) + "\n");

  std::set<std::string> base;
  for (const auto* list : {&kCoco, &kIlsvrc}) {
    for (const auto& n : *list) {
      for (const auto& t : tokens(n)) base.insert(t);
    }
  }
  for (const auto& f : kFiller) base.insert(f);
  for (const auto& [syn, root] : kSynonyms) {
    base.erase(syn);
    base.insert(root);
  }

  Rng rng(20160321);
  std::map<std::string, std::vector<double>> vectors;
  for (const auto& t : base) {
    std::vector<double> v(kDim);
    for (auto& x : v) x = rng.gauss();
    vectors[t] = v;
  }
  for (const auto& [syn, root] : kSynonyms) {
    std::vector<double> v = vectors.at(root);
    for (auto& x : v) x += 0.15 * rng.gauss();
    vectors[syn] = v;
  }

  std::ostringstream out;
  out << vectors.size() << ' ' << kDim << '\n' << std::fixed << std::setprecision(6);
  for (const auto& [t, v] : vectors) {
    out << t;
    for (double x : v) out << ' ' << x;
    out << '\n';
  }
  write_text(data_dir / "embeddings" / "fixture_embeddings.txt", out.str());
}

void write_main_corpus(const fs::path& data_dir, const fs::path& out) {
  fs::remove_all(out);
  const SessionStore store(out);
  json images = json::array();
  json annotations = json::array();
  json manifest_images = json::array();
  json queue = json::array();
  json entries = json::array();
  int ann_id = 1;

  for (int i = 0; i < 300; ++i) {
    Script s;
    s.annotator = "a0" + std::to_string(i / 60 + 1);
    s.image_id = std::to_string(100000 + i);
    const int r = i % 30;
    const std::size_t k = 2 + static_cast<std::size_t>(i % 3);

    std::vector<std::size_t> gt;
    std::string synonym;
    if (r == 1) {
      const auto& [cls, syn] = kSpokenSynonyms[static_cast<std::size_t>(i / 30) % kSpokenSynonyms.size()];
      gt.push_back(coco_index(cls));
      synonym = syn;
    }
    for (std::size_t c : pick_classes(k - gt.size(), static_cast<std::size_t>(i * 7 + 3), 13, {gt.begin(), gt.end()})) {
      gt.push_back(c);
    }
    const std::vector<std::size_t> absent = pick_classes(2, static_cast<std::size_t>(i * 7 + 43), 13, {gt.begin(), gt.end()});

    images.push_back({{"id", 100000 + i}, {"width", kWidth}, {"height", kHeight}, {"file_name", s.image_id + ".ppm"}});
    std::vector<double> radius(k);
    for (std::size_t j = 0; j < k; ++j) {
      radius[j] = 62.0 - 10.0 * static_cast<double>(j) + 6.0 * static_cast<double>((i + static_cast<int>(j)) % 3);
      annotations.push_back({{"id", ann_id++},
                             {"image_id", 100000 + i},
                             {"category_id", gt[j] + 1},
                             {"segmentation", json::array({octagon(cell(static_cast<int>(j)), radius[j])})}});
    }

    int t = 2000;
    if (r == 7 || r == 17) {
      s.consult_ms = {{1000, 8800}};
      t = 10000;
    }
    auto next_gap = [&](std::size_t j) { return 1600 + 100 * ((i * 7 + static_cast<int>(j) * 3) % 9); };
    std::size_t j_click = 0;
    auto push = [&](Point p, std::vector<std::string> alts, bool speaks) {
      if (j_click > 0) t += next_gap(j_click);
      ScriptClick c{t, p, alts, alts, speaks};
      s.clicks.push_back(std::move(c));
      ++j_click;
    };

    for (std::size_t j = 0; j < k; ++j) {
      if (r == 0 && j == k - 1) continue;  // one class left unlabelled
      const Cell c = cell(static_cast<int>(j));
      Point p{c.cx + 5.0, c.cy + 3.0};
      if (r == 6 && j == 0) p = {c.cx, c.cy + radius[j] + 20.0};  // beside the object
      const std::string& name = kCoco[gt[j]];
      std::vector<std::string> alts = exact(name);
      if (r == 1 && j == 0) alts = {synonym, synonym + "s"};
      if (r == 3 && j == 0) alts = {kCoco[absent[0]], name};  // misrecognised as another class
      push(p, alts, true);
    }
    if (r == 2) {
      for (std::size_t a = 0; a < 2; ++a) {
        const Cell c = cell(4 + static_cast<int>(a));
        push({c.cx, c.cy}, exact(kCoco[absent[a]]), true);
      }
    }
    if (r == 4) {
      const Cell c = cell(0);
      push({c.cx - 6.0, c.cy - 4.0}, exact(kCoco[gt[0]]), true);
    }
    if (r == 5) {
      const Cell c = cell(6);
      push({c.cx, c.cy}, {}, false);
    }
    s.review_ms = 3900 + 100 * (i % 5);

    save_script(store, s);
    add_mock_entries(s, entries);
    manifest_images.push_back(
        {{"image_id", s.image_id}, {"file", s.image_id + ".ppm"}, {"width", kWidth}, {"height", kHeight}, {"vocabulary_id", "coco80"}});
    queue.push_back(s.image_id);
    write_ppm(out / "images" / (s.image_id + ".ppm"), i);
  }

  const json gt_doc{{"vocabulary", "coco80"}, {"images", images}, {"categories", categories_json()}, {"annotations", annotations}};
  write_text(out / "gt.json", gt_doc.dump(1) + "\n");
  write_text(out / "mock_asr.json", json{{"entries", entries}}.dump(1) + "\n");
  write_text(out / "workspace.json", workspace_json(data_dir).dump(2) + "\n");
  write_text(out / "manifest.json",
             json{{"images", manifest_images}, {"queues", {{"main", queue}, {"training", json::array()}}}}.dump(1) + "\n");
}

void write_training_corpus(const fs::path& data_dir, const fs::path& out) {
  fs::remove_all(out);
  const SessionStore store(out);
  json images = json::array();
  json annotations = json::array();
  json entries = json::array();
  int ann_id = 1;

  const std::map<int, std::string> out_of_vocabulary = {{17, "doggo"},  {217, "kitty"},  {417, "thing"},
                                                        {617, "gadget"}, {817, "stuff"}, {1017, "object"}};
  int countable = 0;
  for (int i = 0; i < 240; ++i) {
    Script s;
    s.annotator = "t0" + std::to_string(i / 80 + 1);
    s.image_id = std::to_string(200000 + i);
    s.mode = SessionMode::training;
    const auto gt = pick_classes(5, static_cast<std::size_t>(i * 11 + 5), 17, {});
    images.push_back({{"id", 200000 + i}, {"width", kWidth}, {"height", kHeight}, {"file_name", s.image_id + ".ppm"}});

    int t = 2000;
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const Cell c = cell(static_cast<int>(j));
      const double r = 60.0 - 6.0 * static_cast<double>(j);
      annotations.push_back({{"id", ann_id++},
                             {"image_id", 200000 + i},
                             {"category_id", gt[j] + 1},
                             {"segmentation", json::array({octagon(c, r)})}});
      if (j > 0) t += 1700 + 100 * ((i + static_cast<int>(j)) % 5);

      const int entry = i * 5 + static_cast<int>(j);
      const auto oov = out_of_vocabulary.find(entry);
      const std::string typed = oov != out_of_vocabulary.end() ? oov->second : kCoco[gt[j]];
      ScriptClick click{t, {c.cx + 4.0, c.cy - 2.0}, {}, {}, entry % 6 != 5};
      if (click.speaks) {
        const std::vector<std::string> d = {typed + "s", "the " + typed, typed + " please"};
        auto arrange = [&](int code, int rank1_below, int top3_below) -> std::vector<std::string> {
          if (code < rank1_below) return {typed, d[0], d[1]};
          if (code < top3_below) return code % 2 ? std::vector<std::string>{d[0], typed, d[1]}
                                                 : std::vector<std::string>{d[0], d[1], typed};
          return d;
        };
        click.with_hints = arrange((countable * 379) % 1000, 931, 965);
        click.without_hints = arrange((countable * 613 + 101) % 1000, 705, 847);
        ++countable;
      }
      s.typed.push_back({typed, click.p, sec(t)});
      s.clicks.push_back(std::move(click));
    }
    save_script(store, s);
    add_mock_entries(s, entries);
  }

  const json gt_doc{{"vocabulary", "coco80"}, {"images", images}, {"categories", categories_json()}, {"annotations", annotations}};
  write_text(out / "gt.json", gt_doc.dump(1) + "\n");
  write_text(out / "mock_asr.json", json{{"entries", entries}}.dump(1) + "\n");
  write_text(out / "workspace.json", workspace_json(data_dir).dump(2) + "\n");
}

}  // namespace fixtures
