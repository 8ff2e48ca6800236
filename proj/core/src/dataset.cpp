#include "speechlabel/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "speechlabel/error.hpp"

namespace speechlabel {
namespace {

std::string id_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError("ids must be strings or integers");
}

bool on_segment(Point a, Point b, Point p) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double scale = std::max({std::fabs(b.x - a.x), std::fabs(b.y - a.y), 1.0});
  if (std::fabs(cross) > 1e-9 * scale) return false;
  return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) && p.y >= std::min(a.y, b.y) &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

double polygon_area(const Polygon& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    twice += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
  }
  return std::fabs(twice) / 2.0;
}

double Instance::area() const {
  double a = 0.0;
  for (const auto& p : polygons) a += polygon_area(p);
  return a;
}

bool point_in_polygon(const Polygon& poly, Point p) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[j];
    const Point b = poly[i];
    if (on_segment(a, b, p)) return true;
    // Half-open rule on y so a vertex shared by two edges is counted once.
    if ((b.y > p.y) != (a.y > p.y)) {
      const double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::set<std::string> GroundTruthImage::class_set() const {
  std::set<std::string> out;
  for (const auto& i : instances) out.insert(i.class_name);
  return out;
}

bool GroundTruthImage::has_class(std::string_view normalized) const {
  return std::any_of(instances.begin(), instances.end(),
                     [&](const Instance& i) { return i.class_name == normalized; });
}

const GroundTruthImage* GroundTruthSet::find(std::string_view image_id) const {
  auto it = images.find(std::string(image_id));
  return it == images.end() ? nullptr : &it->second;
}

std::string_view to_string(MaskHit h) {
  switch (h) {
    case MaskHit::hit: return "hit";
    case MaskHit::miss: return "miss";
    case MaskHit::class_absent: return "class_absent";
  }
  return "unknown";
}

MaskHit point_in_class_mask(const GroundTruthImage& gt, std::string_view class_name, Point p) {
  bool present = false;
  for (const auto& inst : gt.instances) {
    if (inst.class_name != class_name) continue;
    present = true;
    for (const auto& poly : inst.polygons) {
      if (point_in_polygon(poly, p)) return MaskHit::hit;
    }
  }
  return present ? MaskHit::miss : MaskHit::class_absent;
}

const Instance* instance_at(const GroundTruthImage& gt, std::string_view class_name, Point p) {
  const Instance* best = nullptr;
  double best_area = -1.0;
  for (const auto& inst : gt.instances) {
    if (inst.class_name != class_name) continue;
    const bool inside = std::any_of(inst.polygons.begin(), inst.polygons.end(),
                                    [&](const Polygon& poly) { return point_in_polygon(poly, p); });
    if (inside && inst.area() > best_area) {
      best = &inst;
      best_area = inst.area();
    }
  }
  return best;
}

GroundTruthSet parse_ground_truth(const nlohmann::json& doc, const Vocabulary& vocab) {
  if (!doc.is_object()) throw ParseError("ground truth must be a JSON object");
  for (const char* key : {"images", "categories", "annotations"}) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ParseError(std::string("ground truth needs a \"") + key + "\" array");
    }
  }
  GroundTruthSet set;
  set.vocabulary_id = doc.value("vocabulary", vocab.id());
  if (set.vocabulary_id != vocab.id()) {
    throw ValidationError("ground truth references vocabulary '" + set.vocabulary_id + "', loaded '" + vocab.id() + "'");
  }

  for (const auto& img : doc["images"]) {
    GroundTruthImage g;
    g.image_id = id_string(img.at("id"));
    g.size = {img.at("width").get<int>(), img.at("height").get<int>()};
    g.file_name = img.value("file_name", std::string{});
    if (g.size.width <= 0 || g.size.height <= 0) throw ValidationError("image " + g.image_id + " has no size");
    if (!set.images.emplace(g.image_id, g).second) throw ValidationError("duplicate image id " + g.image_id);
  }

  std::map<std::string, std::size_t> categories;
  std::vector<std::string> problems;
  for (const auto& cat : doc["categories"]) {
    const std::string id = id_string(cat.at("id"));
    const std::string name = cat.at("name").get<std::string>();
    auto idx = vocab.index_of(name);
    if (!idx) {
      problems.push_back("category '" + name + "' is not in vocabulary '" + vocab.id() + "'");
      continue;
    }
    categories[id] = *idx;
  }

  std::size_t n = 0;
  for (const auto& ann : doc["annotations"]) {
    ++n;
    const std::string image_id = id_string(ann.at("image_id"));
    const std::string cat_id = id_string(ann.at("category_id"));
    auto img = set.images.find(image_id);
    if (img == set.images.end()) {
      problems.push_back("annotation " + std::to_string(n) + " references unknown image " + image_id);
      continue;
    }
    auto cat = categories.find(cat_id);
    if (cat == categories.end()) {
      problems.push_back("annotation " + std::to_string(n) + " references unknown category id " + cat_id);
      continue;
    }
    Instance inst;
    inst.class_index = cat->second;
    inst.class_name = vocab[cat->second].normalized;
    bool degenerate = false;
    const ImageSize size = img->second.size;
    for (const auto& flat : ann.value("segmentation", nlohmann::json::array())) {
      if (!flat.is_array() || flat.size() % 2 != 0 || flat.size() < 6) {
        degenerate = true;
        break;
      }
      Polygon poly;
      for (std::size_t k = 0; k < flat.size(); k += 2) {
        const Point p{flat[k].get<double>(), flat[k + 1].get<double>()};
        if (p.x < 0 || p.y < 0 || p.x > size.width || p.y > size.height) degenerate = true;
        poly.push_back(p);
      }
      inst.polygons.push_back(std::move(poly));
    }
    if (degenerate || inst.polygons.empty()) {
      set.warnings.push_back("annotation " + std::to_string(n) + " (image " + image_id +
                             "): degenerate or out-of-bounds polygon, instance dropped");
      continue;
    }
    img->second.instances.push_back(std::move(inst));
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return set;
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ground truth file " + path.string());
  try {
    return parse_ground_truth(nlohmann::json::parse(in), vocab);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace speechlabel
