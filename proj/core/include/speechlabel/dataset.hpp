#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "speechlabel/events.hpp"
#include "speechlabel/vocabulary.hpp"

namespace speechlabel {

using Polygon = std::vector<Point>;

struct Instance {
  std::size_t class_index = 0;
  std::string class_name;  // normalized
  std::vector<Polygon> polygons;

  // Sum of the shoelace areas of the parts, in pixels.
  double area() const;
};

struct GroundTruthImage {
  std::string image_id;
  ImageSize size;
  std::string file_name;
  std::vector<Instance> instances;

  std::set<std::string> class_set() const;
  bool has_class(std::string_view normalized) const;
};

struct GroundTruthSet {
  std::string vocabulary_id;
  std::map<std::string, GroundTruthImage> images;
  std::vector<std::string> warnings;

  const GroundTruthImage* find(std::string_view image_id) const;
};

// COCO-style subset:
//   {"images":[{"id","width","height","file_name"}], "categories":[{"id","name"}],
//    "annotations":[{"image_id","category_id","segmentation":[[x1,y1,...]]}]}
// Category names must belong to vocab. Degenerate or out-of-bounds polygons
// drop their instance with a warning.
GroundTruthSet parse_ground_truth(const nlohmann::json& doc, const Vocabulary& vocab);
GroundTruthSet load_ground_truth(const std::filesystem::path& path, const Vocabulary& vocab);

double polygon_area(const Polygon& poly);

// Even-odd rule; points on an edge or vertex count as inside.
bool point_in_polygon(const Polygon& poly, Point p);

enum class MaskHit { hit, miss, class_absent };
std::string_view to_string(MaskHit h);

MaskHit point_in_class_mask(const GroundTruthImage& gt, std::string_view class_name, Point p);

// Instance of the class containing p; the largest by area when several do.
const Instance* instance_at(const GroundTruthImage& gt, std::string_view class_name, Point p);

}  // namespace speechlabel
