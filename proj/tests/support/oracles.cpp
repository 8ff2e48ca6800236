#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oracle {

std::vector<Segment> segments(const std::vector<double>& clicks, double duration, double delta) {
  std::vector<Segment> out;
  for (std::size_t i = 0; i < clicks.size(); ++i) {
    double start = clicks[i] - delta;
    if (start < 0) start = 0;
    const double end = i + 1 < clicks.size() ? clicks[i + 1] : duration;
    out.push_back({start, end});
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::optional<std::vector<double>> mean_vector(const std::string& phrase, const Table& table) {
  std::vector<double> sum;
  int n = 0;
  for (const auto& w : split(phrase)) {
    auto it = table.find(w);
    if (it == table.end()) continue;
    if (sum.empty()) sum.assign(it->second.size(), 0.0);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += it->second[d];
    ++n;
  }
  if (n == 0) return std::nullopt;
  for (auto& v : sum) v /= n;
  return sum;
}

std::optional<double> cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    dot += a[d] * b[d];
    na += a[d] * a[d];
    nb += b[d] * b[d];
  }
  if (na == 0 || nb == 0) return std::nullopt;
  return dot / std::sqrt(na * nb);
}

}  // namespace

std::optional<Resolution> resolve(const std::vector<std::string>& alternatives, const std::vector<std::string>& classes,
                                  const Table& table) {
  for (std::size_t r = 0; r < alternatives.size(); ++r) {
    for (const auto& c : classes) {
      if (alternatives[r] == c) return Resolution{c, true, static_cast<int>(r) + 1};
    }
  }
  // Enumerate every pair; keep the first maximum in (rank, class order).
  std::optional<Resolution> best;
  double best_sim = 0;
  for (std::size_t r = 0; r < alternatives.size(); ++r) {
    const auto a = mean_vector(alternatives[r], table);
    if (!a) continue;
    for (const auto& c : classes) {
      const auto b = mean_vector(c, table);
      if (!b) continue;
      const auto sim = cosine(*a, *b);
      if (!sim) continue;
      if (!best || *sim - best_sim > 1e-9) {
        best = Resolution{c, false, static_cast<int>(r) + 1};
        best_sim = *sim;
      }
    }
  }
  return best;
}

bool Raster::at(double x, double y) const {
  const int px = static_cast<int>(std::floor(x)) - x0;
  const int py = static_cast<int>(std::floor(y)) - y0;
  if (px < 0 || py < 0 || px >= width || py >= height) return false;
  return inside[static_cast<std::size_t>(py) * width + px];
}

Raster rasterize(const std::vector<speechlabel::Point>& polygon) {
  double minx = polygon[0].x, maxx = polygon[0].x, miny = polygon[0].y, maxy = polygon[0].y;
  for (const auto& p : polygon) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  Raster r;
  r.x0 = static_cast<int>(std::floor(minx)) - 1;
  r.y0 = static_cast<int>(std::floor(miny)) - 1;
  r.width = static_cast<int>(std::ceil(maxx)) - r.x0 + 2;
  r.height = static_cast<int>(std::ceil(maxy)) - r.y0 + 2;
  r.inside.assign(static_cast<std::size_t>(r.width) * r.height, false);
  const std::size_t n = polygon.size();
  for (int row = 0; row < r.height; ++row) {
    const double y = r.y0 + row + 0.5;
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = polygon[i];
      const auto& b = polygon[(i + 1) % n];
      // Half-open in y so shared vertices count once.
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      for (int col = 0; col < r.width; ++col) {
        const double x = r.x0 + col + 0.5;
        if (x >= xs[k] && x <= xs[k + 1]) r.inside[static_cast<std::size_t>(row) * r.width + col] = true;
      }
    }
  }
  return r;
}

double distance_to_boundary(const std::vector<speechlabel::Point>& polygon, speechlabel::Point p) {
  double best = INFINITY;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy)));
  }
  return best;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) ++less;
        if (w == v[i]) ++equal;
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

double path_length(const std::vector<speechlabel::Point>& points) {
  double total = 0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += std::sqrt((points[i].x - points[i - 1].x) * (points[i].x - points[i - 1].x) +
                       (points[i].y - points[i - 1].y) * (points[i].y - points[i - 1].y));
  }
  return total;
}

Grade grade(const std::vector<std::string>& typed, const std::vector<std::string>& gt) {
  Grade g;
  for (const auto& t : typed) {
    bool in_gt = false;
    for (const auto& c : gt) in_gt = in_gt || c == t;
    (in_gt ? g.correct : g.wrong).insert(t);
  }
  for (const auto& c : gt) {
    bool typed_it = false;
    for (const auto& t : typed) typed_it = typed_it || c == t;
    if (!typed_it) g.missed.insert(c);
  }
  return g;
}

}  // namespace oracle
