#include "speechlabel/events.hpp"

#include <array>
#include <cmath>
#include <istream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "speechlabel/error.hpp"

namespace speechlabel {
namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 8> kKindNames{{
    {EventKind::image_shown, "image_shown"},
    {EventKind::click, "click"},
    {EventKind::mouse_move, "mouse_move"},
    {EventKind::key, "key"},
    {EventKind::show_classes_open, "show_classes_open"},
    {EventKind::show_classes_close, "show_classes_close"},
    {EventKind::submit, "submit"},
    {EventKind::undo_click, "undo_click"},
}};

bool needs_position(EventKind k) { return k == EventKind::click || k == EventKind::mouse_move; }

Event parse_line(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("event is not a JSON object", line_no);
  if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError("event needs a string \"kind\"", line_no);
  if (!j.contains("t") || !j["t"].is_number()) throw ParseError("event needs a numeric \"t\"", line_no);

  Event ev;
  auto kind = parse_event_kind(j["kind"].get<std::string>());
  if (!kind) {
    throw ValidationError("line " + std::to_string(line_no) + ": unknown event kind '" +
                          j["kind"].get<std::string>() + "'");
  }
  ev.kind = *kind;
  ev.t = j["t"].get<double>();
  const bool has_x = j.contains("x") && j["x"].is_number();
  const bool has_y = j.contains("y") && j["y"].is_number();
  if (has_x && has_y) ev.pos = Point{j["x"].get<double>(), j["y"].get<double>()};
  return ev;
}

void write_number(std::ostream& os, double v) {
  // Integral values are written without a fraction so pixel coordinates stay
  // in the compact form the UI sends.
  if (std::isfinite(v) && std::floor(v) == v && std::fabs(v) < 1e15) {
    os << static_cast<long long>(v);
  } else {
    os << nlohmann::json(v).dump();
  }
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
  for (const auto& [k, name] : kKindNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::vector<Event> parse_event_log(std::istream& in, std::optional<ImageSize> bounds) {
  std::vector<Event> events;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(parse_line(line, line_no));
    lines.push_back(line_no);
  }

  std::vector<std::string> problems;
  auto at = [&](std::size_t i) { return "line " + std::to_string(lines[i]) + ": "; };
  if (events.empty()) throw ValidationError("event log is empty");

  std::size_t shown = 0;
  std::size_t submits = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    if (!std::isfinite(ev.t) || ev.t < 0.0) problems.push_back(at(i) + "t must be a non-negative number");
    if (i > 0 && ev.t < events[i - 1].t) problems.push_back(at(i) + "t decreases (non-monotonic log)");
    if (ev.kind == EventKind::image_shown) {
      ++shown;
      if (i != 0) problems.push_back(at(i) + "image_shown must be the first event");
      if (ev.t != 0.0) problems.push_back(at(i) + "image_shown must have t = 0");
    }
    if (ev.kind == EventKind::submit) {
      ++submits;
      if (i + 1 != events.size()) problems.push_back(at(i) + "submit must be the last event");
    }
    if (needs_position(ev.kind)) {
      if (!ev.pos) {
        problems.push_back(at(i) + std::string(to_string(ev.kind)) + " needs x and y");
      } else if (bounds) {
        const Point p = *ev.pos;
        if (p.x < 0 || p.y < 0 || p.x > bounds->width || p.y > bounds->height) {
          problems.push_back(at(i) + "position outside image bounds");
        }
      }
    }
  }
  if (shown == 0) problems.emplace_back("missing image_shown event");
  if (shown > 1) problems.emplace_back("more than one image_shown event");
  if (submits == 0) problems.emplace_back("missing submit event");
  if (submits > 1) problems.emplace_back("more than one submit event");
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return events;
}

std::vector<Event> parse_event_log(std::string_view text, std::optional<ImageSize> bounds) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in, bounds);
}

std::string serialize_event_log(std::span<const Event> events) {
  std::ostringstream os;
  for (const Event& ev : events) {
    os << "{\"kind\":\"" << to_string(ev.kind) << "\",\"t\":";
    write_number(os, ev.t);
    if (ev.pos) {
      os << ",\"x\":";
      write_number(os, ev.pos->x);
      os << ",\"y\":";
      write_number(os, ev.pos->y);
    }
    os << "}\n";
  }
  return os.str();
}

ClickList clicks(std::span<const Event> events) {
  ClickList out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    if (ev.kind == EventKind::undo_click) {
      if (!out.clicks.empty()) out.clicks.pop_back();
      continue;
    }
    if (ev.kind != EventKind::click || !ev.pos) continue;
    out.clicks.push_back({ev.t, *ev.pos, i});
  }
  for (std::size_t i = 1; i < out.clicks.size(); ++i) {
    if (out.clicks[i].t == out.clicks[i - 1].t) {
      std::ostringstream w;
      w << "duplicate click timestamp " << out.clicks[i].t << " (clicks " << i - 1 << " and " << i
        << "), kept in log order";
      out.warnings.push_back(w.str());
    }
  }
  return out;
}

double submit_time(std::span<const Event> events) {
  for (auto it = events.rbegin(); it != events.rend(); ++it) {
    if (it->kind == EventKind::submit) return it->t;
  }
  return events.empty() ? 0.0 : events.back().t;
}

}  // namespace speechlabel
