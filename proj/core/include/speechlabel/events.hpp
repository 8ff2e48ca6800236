#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace speechlabel {

enum class EventKind {
  image_shown,
  click,
  mouse_move,
  key,
  show_classes_open,
  show_classes_close,
  submit,
  undo_click,  // compensating event from the annotation UI; removes the latest click
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view s);

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct ImageSize {
  int width = 0;
  int height = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// t is seconds since image_shown; pos is present for click and mouse_move.
struct Event {
  EventKind kind = EventKind::key;
  double t = 0.0;
  std::optional<Point> pos;
  friend bool operator==(const Event&, const Event&) = default;
};

// Parses and validates a line-delimited JSON event log. Blank lines are
// skipped. When bounds is given, positions must lie inside the image.
std::vector<Event> parse_event_log(std::istream& in, std::optional<ImageSize> bounds = std::nullopt);
std::vector<Event> parse_event_log(std::string_view text, std::optional<ImageSize> bounds = std::nullopt);

std::string serialize_event_log(std::span<const Event> events);

struct Click {
  double t = 0.0;
  Point p;
  std::size_t event_index = 0;
};

struct ClickList {
  std::vector<Click> clicks;
  std::vector<std::string> warnings;
};

// Clicks in log order (which is time order for a validated log). Equal
// timestamps are kept, each tie adds a warning.
ClickList clicks(std::span<const Event> events);

// t of the submit event (the last event of a valid log).
double submit_time(std::span<const Event> events);

}  // namespace speechlabel
