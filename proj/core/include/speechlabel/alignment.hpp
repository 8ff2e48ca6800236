#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace speechlabel {

// Lead time before a click that still belongs to its audio segment; people
// tend to start speaking slightly before they click.
inline constexpr double kDefaultDelta = 0.5;
// Segments shorter than this are still transcribed but flagged.
inline constexpr double kShortSegment = 0.2;

struct AudioSegment {
  std::size_t object_index = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  double length() const noexcept { return end_s - start_s; }
  bool is_short() const noexcept { return length() < kShortSegment; }
  friend bool operator==(const AudioSegment&, const AudioSegment&) = default;
};

// One segment per click: [max(0, t_i - delta), t_{i+1}], the last one ending at
// duration_s. Click times must be non-decreasing and inside [0, duration_s].
std::vector<AudioSegment> segment_recording(std::span<const double> click_times, double duration_s,
                                            double delta_s = kDefaultDelta);

}  // namespace speechlabel
