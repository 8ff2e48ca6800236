#include "speechlabel/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "speechlabel/error.hpp"

namespace speechlabel {

std::vector<AudioSegment> segment_recording(std::span<const double> click_times, double duration_s,
                                            double delta_s) {
  if (!(delta_s >= 0.0) || !std::isfinite(delta_s)) throw RangeError("delta must be a finite value >= 0");
  if (!(duration_s >= 0.0)) throw RangeError("recording duration must be >= 0");
  for (std::size_t i = 0; i < click_times.size(); ++i) {
    const double t = click_times[i];
    if (!(t >= 0.0)) throw RangeError("click time before recording start");
    if (t > duration_s) {
      std::ostringstream os;
      os << "click " << i << " at " << t << " s is past the end of the recording (" << duration_s << " s)";
      throw RangeError(os.str());
    }
    if (i > 0 && t < click_times[i - 1]) throw RangeError("click times must be non-decreasing");
  }

  std::vector<AudioSegment> segments;
  segments.reserve(click_times.size());
  for (std::size_t i = 0; i < click_times.size(); ++i) {
    AudioSegment s;
    s.object_index = i;
    s.start_s = std::max(0.0, click_times[i] - delta_s);
    s.end_s = i + 1 < click_times.size() ? click_times[i + 1] : duration_s;
    segments.push_back(s);
  }
  return segments;
}

}  // namespace speechlabel
