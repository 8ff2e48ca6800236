#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace speechlabel {

// 16-bit linear PCM, mono. Sample 0 is aligned to the image_shown event.
struct AudioRef {
  std::uint32_t sample_rate = 16000;
  std::vector<std::int16_t> samples;

  std::size_t sample_count() const noexcept { return samples.size(); }
  double duration() const noexcept {
    return sample_rate == 0 ? 0.0 : static_cast<double>(samples.size()) / sample_rate;
  }
  // Little-endian sample bytes, the form that is hashed and uploaded.
  std::string pcm_bytes() const;

  friend bool operator==(const AudioRef&, const AudioRef&) = default;
};

// Samples [floor(start_s * rate), floor(end_s * rate)) as a standalone recording.
// Throws RangeError unless 0 <= start_s < end_s <= duration.
AudioRef slice_audio(const AudioRef& audio, double start_s, double end_s);

// RIFF/WAVE container. Decoding accepts only PCM (format 1), 16 bit, mono and
// throws ValidationError for other encodings, ParseError for broken files.
AudioRef decode_wav(std::string_view bytes);
std::string encode_wav(const AudioRef& audio);
AudioRef read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioRef& audio);

}  // namespace speechlabel
