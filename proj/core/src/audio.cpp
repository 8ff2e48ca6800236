#include "speechlabel/audio.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "speechlabel/error.hpp"

namespace speechlabel {
namespace {

std::uint32_t read_u32(std::string_view b, std::size_t off) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

std::uint16_t read_u16(std::string_view b, std::size_t off) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off]) |
                                    static_cast<unsigned char>(b[off + 1]) << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

std::string AudioRef::pcm_bytes() const {
  std::string out;
  out.reserve(samples.size() * 2);
  for (std::int16_t s : samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

AudioRef slice_audio(const AudioRef& audio, double start_s, double end_s) {
  const double d = audio.duration();
  if (!(start_s >= 0.0)) throw RangeError("slice start before recording start");
  if (!(start_s < end_s)) throw RangeError("slice range is empty or inverted");
  if (end_s > d) {
    std::ostringstream os;
    os << "slice end " << end_s << " s beyond recording duration " << d << " s";
    throw RangeError(os.str());
  }
  const auto n = audio.samples.size();
  auto first = static_cast<std::size_t>(std::floor(start_s * audio.sample_rate));
  auto last = end_s >= d ? n : static_cast<std::size_t>(std::floor(end_s * audio.sample_rate));
  if (last > n) last = n;
  if (first > last) first = last;
  AudioRef out;
  out.sample_rate = audio.sample_rate;
  out.samples.assign(audio.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     audio.samples.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

AudioRef decode_wav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    throw ParseError("not a RIFF/WAVE file");
  }
  std::size_t off = 12;
  bool have_fmt = false;
  AudioRef out;
  while (off + 8 <= b.size()) {
    const std::string_view id = b.substr(off, 4);
    const std::uint32_t size = read_u32(b, off + 4);
    const std::size_t body = off + 8;
    if (size > b.size() - body) throw ParseError("truncated WAV chunk '" + std::string(id) + "'");
    if (id == "fmt ") {
      if (size < 16) throw ParseError("WAV fmt chunk too short");
      const std::uint16_t format = read_u16(b, body);
      const std::uint16_t channels = read_u16(b, body + 2);
      const std::uint32_t rate = read_u32(b, body + 4);
      const std::uint16_t bits = read_u16(b, body + 14);
      std::vector<std::string> reasons;
      if (format != 1) reasons.push_back("WAV encoding is not linear PCM (format " + std::to_string(format) + ")");
      if (channels != 1) reasons.push_back("WAV must be mono, got " + std::to_string(channels) + " channels");
      if (bits != 16) reasons.push_back("WAV must be 16-bit, got " + std::to_string(bits) + " bits");
      if (rate == 0) reasons.emplace_back("WAV sample rate is zero");
      if (!reasons.empty()) throw ValidationError(std::move(reasons));
      out.sample_rate = rate;
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("WAV data chunk before fmt chunk");
      if (size % 2 != 0) throw ParseError("WAV data chunk has odd byte count");
      out.samples.resize(size / 2);
      for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = static_cast<std::int16_t>(read_u16(b, body + 2 * i));
      }
      return out;
    }
    off = body + size + (size & 1u);
  }
  throw ParseError(have_fmt ? "WAV file has no data chunk" : "WAV file has no fmt chunk");
}

std::string encode_wav(const AudioRef& audio) {
  const std::uint32_t data_size = static_cast<std::uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, audio.sample_rate);
  put_u32(out, audio.sample_rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_size);
  out += audio.pcm_bytes();
  return out;
}

AudioRef read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open audio file " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const AudioRef& audio) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write audio file " + path.string());
  const std::string bytes = encode_wav(audio);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace speechlabel
