#include "hopfrc/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "hopfrc/error.hpp"

namespace hopfrc::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, std::string_view what) const {
    if (remaining() < n) {
      throw ParseError("read_wav: truncated " + std::string(what) + " at byte " +
                           std::to_string(pos_),
                       pos_);
    }
  }

  std::string_view tag() {
    need(4, "chunk tag");
    std::string_view t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }

  std::uint32_t u32() {
    need(4, "field");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }

  std::uint16_t u16() {
    need(2, "field");
    const auto v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }

  void skip(std::size_t n) {
    need(n, "chunk body");
    pos_ += n;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n, "sample data");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

double decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    std::uint32_t raw = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    float f;
    std::memcpy(&f, &raw, sizeof f);
    return static_cast<double>(f);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(p[0] | (p[1] << 8)) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    case 32: {
      const std::uint32_t raw =
          p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
      return static_cast<std::int32_t>(raw) / 2147483648.0;
    }
    default:
      return 0.0;
  }
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) {
  out.insert(out.end(), tag.begin(), tag.end());
}

}  // namespace

AudioClip read_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.tag() != "RIFF") throw ParseError("read_wav: missing RIFF tag at byte 0", 0);
  (void)r.u32();
  if (r.tag() != "WAVE") throw ParseError("read_wav: missing WAVE tag at byte 8", 8);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;

  while (r.remaining() > 0) {
    const std::size_t chunk_at = r.offset();
    const std::string_view id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      if (size < 16) throw ParseError("read_wav: fmt chunk too small at byte " + std::to_string(chunk_at), chunk_at);
      const std::size_t body = r.offset();
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      (void)r.u32();
      block_align = r.u16();
      bits = r.u16();
      if (format == kFormatExtensible) {
        if (size < 40) {
          throw ParseError("read_wav: extensible fmt chunk too small at byte " + std::to_string(chunk_at), chunk_at);
        }
        (void)r.u16();  // cbSize
        (void)r.u16();  // valid bits
        (void)r.u32();  // channel mask
        format = r.u16();  // leading two bytes of the subformat GUID
        r.skip(14);
      }
      r.skip(size - (r.offset() - body) + (size & 1u));
      have_fmt = true;

      if (format != kFormatPcm && format != kFormatFloat) {
        fail(ErrorKind::kUnsupported, "read_wav: unsupported codec " + std::to_string(format));
      }
      const bool ok_bits = format == kFormatFloat ? bits == 32
                                                  : (bits == 8 || bits == 16 || bits == 24 || bits == 32);
      if (!ok_bits) {
        fail(ErrorKind::kUnsupported, "read_wav: unsupported bit depth " + std::to_string(bits));
      }
      if (channels == 0 || rate == 0 || block_align != channels * (bits / 8)) {
        throw ParseError("read_wav: inconsistent fmt chunk at byte " + std::to_string(body), body);
      }
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("read_wav: data chunk before fmt at byte " + std::to_string(chunk_at), chunk_at);
      const auto data = r.take(size);
      const std::size_t frames = size / block_align;
      AudioClip clip;
      clip.rate = static_cast<int>(rate);
      clip.samples.resize(frames);
      const std::size_t width = bits / 8;
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
          acc += decode_sample(data.data() + f * block_align + c * width, format, bits);
        }
        clip.samples[f] = acc / channels;
      }
      return clip;
    } else {
      r.skip(size + (size & 1u));
    }
  }
  throw ParseError("read_wav: no data chunk before end of file at byte " + std::to_string(r.offset()),
                   r.offset());
}

AudioClip read_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "read_wav_file: cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_wav(bytes);
}

std::vector<std::uint8_t> write_wav16(const AudioClip& clip) {
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.rate));
  put_u32(out, static_cast<std::uint32_t>(clip.rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double v : clip.samples) {
    const double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
    const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(q));
  }
  return out;
}

}  // namespace hopfrc::audio
