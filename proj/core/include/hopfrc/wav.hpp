#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hopfrc/audio.hpp"

namespace hopfrc::audio {

/// Decodes a RIFF/WAVE file: PCM 8/16/24/32-bit integer or 32-bit IEEE
/// float (WAVE_FORMAT_EXTENSIBLE accepted for both), any channel count.
/// Integer samples are scaled by 2^(bits-1) (8-bit is offset binary),
/// channels are averaged to mono. Throws ParseError with the byte offset of
/// the problem, or kUnsupported for other codecs.
AudioClip read_wav(std::span<const std::uint8_t> bytes);
AudioClip read_wav_file(const std::filesystem::path& path);

/// Encodes a mono clip as 16-bit PCM. Samples are clamped to [-1, 1).
std::vector<std::uint8_t> write_wav16(const AudioClip& clip);

}  // namespace hopfrc::audio
