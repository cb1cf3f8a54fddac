#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace taxotrace {

struct WavClip {
    int sample_rate = 0;
    std::vector<std::int16_t> samples;  // mono PCM
};

/// Reads a mono 16-bit PCM WAV file. Throws IoError on malformed input.
WavClip read_wav(const std::filesystem::path& path);

/// Writes mono 16-bit PCM. Output bytes depend only on the arguments.
void write_wav(const std::filesystem::path& path, const std::vector<std::int16_t>& samples,
               int sample_rate);

inline double pcm_to_double(std::int16_t s) { return static_cast<double>(s) / 32768.0; }

std::int16_t double_to_pcm(double x);

}  // namespace taxotrace
