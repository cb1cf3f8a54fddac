#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "taxotrace/manifest.hpp"

namespace taxotrace {

inline constexpr int kSegmentLen = 64000;  // 4 s at 16 kHz

enum class CropMode { Train, Eval };

struct Segment {
    std::vector<double> samples;  // length kSegmentLen, values in [-1, 1]
    int label_bin = 0;
    int label_vq = 0;
    int label_aux = 0;
    int label_dec = 0;
};

/// Caches decoded clips so repeated epochs do not re-read WAV files.
/// Clips are stored as 16-bit PCM; lookups are by absolute path.
class ClipCache {
public:
    const std::vector<std::int16_t>& get(const std::filesystem::path& path);

private:
    std::map<std::string, std::vector<std::int16_t>> clips_;
};

/// Fixed-length segment extraction. Clips shorter than kSegmentLen are tiled
/// by repetition. Train mode takes a seeded random crop; eval mode always
/// takes the first kSegmentLen samples. Task labels come from the registry.
Segment load_segment(const Manifest& manifest, const ManifestEntry& entry, CropMode mode,
                     std::uint64_t seed, const CodecRegistry& registry, ClipCache& cache);

/// Additive stationary noise at a signal-to-noise ratio drawn uniformly from
/// [snr_min_db, snr_max_db], with the noise amplitude scaled by `strength`.
/// strength == 0 returns the segment unchanged. Output is clamped to [-1, 1].
Segment augment(const Segment& segment, double strength, std::uint64_t seed,
                double snr_min_db = 15.0, double snr_max_db = 35.0);

}  // namespace taxotrace
