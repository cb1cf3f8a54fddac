#include "taxotrace/segment.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "taxotrace/wav.hpp"

namespace taxotrace {

const std::vector<std::int16_t>& ClipCache::get(const std::filesystem::path& path) {
    const std::string key = path.string();
    auto it = clips_.find(key);
    if (it != clips_.end()) return it->second;
    WavClip clip = read_wav(path);
    if (clip.sample_rate != 16000) {
        throw TraceError(ErrorCode::SampleRateMismatch,
                         path.string() + ": expected 16000 Hz, got " +
                             std::to_string(clip.sample_rate));
    }
    return clips_.emplace(key, std::move(clip.samples)).first->second;
}

Segment load_segment(const Manifest& manifest, const ManifestEntry& entry, CropMode mode,
                     std::uint64_t seed, const CodecRegistry& registry, ClipCache& cache) {
    const auto& pcm = cache.get(manifest.audio_path(entry));
    if (pcm.empty()) {
        throw TraceError(ErrorCode::IoError, entry.audio_path + ": empty clip");
    }
    const std::size_t n = pcm.size();

    std::size_t offset = 0;
    if (mode == CropMode::Train && n > kSegmentLen) {
        std::mt19937_64 rng(seed);
        offset = std::uniform_int_distribution<std::size_t>(0, n - kSegmentLen)(rng);
    }

    Segment seg;
    seg.samples.resize(kSegmentLen);
    for (int i = 0; i < kSegmentLen; ++i) {
        seg.samples[i] = pcm_to_double(pcm[(offset + i) % n]);  // tiling for short clips
    }
    seg.label_bin = label_of(entry.origin, TaskKind::BIN, registry);
    seg.label_vq = label_of(entry.origin, TaskKind::VQ, registry);
    seg.label_aux = label_of(entry.origin, TaskKind::AUX, registry);
    seg.label_dec = label_of(entry.origin, TaskKind::DEC, registry);
    return seg;
}

Segment augment(const Segment& segment, double strength, std::uint64_t seed,
                double snr_min_db, double snr_max_db) {
    if (strength < 0) {
        throw TraceError(ErrorCode::InvalidArgument, "augment strength must be >= 0");
    }
    if (strength == 0.0) return segment;

    std::mt19937_64 rng(seed);
    const double snr_db =
        std::uniform_real_distribution<double>(snr_min_db, snr_max_db)(rng);

    double sig_pow = 0.0;
    for (double v : segment.samples) sig_pow += v * v;
    sig_pow /= segment.samples.size();

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(segment.samples.size());
    double noise_pow = 0.0;
    for (auto& v : noise) {
        v = gauss(rng);
        noise_pow += v * v;
    }
    noise_pow /= noise.size();

    const double gain =
        strength * std::sqrt(sig_pow / (noise_pow * std::pow(10.0, snr_db / 10.0)));
    Segment out = segment;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        out.samples[i] = std::clamp(out.samples[i] + gain * noise[i], -1.0, 1.0);
    }
    return out;
}

}  // namespace taxotrace
