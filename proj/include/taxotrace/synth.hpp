#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "taxotrace/manifest.hpp"
#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

struct ArtifactParams {
    int vq_levels = 3;             // residual stages (Mvq) or companding levels (Scq)
    double quant_step = 0.05;      // base step for frame-coefficient quantization
    int upsample_factor = 2;       // zero-order-hold factor (Time decoder)
    int spectral_phase_bits = 3;   // STFT phase resolution (Freq decoder)
    int smoothing_width = 3;       // spectral smoothing width (Sem aux)
};

/// Desk-scale stand-in for a real codec: a deterministic artifact chain
/// (quantization, auxiliary filtering, decoder-style upsampling) applied to
/// a harmonic-plus-noise base signal.
struct SyntheticCodecRecipe {
    std::string codec_id;
    std::string display_name;
    TaxonomyLabel label;
    ArtifactParams params;
    bool heldout = false;  // excluded from train/dev; lands in the CoSG-style splits
};

std::vector<SyntheticCodecRecipe> load_recipes(const std::filesystem::path& path);
void save_recipes(const std::filesystem::path& path,
                  const std::vector<SyntheticCodecRecipe>& recipes);

/// Bundled recipe set: 12 training codecs covering every category on each
/// taxonomy axis, plus 6 held-out codecs for the unseen-codec splits.
std::vector<SyntheticCodecRecipe> default_recipes();

CodecRegistry registry_from_recipes(const std::vector<SyntheticCodecRecipe>& recipes);

/// Generates `n_bonafide` bona fide clips plus `n_per_codec` clips per
/// non-heldout recipe and `heldout_per_codec` per held-out recipe
/// (default: n_per_codec). Writes 16 kHz mono WAVs under out_dir/audio,
/// plus manifest.jsonl and registry.jsonl. Byte-identical for equal inputs.
Manifest generate_synthetic_corpus(const std::vector<SyntheticCodecRecipe>& recipes,
                                   int n_bonafide, int n_per_codec, std::uint64_t seed,
                                   const std::filesystem::path& out_dir,
                                   int heldout_per_codec = -1);

/// Exposed for tests: one clip's samples without touching the filesystem.
std::vector<double> synth_bonafide_clip(std::uint64_t clip_seed);
std::vector<double> synth_spoof_clip(const SyntheticCodecRecipe& recipe,
                                     std::uint64_t clip_seed);

}  // namespace taxotrace
