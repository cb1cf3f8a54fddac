#include "taxotrace/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"
#include "taxotrace/dsp.hpp"
#include "taxotrace/hash.hpp"
#include "taxotrace/wav.hpp"

namespace taxotrace {

namespace {

constexpr int kSampleRate = 16000;
constexpr int kFrameLen = 64;     // quantization / smoothing frame
constexpr int kStftLen = 512;     // Freq-decoder STFT
constexpr int kStftHop = 256;

double quantize(double x, double step) {
    return step * std::round(x / step);
}

// ---- bona fide base -------------------------------------------------------

std::vector<double> harmonic_plus_noise(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> len_dist(64000, 80000);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int n = len_dist(rng);

    const double f0 = 110.0 + 110.0 * uni(rng);
    const double rolloff = 0.75 + 0.15 * uni(rng);      // harmonic decay r^k/k
    const double vib_rate = 4.0 + 2.0 * uni(rng);
    const double vib_depth = 0.015 + 0.02 * uni(rng);
    const double vib_phase = 2.0 * M_PI * uni(rng);
    const double env_rate = 1.2 + 1.8 * uni(rng);       // syllable-ish amplitude
    const double env_phase = 2.0 * M_PI * uni(rng);
    const double snr_db = 22.0 + 10.0 * uni(rng);

    std::vector<double> x(n);
    double phase = 2.0 * M_PI * uni(rng);
    for (int t = 0; t < n; ++t) {
        const double inst_f0 =
            f0 * (1.0 + vib_depth * std::sin(2.0 * M_PI * vib_rate * t / kSampleRate + vib_phase));
        phase += 2.0 * M_PI * inst_f0 / kSampleRate;
        // sum_k (r^k/k) sin(k*phase), closed form of Im(-log(1 - r e^{i phase}))
        const double s = std::atan2(rolloff * std::sin(phase), 1.0 - rolloff * std::cos(phase));
        const double m = 0.5 + 0.5 * std::sin(2.0 * M_PI * env_rate * t / kSampleRate + env_phase);
        x[t] = s * (0.3 + 0.7 * m * m);
    }

    // shaped noise floor at the drawn SNR
    double sig_pow = 0.0;
    for (double v : x) sig_pow += v * v;
    sig_pow /= n;
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double a = 0.9;
    double state = 0.0, noise_pow = 0.0;
    std::vector<double> noise(n);
    for (int t = 0; t < n; ++t) {
        state = a * state + (1.0 - a) * gauss(rng);
        noise[t] = state;
        noise_pow += state * state;
    }
    noise_pow /= n;
    const double gain = std::sqrt(sig_pow / (noise_pow * std::pow(10.0, snr_db / 10.0)));
    double peak = 0.0;
    for (int t = 0; t < n; ++t) {
        x[t] += gain * noise[t];
        peak = std::max(peak, std::abs(x[t]));
    }
    const double target = 0.55 + 0.15 * uni(rng);
    const double scale = target / std::max(peak, 1e-9);
    for (double& v : x) v *= scale;
    return x;
}

// ---- artifact chain -------------------------------------------------------

const Dct& frame_dct() {
    static const Dct dct(kFrameLen);
    return dct;
}

// Frame-wise DCT transform: apply fn to each coefficient frame, resynthesize.
template <typename Fn>
void for_each_coeff_frame(std::vector<double>& x, Fn fn) {
    const Dct& dct = frame_dct();
    std::vector<double> coeff(kFrameLen), frame(kFrameLen);
    const std::size_t n_frames = x.size() / kFrameLen;
    for (std::size_t f = 0; f < n_frames; ++f) {
        double* p = x.data() + f * kFrameLen;
        dct.forward(p, coeff.data());
        fn(coeff);
        dct.inverse(coeff.data(), p);
    }
}

void apply_vq(std::vector<double>& x, const SyntheticCodecRecipe& r) {
    switch (r.label.vq) {
        case VqClass::Mvq: {
            // residual quantization with low-frequency-weighted bit
            // allocation: each stage refines the previous one, and the base
            // step grows with coefficient index (fine floor at LF, coarse at
            // HF), the way multi-stage VQ spends its bits perceptually.
            for_each_coeff_frame(x, [&](std::vector<double>& c) {
                const int n = static_cast<int>(c.size());
                for (int i = 0; i < n; ++i) {
                    const double tilt = std::pow(32.0, double(i) / double(n - 1));
                    double acc = 0.0, res = c[i], step = r.params.quant_step * tilt;
                    for (int stage = 0; stage < r.params.vq_levels; ++stage) {
                        const double q = quantize(res, step);
                        acc += q;
                        res -= q;
                        step *= 0.25;
                    }
                    c[i] = acc;
                }
            });
            break;
        }
        case VqClass::Svq: {
            for_each_coeff_frame(x, [&](std::vector<double>& c) {
                for (double& v : c) v = quantize(v, r.params.quant_step);
            });
            break;
        }
        case VqClass::Scq: {
            // per-sample scalar rounding in the companded domain, with the
            // widened dead zone of a rate-starved scalar quantizer: low-level
            // content (the inter-harmonic noise floor) collapses to zero while
            // loud stretches pick up companding distortion.
            const double mu = 255.0;
            const double lg = std::log1p(mu);
            const double dead = 1.6 * r.params.quant_step;
            for (double& v : x) {
                const double sign = v < 0 ? -1.0 : 1.0;
                double y = sign * std::log1p(mu * std::abs(v)) / lg;
                y = std::abs(y) < dead ? 0.0 : quantize(y, r.params.quant_step);
                const double ysign = y < 0 ? -1.0 : (y > 0 ? 1.0 : 0.0);
                v = ysign * std::expm1(std::abs(y) * lg) / mu;
            }
            break;
        }
    }
}

void apply_aux(std::vector<double>& x, const SyntheticCodecRecipe& r) {
    switch (r.label.aux) {
        case AuxClass::Sem: {
            // smear fine spectral structure across neighbouring coefficients
            const int w = r.params.smoothing_width;
            for_each_coeff_frame(x, [&](std::vector<double>& c) {
                c = moving_average(c, w);
            });
            break;
        }
        case AuxClass::Disent: {
            // envelope and residual processed independently, then recombined
            std::vector<double> sq(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
            std::vector<double> env_sq = moving_average(sq, 801);
            std::vector<double> env(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                env[i] = std::max(std::sqrt(env_sq[i]), 1e-3);
            std::vector<double> env_smooth = moving_average(env, 2401);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double res = x[i] / env[i];
                x[i] = std::tanh(1.3 * res) * 0.9 * env_smooth[i];
            }
            break;
        }
        case AuxClass::NoAux:
            break;
    }
}

void apply_dec(std::vector<double>& x, const SyntheticCodecRecipe& r) {
    switch (r.label.dec) {
        case DecClass::Time: {
            // zero-order-hold resampling: imaging artifacts above fs/(2U)
            const int u = std::max(2, r.params.upsample_factor);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = x[i - (i % static_cast<std::size_t>(u))];
            }
            break;
        }
        case DecClass::Freq: {
            // magnitude-preserving STFT resynthesis with quantized phase
            const double delta =
                2.0 * M_PI / static_cast<double>(1 << r.params.spectral_phase_bits);
            std::vector<double> window(kStftLen);
            for (int i = 0; i < kStftLen; ++i) {
                window[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / kStftLen);  // periodic hann
            }
            std::vector<double> out(x.size(), 0.0);
            std::vector<std::complex<double>> spec(kStftLen);
            for (std::size_t start = 0; start + kStftLen <= x.size(); start += kStftHop) {
                for (int i = 0; i < kStftLen; ++i) {
                    spec[i] = x[start + i] * window[i];
                }
                fft(spec, false);
                for (int i = 0; i < kStftLen; ++i) {
                    const double mag = std::abs(spec[i]);
                    const double phase = quantize(std::arg(spec[i]), delta);
                    spec[i] = std::polar(mag, phase);
                }
                fft(spec, true);
                for (int i = 0; i < kStftLen; ++i) {
                    out[start + i] += spec[i].real();
                }
            }
            // periodic hann at 50% overlap sums to 1; edges keep the original
            for (std::size_t i = kStftHop; i + kStftLen < x.size(); ++i) {
                x[i] = out[i];
            }
            break;
        }
    }
}

void finalize_clip(std::vector<double>& x) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.95) {
        const double scale = 0.95 / peak;
        for (double& v : x) v *= scale;
    }
    for (double& v : x) v = std::clamp(v, -1.0, 1.0);
}

std::vector<std::int16_t> to_pcm(const std::vector<double>& x) {
    std::vector<std::int16_t> pcm(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) pcm[i] = double_to_pcm(x[i]);
    return pcm;
}

// Exact per-split counts for n items under the given fractions; remainders
// go to the earliest splits so counts are deterministic.
std::vector<int> split_counts(int n, const std::vector<double>& fractions) {
    std::vector<int> counts(fractions.size());
    int assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        counts[i] = static_cast<int>(std::floor(n * fractions[i]));
        assigned += counts[i];
    }
    for (std::size_t i = 0; assigned < n; i = (i + 1) % fractions.size()) {
        ++counts[i];
        ++assigned;
    }
    return counts;
}

Split split_at(int index, const std::vector<int>& counts, const std::vector<Split>& splits) {
    int acc = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        acc += counts[i];
        if (index < acc) return splits[i];
    }
    return splits.back();
}

nlohmann::ordered_json recipe_to_json(const SyntheticCodecRecipe& r) {
    nlohmann::ordered_json j;
    j["codec_id"] = r.codec_id;
    j["display_name"] = r.display_name;
    j["vq"] = to_string(r.label.vq);
    j["aux"] = to_string(r.label.aux);
    j["dec"] = to_string(r.label.dec);
    j["heldout"] = r.heldout;
    j["artifact_params"] = {{"vq_levels", r.params.vq_levels},
                            {"quant_step", r.params.quant_step},
                            {"upsample_factor", r.params.upsample_factor},
                            {"spectral_phase_bits", r.params.spectral_phase_bits},
                            {"smoothing_width", r.params.smoothing_width}};
    return j;
}

}  // namespace

std::vector<double> synth_bonafide_clip(std::uint64_t clip_seed) {
    std::mt19937_64 rng(clip_seed);
    auto x = harmonic_plus_noise(rng);
    finalize_clip(x);
    return x;
}

std::vector<double> synth_spoof_clip(const SyntheticCodecRecipe& recipe,
                                     std::uint64_t clip_seed) {
    std::mt19937_64 rng(clip_seed);
    auto x = harmonic_plus_noise(rng);
    apply_vq(x, recipe);
    apply_aux(x, recipe);
    apply_dec(x, recipe);
    finalize_clip(x);
    return x;
}

std::vector<SyntheticCodecRecipe> load_recipes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open recipe file " + path.string());
    }
    std::vector<SyntheticCodecRecipe> recipes;
    std::set<std::string> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        SyntheticCodecRecipe r;
        try {
            auto j = nlohmann::json::parse(line);
            r.codec_id = j.at("codec_id").get<std::string>();
            r.display_name = j.value("display_name", r.codec_id);
            r.label.vq = vq_from_string(j.at("vq").get<std::string>());
            r.label.aux = aux_from_string(j.at("aux").get<std::string>());
            r.label.dec = dec_from_string(j.at("dec").get<std::string>());
            r.heldout = j.value("heldout", false);
            if (j.contains("artifact_params")) {
                const auto& p = j["artifact_params"];
                r.params.vq_levels = p.value("vq_levels", r.params.vq_levels);
                r.params.quant_step = p.value("quant_step", r.params.quant_step);
                r.params.upsample_factor = p.value("upsample_factor", r.params.upsample_factor);
                r.params.spectral_phase_bits =
                    p.value("spectral_phase_bits", r.params.spectral_phase_bits);
                r.params.smoothing_width = p.value("smoothing_width", r.params.smoothing_width);
            }
        } catch (const nlohmann::json::exception& e) {
            throw TraceError(ErrorCode::ParseError, where + ": " + e.what());
        }
        if (!ids.insert(r.codec_id).second) {
            throw TraceError(ErrorCode::DuplicateCodecId, where + ": " + r.codec_id);
        }
        if (r.params.quant_step <= 0) {
            throw TraceError(ErrorCode::ParseError, where + ": quant_step must be positive");
        }
        recipes.push_back(std::move(r));
    }
    return recipes;
}

void save_recipes(const std::filesystem::path& path,
                  const std::vector<SyntheticCodecRecipe>& recipes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write recipe file " + path.string());
    }
    for (const auto& r : recipes) {
        out << recipe_to_json(r).dump() << "\n";
    }
}

std::vector<SyntheticCodecRecipe> default_recipes() {
    auto mk = [](std::string id, VqClass vq, AuxClass aux, DecClass dec, ArtifactParams p,
                 bool heldout) {
        SyntheticCodecRecipe r;
        r.codec_id = std::move(id);
        r.display_name = r.codec_id;
        r.label = {vq, aux, dec};
        r.params = p;
        r.heldout = heldout;
        return r;
    };
    // quant_step per VQ family: Mvq refines over vq_levels stages (fine noise
    // floor), Svq quantizes once coarsely, Scq rounds companded samples.
    std::vector<SyntheticCodecRecipe> recipes = {
        mk("syn_mvq_sem_t", VqClass::Mvq, AuxClass::Sem, DecClass::Time, {3, 0.050, 2, 3, 5}, false),
        mk("syn_mvq_dis_f", VqClass::Mvq, AuxClass::Disent, DecClass::Freq, {3, 0.055, 2, 3, 5}, false),
        mk("syn_mvq_non_t", VqClass::Mvq, AuxClass::NoAux, DecClass::Time, {3, 0.045, 2, 3, 5}, false),
        mk("syn_svq_sem_f", VqClass::Svq, AuxClass::Sem, DecClass::Freq, {1, 0.120, 2, 3, 5}, false),
        mk("syn_svq_dis_t", VqClass::Svq, AuxClass::Disent, DecClass::Time, {1, 0.110, 2, 3, 5}, false),
        mk("syn_svq_non_f", VqClass::Svq, AuxClass::NoAux, DecClass::Freq, {1, 0.130, 2, 3, 5}, false),
        mk("syn_scq_sem_t", VqClass::Scq, AuxClass::Sem, DecClass::Time, {1, 0.105, 2, 3, 5}, false),
        mk("syn_scq_dis_f", VqClass::Scq, AuxClass::Disent, DecClass::Freq, {1, 0.095, 2, 3, 5}, false),
        mk("syn_scq_non_t", VqClass::Scq, AuxClass::NoAux, DecClass::Time, {1, 0.110, 2, 3, 5}, false),
        mk("syn_mvq_sem_f", VqClass::Mvq, AuxClass::Sem, DecClass::Freq, {3, 0.052, 2, 2, 7}, false),
        mk("syn_svq_non_t", VqClass::Svq, AuxClass::NoAux, DecClass::Time, {1, 0.125, 2, 3, 5}, false),
        mk("syn_scq_dis_t", VqClass::Scq, AuxClass::Disent, DecClass::Time, {1, 0.100, 2, 3, 5}, false),
        // held-out codecs; the first three reuse seen taxonomy triples
        mk("ho_mvq_sem_t", VqClass::Mvq, AuxClass::Sem, DecClass::Time, {4, 0.060, 2, 3, 7}, true),
        mk("ho_svq_non_f", VqClass::Svq, AuxClass::NoAux, DecClass::Freq, {1, 0.100, 2, 2, 5}, true),
        mk("ho_scq_dis_f", VqClass::Scq, AuxClass::Disent, DecClass::Freq, {1, 0.115, 2, 3, 5}, true),
        mk("ho_mvq_dis_t", VqClass::Mvq, AuxClass::Disent, DecClass::Time, {2, 0.048, 2, 3, 5}, true),
        mk("ho_svq_sem_t", VqClass::Svq, AuxClass::Sem, DecClass::Time, {1, 0.115, 2, 3, 7}, true),
        mk("ho_scq_non_f", VqClass::Scq, AuxClass::NoAux, DecClass::Freq, {1, 0.090, 2, 2, 5}, true),
    };
    return recipes;
}

CodecRegistry registry_from_recipes(const std::vector<SyntheticCodecRecipe>& recipes) {
    CodecRegistry reg;
    for (const auto& r : recipes) {
        reg.register_codec({r.codec_id, r.display_name, r.label});
    }
    return reg;
}

Manifest generate_synthetic_corpus(const std::vector<SyntheticCodecRecipe>& recipes,
                                   int n_bonafide, int n_per_codec, std::uint64_t seed,
                                   const std::filesystem::path& out_dir,
                                   int heldout_per_codec) {
    if (n_bonafide <= 0 || n_per_codec <= 0) {
        throw TraceError(ErrorCode::InvalidArgument, "clip counts must be positive");
    }
    if (heldout_per_codec < 0) heldout_per_codec = n_per_codec;

    std::error_code ec;
    std::filesystem::create_directories(out_dir / "audio", ec);
    if (ec) {
        throw TraceError(ErrorCode::IoError, "cannot create " + (out_dir / "audio").string());
    }

    std::set<TaxonomyLabel, bool (*)(const TaxonomyLabel&, const TaxonomyLabel&)> seen_triples(
        [](const TaxonomyLabel& a, const TaxonomyLabel& b) {
            return std::tie(a.vq, a.aux, a.dec) < std::tie(b.vq, b.aux, b.dec);
        });
    for (const auto& r : recipes) {
        if (!r.heldout) seen_triples.insert(r.label);
    }

    Manifest manifest;
    manifest.base_dir = out_dir;

    const std::vector<Split> bf_splits = {Split::Train, Split::Dev, Split::EvalCors,
                                          Split::EvalCosgKnown, Split::EvalCosgAll};
    const auto bf_counts = split_counts(n_bonafide, {0.60, 0.08, 0.12, 0.10, 0.10});
    const std::vector<Split> seen_splits = {Split::Train, Split::Dev, Split::EvalCors};
    const auto seen_counts = split_counts(n_per_codec, {0.75, 0.08, 0.17});

    char name[64];
    for (int i = 0; i < n_bonafide; ++i) {
        std::snprintf(name, sizeof(name), "bf_%05d", i);
        const auto clip = synth_bonafide_clip(derive_seed(seed, "bona", i));
        const std::string rel = std::string("audio/") + name + ".wav";
        write_wav(out_dir / rel, to_pcm(clip), kSampleRate);
        manifest.entries.push_back(
            {name, rel, kBonafideOrigin, split_at(i, bf_counts, bf_splits), kSampleRate});
    }
    for (const auto& r : recipes) {
        const int count = r.heldout ? heldout_per_codec : n_per_codec;
        const auto counts = split_counts(count, {0.75, 0.08, 0.17});
        const Split heldout_split =
            seen_triples.count(r.label) ? Split::EvalCosgKnown : Split::EvalCosgAll;
        for (int i = 0; i < count; ++i) {
            std::snprintf(name, sizeof(name), "%s_%05d", r.codec_id.c_str(), i);
            const auto clip = synth_spoof_clip(r, derive_seed(seed, "spoof", i, r.codec_id));
            const std::string rel = std::string("audio/") + name + ".wav";
            write_wav(out_dir / rel, to_pcm(clip), kSampleRate);
            const Split split =
                r.heldout ? heldout_split : split_at(i, counts, seen_splits);
            manifest.entries.push_back({name, rel, r.codec_id, split, kSampleRate});
        }
    }

    write_manifest(out_dir / "manifest.jsonl", manifest);
    registry_from_recipes(recipes).save_jsonl(out_dir / "registry.jsonl");
    save_recipes(out_dir / "recipes.jsonl", recipes);
    return manifest;
}

}  // namespace taxotrace
