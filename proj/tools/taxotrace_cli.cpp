#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "taxotrace/inference.hpp"
#include "taxotrace/report.hpp"
#include "taxotrace/sampling.hpp"
#include "taxotrace/synth.hpp"
#include "taxotrace/trainer.hpp"

namespace fs = std::filesystem;
using namespace taxotrace;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << text;
}

int cmd_gen_corpus(const std::string& recipes_path, const std::string& out_dir,
                   int n_bonafide, int n_per_codec, int heldout_per_codec,
                   std::uint64_t seed) {
    const auto recipes =
        recipes_path.empty() ? default_recipes() : load_recipes(recipes_path);
    const Manifest manifest = generate_synthetic_corpus(recipes, n_bonafide, n_per_codec,
                                                        seed, out_dir, heldout_per_codec);
    const CodecRegistry registry = registry_from_recipes(recipes);

    std::map<std::string, int> split_counts;
    std::map<std::string, std::map<std::string, int>> task_hist;
    for (const auto& e : manifest.entries) {
        ++split_counts[to_string(e.split)];
        for (TaskKind t : {TaskKind::VQ, TaskKind::AUX, TaskKind::DEC}) {
            const int idx = label_of(e.origin, t, registry);
            ++task_hist[to_string(t)][task_classes(t)[idx]];
        }
    }
    std::cout << "manifest: " << (fs::path(out_dir) / "manifest.jsonl").string() << "\n";
    std::cout << "registry: " << (fs::path(out_dir) / "registry.jsonl").string() << "\n";
    std::cout << "digest: " << manifest_digest(manifest) << "\n";
    for (const auto& [split, n] : split_counts) {
        std::cout << "split " << split << ": " << n << "\n";
    }
    for (const auto& [task, hist] : task_hist) {
        std::cout << task << ":";
        for (const auto& [cls, n] : hist) std::cout << " " << cls << "=" << n;
        std::cout << "\n";
    }
    return 0;
}

int cmd_sample(const std::string& manifest_path, const std::string& registry_path,
               const std::string& grouping, int total, std::uint64_t seed,
               const std::string& out_path) {
    const CodecRegistry registry = CodecRegistry::load_jsonl(registry_path);
    const Manifest manifest = ingest_manifest(manifest_path, registry);
    const TaskKind task = task_from_string(grouping);
    const Manifest sampled = balanced_sample(manifest, task, total, seed, registry);
    // audio paths stay relative to the source manifest's directory
    Manifest out = sampled;
    const fs::path out_dir = fs::absolute(out_path).parent_path();
    for (auto& e : out.entries) {
        e.audio_path = fs::relative(manifest.audio_path(e), out_dir).string();
    }
    write_manifest(out_path, out);

    std::map<std::string, int> counts;
    for (const auto& e : sampled.entries) {
        if (e.origin == kBonafideOrigin) {
            ++counts["bonafide"];
        } else {
            ++counts[task_classes(task)[label_of(e.origin, task, registry)]];
        }
    }
    std::cout << "manifest: " << out_path << "\n";
    for (const auto& [cls, n] : counts) std::cout << cls << ": " << n << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& config_name,
              const std::string& manifest_path, const std::string& registry_path,
              const std::string& out_dir, int epochs_override, long seed_override) {
    TrainSetup setup = !config_path.empty() ? TrainSetup::load_json(config_path)
                                            : TrainSetup::from_config_name(config_name);
    if (seed_override >= 0) setup.seed = static_cast<std::uint64_t>(seed_override);
    setup.validate();

    const CodecRegistry registry = CodecRegistry::load_jsonl(registry_path);
    const Manifest manifest = ingest_manifest(manifest_path, registry);
    Manifest train = manifest, dev = manifest;
    train.entries = filter_split(manifest, Split::Train);
    dev.entries = filter_split(manifest, Split::Dev);

    const fs::path run_dir =
        fs::path(out_dir) / (setup.config_name + "_seed" + std::to_string(setup.seed));
    fs::create_directories(run_dir);
    write_text(run_dir / "config.json", setup.to_json());

    const int epochs = epochs_override > 0 ? epochs_override : setup.epochs;
    const FitResult result = fit(setup, train, dev, registry, epochs);
    result.checkpoint.save(run_dir / "checkpoint.bin");
    write_text(run_dir / "train_log.jsonl", result.log.to_jsonl());

    std::cout << "run_dir: " << run_dir.string() << "\n";
    std::cout << "checkpoint: " << (run_dir / "checkpoint.bin").string() << "\n";
    if (!result.log.epochs.empty()) {
        const auto& last = result.log.epochs.back();
        std::cout << "epochs_run: " << result.log.epochs.size()
                  << "  final_train_loss: " << last.train_loss << "\n";
    }
    std::cout << "best_epoch: " << result.checkpoint.best_epoch << "\n";
    return 0;
}

int cmd_score(const std::string& checkpoint_path, const std::string& manifest_path,
              const std::string& registry_path, const std::string& out_path,
              const std::vector<std::string>& splits) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    const CodecRegistry registry = CodecRegistry::load_jsonl(registry_path);
    Manifest manifest = ingest_manifest(manifest_path, registry);
    if (!splits.empty()) {
        std::vector<ManifestEntry> kept;
        for (const auto& name : splits) {
            const Split s = split_from_string(name);
            for (const auto& e : manifest.entries) {
                if (e.split == s) kept.push_back(e);
            }
        }
        manifest.entries = std::move(kept);
    }
    write_text(out_path, score_manifest(ckpt, manifest, registry));
    std::cout << "scores: " << out_path << " (" << manifest.entries.size() << " rows)\n";
    return 0;
}

int cmd_report(const std::string& scores_path, const std::string& manifest_path,
               const std::string& registry_path, const std::string& checkpoint_path,
               const std::string& out_dir) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    const CodecRegistry registry = CodecRegistry::load_jsonl(registry_path);
    const Manifest manifest = ingest_manifest(manifest_path, registry);
    std::ifstream in(scores_path, std::ios::binary);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open " + scores_path);
    }
    const std::string score_text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    const EvalReport report = build_report(score_text, manifest, registry, ckpt.setup);
    write_report_files(report, out_dir);
    std::cout << report_to_text(report);
    std::cout << "report: " << (fs::path(out_dir) / "report.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"codec deepfake source tracing: corpus, training, scoring, evaluation"};
    app.require_subcommand(1);

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "generate the synthetic fingerprint corpus");
    std::string gen_recipes, gen_out = "corpus";
    int gen_bf = 900, gen_per = 210, gen_heldout = 170;
    std::uint64_t gen_seed = 7;
    gen->add_option("--recipes", gen_recipes, "recipe JSONL (default: bundled set)");
    gen->add_option("--out", gen_out, "output directory");
    gen->add_option("--n-bonafide", gen_bf, "bona fide clip count")->check(CLI::PositiveNumber);
    gen->add_option("--n-per-codec", gen_per, "clips per training codec")
        ->check(CLI::PositiveNumber);
    gen->add_option("--heldout-per-codec", gen_heldout,
                    "clips per held-out codec (-1: same as n-per-codec)");
    gen->add_option("--seed", gen_seed, "corpus seed");

    // sample
    auto* sample = app.add_subcommand("sample", "taxonomy-guided balanced sampling");
    std::string sm_manifest, sm_registry, sm_grouping = "AUX", sm_out = "sampled.jsonl";
    int sm_total = 0;
    std::uint64_t sm_seed = 7;
    sample->add_option("--manifest", sm_manifest)->required();
    sample->add_option("--registry", sm_registry)->required();
    sample->add_option("--grouping", sm_grouping, "VQ, AUX or DEC");
    sample->add_option("--total", sm_total, "total spoof entries to keep")->required();
    sample->add_option("--seed", sm_seed);
    sample->add_option("--out", sm_out, "output manifest path");

    // train
    auto* train = app.add_subcommand("train", "train one configuration");
    std::string tr_config, tr_name = "M2", tr_manifest, tr_registry, tr_out = "runs";
    int tr_epochs = 0;
    long tr_seed = -1;
    train->add_option("--config", tr_config, "JSON config file (overrides --config-name)");
    train->add_option("--config-name", tr_name, "catalog name, e.g. M2, D_VQ, S_BIN");
    train->add_option("--manifest", tr_manifest)->required();
    train->add_option("--registry", tr_registry)->required();
    train->add_option("--out", tr_out, "parent directory for run dirs");
    train->add_option("--epochs", tr_epochs, "override epoch count");
    train->add_option("--seed", tr_seed, "override config seed");

    // score
    auto* score = app.add_subcommand("score", "score a manifest with a checkpoint");
    std::string sc_ckpt, sc_manifest, sc_registry, sc_out = "scores.tsv";
    std::vector<std::string> sc_splits;
    score->add_option("--checkpoint", sc_ckpt)->required();
    score->add_option("--manifest", sc_manifest)->required();
    score->add_option("--registry", sc_registry)->required();
    score->add_option("--out", sc_out);
    score->add_option("--splits", sc_splits, "restrict to these splits")->delimiter(',');

    // report
    auto* report = app.add_subcommand("report", "build the evaluation report");
    std::string rp_scores, rp_manifest, rp_registry, rp_ckpt, rp_out = "report";
    report->add_option("--scores", rp_scores)->required();
    report->add_option("--manifest", rp_manifest)->required();
    report->add_option("--registry", rp_registry)->required();
    report->add_option("--checkpoint", rp_ckpt)->required();
    report->add_option("--out", rp_out, "report output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_corpus(gen_recipes, gen_out, gen_bf, gen_per, gen_heldout, gen_seed);
        }
        if (sample->parsed()) {
            return cmd_sample(sm_manifest, sm_registry, sm_grouping, sm_total, sm_seed, sm_out);
        }
        if (train->parsed()) {
            return cmd_train(tr_config, tr_name, tr_manifest, tr_registry, tr_out, tr_epochs,
                             tr_seed);
        }
        if (score->parsed()) {
            return cmd_score(sc_ckpt, sc_manifest, sc_registry, sc_out, sc_splits);
        }
        if (report->parsed()) {
            return cmd_report(rp_scores, rp_manifest, rp_registry, rp_ckpt, rp_out);
        }
    } catch (const TraceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
