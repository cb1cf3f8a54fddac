#include "taxotrace/inference.hpp"

#include "taxotrace/loss.hpp"

namespace taxotrace {

std::vector<ScoreSet> score_entries(const Model& model, const TrainSetup& setup,
                                    const Manifest& manifest,
                                    const std::vector<ManifestEntry>& entries,
                                    const CodecRegistry& registry, ClipCache& cache) {
    std::vector<ScoreSet> rows;
    rows.reserve(entries.size());
    for (const auto& entry : entries) {
        const Segment seg =
            load_segment(manifest, entry, CropMode::Eval, 0, registry, cache);
        Model::Cache fwd;
        const HeadLogits logits = model.forward(seg.samples, setup, fwd);
        ScoreSet row;
        row.utterance_id = entry.utterance_id;
        row.probs = predict_probs(logits);
        row.predicted = predict_classes(row.probs);
        row.bonafide_score = score_bonafide(row.probs, setup);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string score_manifest(const Checkpoint& checkpoint, const Manifest& manifest,
                           const CodecRegistry& registry) {
    const Model model = checkpoint.instantiate(/*use_best=*/true);
    ClipCache cache;
    const auto rows = score_entries(model, checkpoint.setup, manifest, manifest.entries,
                                    registry, cache);
    return render_score_file(rows, checkpoint.setup);
}

}  // namespace taxotrace
