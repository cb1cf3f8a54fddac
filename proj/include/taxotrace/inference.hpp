#pragma once

#include <vector>

#include "taxotrace/checkpoint.hpp"
#include "taxotrace/scoring.hpp"
#include "taxotrace/segment.hpp"

namespace taxotrace {

/// Deterministic eval-mode scoring of manifest entries against a model.
std::vector<ScoreSet> score_entries(const Model& model, const TrainSetup& setup,
                                    const Manifest& manifest,
                                    const std::vector<ManifestEntry>& entries,
                                    const CodecRegistry& registry, ClipCache& cache);

/// Scores every entry of the manifest with the checkpoint's best model and
/// renders the tab-separated score file.
std::string score_manifest(const Checkpoint& checkpoint, const Manifest& manifest,
                           const CodecRegistry& registry);

}  // namespace taxotrace
