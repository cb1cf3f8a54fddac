#pragma once

#include <map>
#include <optional>
#include <vector>

#include "taxotrace/checkpoint.hpp"
#include "taxotrace/manifest.hpp"
#include "taxotrace/setup.hpp"
#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

struct StepLog {
    long step = 0;
    double total = 0.0;
    std::map<TaskKind, double> per_head;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;  // mean over the epoch's steps
    std::optional<double> dev_eer;
    std::map<TaskKind, double> dev_f1;
    double criterion = 0.0;  // dev BIN EER when BIN active, else -mean F1
    bool is_best = false;
};

struct TrainLog {
    std::vector<StepLog> steps;
    std::vector<EpochLog> epochs;

    std::string to_jsonl() const;
};

struct FitResult {
    Checkpoint checkpoint;
    TrainLog log;
};

/// Runs `epochs` epochs of seeded shuffled mini-batches with the adaptive
/// decoupled-weight-decay optimizer, evaluating on dev after each epoch and
/// tracking the best snapshot (lowest dev BIN EER when BIN is active, else
/// highest mean weighted F1 over the active heads). Early-stops after
/// `setup.patience` epochs without improvement.
FitResult fit(const TrainSetup& setup, const Manifest& train_manifest,
              const Manifest& dev_manifest, const CodecRegistry& registry, int epochs);

/// Continues training from a checkpoint's last state with its restored
/// optimizer moments and seed schedule. fit(n + m) and fit(n) followed by
/// resume(m) produce the same trajectory.
FitResult resume(const Checkpoint& checkpoint, const Manifest& train_manifest,
                 const Manifest& dev_manifest, const CodecRegistry& registry,
                 int extra_epochs);

}  // namespace taxotrace
