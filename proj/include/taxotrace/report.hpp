#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxotrace/manifest.hpp"
#include "taxotrace/metrics.hpp"
#include "taxotrace/setup.hpp"

namespace taxotrace {

struct TaskBlock {
    double weighted_f1 = 0.0;  // percent
    std::vector<std::vector<long>> confusion_matrix;
    std::vector<ClassStats> per_class;
    double random_guess_f1 = 0.0;  // analytic baseline, uniform guessing

    bool operator==(const TaskBlock&) const = default;
};

struct SplitReport {
    long n_utterances = 0;
    std::optional<double> bin_eer;  // percent; absent when undefined
    std::optional<double> eer_threshold;
    std::map<TaskKind, TaskBlock> tasks;  // one block per active source-tracing head

    bool operator==(const SplitReport&) const = default;
};

struct EvalReport {
    std::string config_name;
    std::string setup_json;  // full TrainSetup echo
    std::string manifest_digest;
    std::map<std::string, SplitReport> splits;  // keyed by split name

    bool operator==(const EvalReport&) const = default;
};

/// Joins a rendered score file against the manifest and computes, per split:
/// the bona fide/spoof EER (when the configuration defines a spoof score:
/// BIN active, or at least two fused source-tracing heads) and weighted
/// F1 + confusion per active source-tracing head. Throws MissingUtterance
/// if a scored utterance is absent from the manifest.
EvalReport build_report(const std::string& score_text, const Manifest& manifest,
                        const CodecRegistry& registry, const TrainSetup& setup);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

/// Plain-text tables, one section per split.
std::string report_to_text(const EvalReport& report);

/// CSV body for one confusion matrix (header row/column of class names).
std::string confusion_csv(const TaskBlock& block, TaskKind task);

/// Writes report.json, report.txt and `<split>_<task>_confusion.csv` files.
void write_report_files(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace taxotrace
