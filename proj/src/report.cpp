#include "taxotrace/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "taxotrace/scoring.hpp"

namespace taxotrace {

namespace {

double uniform_guess_f1(const std::vector<int>& labels, int n_classes) {
    std::vector<double> prior(n_classes, 0.0);
    for (int l : labels) prior[l] += 1.0;
    for (double& p : prior) p /= static_cast<double>(labels.size());
    // uniform guessing: precision for class c is its prior, recall is 1/K
    const double recall = 1.0 / n_classes;
    double acc = 0.0;
    for (double p : prior) {
        if (p + recall > 0.0) {
            acc += p * (2.0 * p * recall / (p + recall));
        }
    }
    return 100.0 * acc;
}

bool eer_defined(const TrainSetup& setup) {
    if (setup.is_active(TaskKind::BIN)) return true;
    int multiclass = 0;
    for (TaskKind t : setup.active_heads) {
        if (t != TaskKind::BIN) ++multiclass;
    }
    return multiclass >= 2;  // fused score is meaningful
}

}  // namespace

EvalReport build_report(const std::string& score_text, const Manifest& manifest,
                        const CodecRegistry& registry, const TrainSetup& setup) {
    const auto rows = parse_score_file(score_text);
    std::map<std::string, const ManifestEntry*> by_id;
    for (const auto& e : manifest.entries) by_id[e.utterance_id] = &e;

    struct Bucket {
        std::vector<double> scores;
        std::vector<bool> is_bona;
        std::map<TaskKind, std::pair<std::vector<int>, std::vector<int>>> preds_labels;
    };
    std::map<std::string, Bucket> buckets;
    for (const auto& r : rows) {
        auto it = by_id.find(r.utterance_id);
        if (it == by_id.end()) {
            throw TraceError(ErrorCode::MissingUtterance,
                             "'" + r.utterance_id + "' not in manifest");
        }
        const ManifestEntry& e = *it->second;
        Bucket& b = buckets[to_string(e.split)];
        b.scores.push_back(r.bonafide_score);
        b.is_bona.push_back(e.origin == kBonafideOrigin);
        for (TaskKind t : setup.active_heads) {
            if (t == TaskKind::BIN) continue;
            auto pit = r.predicted.find(t);
            if (pit == r.predicted.end()) {
                throw TraceError(ErrorCode::ParseError,
                                 "score row " + r.utterance_id + " lacks prediction for " +
                                     to_string(t));
            }
            auto& [preds, labels] = b.preds_labels[t];
            preds.push_back(pit->second);
            labels.push_back(label_of(e.origin, t, registry));
        }
    }

    EvalReport report;
    report.config_name = setup.config_name;
    report.setup_json = setup.to_json();
    report.manifest_digest = manifest_digest(manifest);
    for (auto& [split_name, b] : buckets) {
        SplitReport sr;
        sr.n_utterances = static_cast<long>(b.scores.size());
        if (eer_defined(setup)) {
            try {
                const EerResult r = compute_eer(b.scores, b.is_bona);
                sr.bin_eer = r.eer_percent;
                sr.eer_threshold = r.threshold;
            } catch (const TraceError& e) {
                if (e.code() != ErrorCode::DegenerateLabels) throw;
            }
        }
        for (auto& [task, pl] : b.preds_labels) {
            const int k = task_class_count(task);
            TaskBlock block;
            block.weighted_f1 = weighted_f1(pl.first, pl.second, k);
            block.confusion_matrix = confusion(pl.first, pl.second, k);
            block.per_class = per_class_stats(pl.first, pl.second, k);
            block.random_guess_f1 = uniform_guess_f1(pl.second, k);
            sr.tasks[task] = std::move(block);
        }
        report.splits[split_name] = std::move(sr);
    }
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["config_name"] = report.config_name;
    j["setup"] = nlohmann::ordered_json::parse(report.setup_json);
    j["manifest_digest"] = report.manifest_digest;
    nlohmann::ordered_json splits;
    for (const auto& [name, sr] : report.splits) {
        nlohmann::ordered_json js;
        js["n_utterances"] = sr.n_utterances;
        if (sr.bin_eer) {
            js["bin_eer"] = *sr.bin_eer;
            js["eer_threshold"] = *sr.eer_threshold;
        }
        nlohmann::ordered_json tasks;
        for (const auto& [task, block] : sr.tasks) {
            nlohmann::ordered_json jt;
            jt["weighted_f1"] = block.weighted_f1;
            jt["random_guess_f1"] = block.random_guess_f1;
            jt["confusion_matrix"] = block.confusion_matrix;
            nlohmann::ordered_json per_class = nlohmann::ordered_json::array();
            const auto& classes = task_classes(task);
            for (std::size_t c = 0; c < block.per_class.size(); ++c) {
                const auto& s = block.per_class[c];
                per_class.push_back({{"class", classes[c]},
                                     {"precision", s.precision},
                                     {"recall", s.recall},
                                     {"f1", s.f1},
                                     {"support", s.support}});
            }
            jt["per_class"] = per_class;
            tasks[to_string(task)] = std::move(jt);
        }
        js["tasks"] = std::move(tasks);
        splits[name] = std::move(js);
    }
    j["splits"] = std::move(splits);
    return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TraceError(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    EvalReport report;
    try {
        report.config_name = j.at("config_name").get<std::string>();
        report.setup_json = TrainSetup::from_json(j.at("setup").dump()).to_json();
        report.manifest_digest = j.at("manifest_digest").get<std::string>();
        for (const auto& [name, js] : j.at("splits").items()) {
            SplitReport sr;
            sr.n_utterances = js.at("n_utterances").get<long>();
            if (js.contains("bin_eer")) {
                sr.bin_eer = js.at("bin_eer").get<double>();
                sr.eer_threshold = js.at("eer_threshold").get<double>();
            }
            for (const auto& [task_name, jt] : js.at("tasks").items()) {
                const TaskKind task = task_from_string(task_name);
                TaskBlock block;
                block.weighted_f1 = jt.at("weighted_f1").get<double>();
                block.random_guess_f1 = jt.at("random_guess_f1").get<double>();
                block.confusion_matrix =
                    jt.at("confusion_matrix").get<std::vector<std::vector<long>>>();
                for (const auto& jc : jt.at("per_class")) {
                    ClassStats s;
                    s.precision = jc.at("precision").get<double>();
                    s.recall = jc.at("recall").get<double>();
                    s.f1 = jc.at("f1").get<double>();
                    s.support = jc.at("support").get<long>();
                    block.per_class.push_back(s);
                }
                sr.tasks[task] = std::move(block);
            }
            report.splits[name] = std::move(sr);
        }
    } catch (const nlohmann::json::exception& e) {
        throw TraceError(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    return report;
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream out;
    out << "configuration: " << report.config_name
        << "   manifest: " << report.manifest_digest << "\n";
    for (const auto& [name, sr] : report.splits) {
        out << "\n== split " << name << " (" << sr.n_utterances << " utterances) ==\n";
        if (sr.bin_eer) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "EER: %.2f%%  (threshold %.6f)\n", *sr.bin_eer,
                          *sr.eer_threshold);
            out << buf;
        }
        for (const auto& [task, block] : sr.tasks) {
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "%s weighted F1: %.2f%%  (uniform guess baseline %.2f%%)\n",
                          to_string(task).c_str(), block.weighted_f1, block.random_guess_f1);
            out << buf;
        }
    }
    return out.str();
}

std::string confusion_csv(const TaskBlock& block, TaskKind task) {
    const auto& classes = task_classes(task);
    std::ostringstream out;
    out << "reference\\predicted";
    for (const auto& c : classes) out << "," << c;
    out << "\n";
    for (std::size_t r = 0; r < block.confusion_matrix.size(); ++r) {
        out << classes[r];
        for (long v : block.confusion_matrix[r]) out << "," << v;
        out << "\n";
    }
    return out.str();
}

void write_report_files(const EvalReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto write = [&](const std::filesystem::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            throw TraceError(ErrorCode::IoError, "cannot write " + p.string());
        }
        out << text;
    };
    write(dir / "report.json", report_to_json(report));
    write(dir / "report.txt", report_to_text(report));
    for (const auto& [split_name, sr] : report.splits) {
        for (const auto& [task, block] : sr.tasks) {
            write(dir / (split_name + "_" + to_string(task) + "_confusion.csv"),
                  confusion_csv(block, task));
        }
    }
}

}  // namespace taxotrace
