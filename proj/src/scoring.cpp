#include "taxotrace/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "taxotrace/error.hpp"

namespace taxotrace {

std::map<TaskKind, int> predict_classes(const std::map<TaskKind, Eigen::VectorXd>& probs) {
    std::map<TaskKind, int> preds;
    for (const auto& [task, p] : probs) {
        int best = 0;
        for (int i = 1; i < p.size(); ++i) {
            if (p(i) > p(best)) best = i;  // ties keep the lowest index
        }
        preds[task] = best;
    }
    return preds;
}

double fuse_bonafide(const std::vector<double>& bonafide_probs) {
    if (bonafide_probs.empty()) {
        throw TraceError(ErrorCode::NoActiveHeads, "no probabilities to fuse");
    }
    double log_sum = 0.0;
    for (double p : bonafide_probs) {
        log_sum += std::log(std::max(p, 1e-12));
    }
    return std::exp(log_sum / static_cast<double>(bonafide_probs.size()));
}

double score_bonafide(const std::map<TaskKind, Eigen::VectorXd>& probs,
                      const TrainSetup& setup) {
    if (probs.empty()) {
        throw TraceError(ErrorCode::NoActiveHeads, "no active heads");
    }
    auto bin = probs.find(TaskKind::BIN);
    if (bin != probs.end() && setup.is_active(TaskKind::BIN)) {
        return bin->second(0);  // used directly, multi-class heads ignored
    }
    std::vector<double> bona;
    for (const auto& [task, p] : probs) {
        if (task == TaskKind::BIN) continue;
        bona.push_back(p(0));
    }
    return fuse_bonafide(bona);
}

namespace {

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string render_score_file(const std::vector<ScoreSet>& rows, const TrainSetup& setup) {
    std::ostringstream out;
    out << "utterance_id\tbonafide_score\tbin_pred\tvq_pred\taux_pred\tdec_pred";
    for (TaskKind t : kAllTasks) {
        for (const auto& cls : task_classes(t)) {
            out << "\t" << to_string(t) << ":" << cls;
        }
    }
    out << "\n";

    std::vector<const ScoreSet*> ordered;
    ordered.reserve(rows.size());
    for (const auto& r : rows) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(), [](const ScoreSet* a, const ScoreSet* b) {
        return a->utterance_id < b->utterance_id;
    });

    for (const ScoreSet* r : ordered) {
        out << r->utterance_id << "\t" << fmt9(r->bonafide_score);
        for (TaskKind t : kAllTasks) {
            out << "\t";
            auto it = r->predicted.find(t);
            if (it != r->predicted.end() && setup.is_active(t)) {
                out << it->second;
            }
        }
        for (TaskKind t : kAllTasks) {
            auto it = r->probs.find(t);
            for (int c = 0; c < task_class_count(t); ++c) {
                out << "\t";
                if (it != r->probs.end() && setup.is_active(t)) {
                    out << fmt9(it->second(c));
                }
            }
        }
        out << "\n";
    }
    return out.str();
}

std::vector<ScoreRow> parse_score_file(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw TraceError(ErrorCode::ParseError, "score file has no header");
    }
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string field;
        while (std::getline(hs, field, '\t')) header.push_back(field);
    }
    if (header.size() < 6 || header[0] != "utterance_id" || header[1] != "bonafide_score") {
        throw TraceError(ErrorCode::ParseError, "unexpected score file header");
    }

    std::vector<ScoreRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, '\t')) fields.push_back(field);
        fields.resize(header.size());
        ScoreRow r;
        r.utterance_id = fields[0];
        try {
            r.bonafide_score = std::stod(fields[1]);
        } catch (const std::exception&) {
            throw TraceError(ErrorCode::ParseError,
                             "score file line " + std::to_string(lineno) + ": bad score");
        }
        const TaskKind order[] = {TaskKind::BIN, TaskKind::VQ, TaskKind::AUX, TaskKind::DEC};
        for (int i = 0; i < 4; ++i) {
            if (!fields[2 + i].empty()) {
                r.predicted[order[i]] = std::stoi(fields[2 + i]);
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace taxotrace
