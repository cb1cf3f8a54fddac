#include "taxotrace/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "taxotrace/error.hpp"

namespace taxotrace {

EerResult compute_eer(const std::vector<double>& scores, const std::vector<bool>& is_bonafide) {
    if (scores.size() != is_bonafide.size()) {
        throw TraceError(ErrorCode::InvalidArgument, "scores/labels length mismatch");
    }
    std::vector<double> bona, spoof;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (is_bonafide[i] ? bona : spoof).push_back(scores[i]);
    }
    if (bona.empty() || spoof.empty()) {
        throw TraceError(ErrorCode::DegenerateLabels,
                         "need at least one bona fide and one spoof score");
    }
    std::sort(bona.begin(), bona.end());
    std::sort(spoof.begin(), spoof.end());

    std::vector<double> distinct(scores);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    // midpoints between consecutive distinct scores, plus sentinels past
    // both ends standing in for -inf / +inf
    std::vector<double> thresholds;
    thresholds.push_back(distinct.front() - 1.0);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        thresholds.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    }
    thresholds.push_back(distinct.back() + 1.0);

    auto far_at = [&](double t) {
        const auto it = std::lower_bound(spoof.begin(), spoof.end(), t);
        return static_cast<double>(spoof.end() - it) / spoof.size();
    };
    auto frr_at = [&](double t) {
        const auto it = std::lower_bound(bona.begin(), bona.end(), t);
        return static_cast<double>(it - bona.begin()) / bona.size();
    };

    double prev_far = far_at(thresholds[0]);
    double prev_frr = frr_at(thresholds[0]);
    double prev_d = prev_far - prev_frr;
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        const double far = far_at(thresholds[i]);
        const double frr = frr_at(thresholds[i]);
        const double d = far - frr;
        if (prev_d >= 0.0 && d <= 0.0) {
            const double denom = prev_d - d;
            const double alpha = denom > 0.0 ? prev_d / denom : 0.0;
            EerResult r;
            r.eer_percent = 100.0 * ((1.0 - alpha) * prev_far + alpha * far);
            r.threshold = (1.0 - alpha) * thresholds[i - 1] + alpha * thresholds[i];
            return r;
        }
        prev_far = far;
        prev_frr = frr;
        prev_d = d;
    }
    // FAR - FRR goes from +1 to -1 over the sweep, so a bracket always exists
    throw TraceError(ErrorCode::InvalidArgument, "no EER crossing found");
}

std::vector<std::vector<long>> confusion(const std::vector<int>& preds,
                                         const std::vector<int>& labels, int n_classes) {
    if (preds.empty() || preds.size() != labels.size()) {
        throw TraceError(ErrorCode::EmptyInput, "preds/labels empty or mismatched");
    }
    std::vector<std::vector<long>> m(n_classes, std::vector<long>(n_classes, 0));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] < 0 || preds[i] >= n_classes || labels[i] < 0 || labels[i] >= n_classes) {
            throw TraceError(ErrorCode::InvalidArgument, "class index out of range");
        }
        ++m[labels[i]][preds[i]];
    }
    return m;
}

std::vector<ClassStats> per_class_stats(const std::vector<int>& preds,
                                        const std::vector<int>& labels, int n_classes) {
    const auto m = confusion(preds, labels, n_classes);
    std::vector<ClassStats> stats(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        long tp = m[c][c], fn = 0, fp = 0;
        for (int k = 0; k < n_classes; ++k) {
            if (k != c) {
                fn += m[c][k];
                fp += m[k][c];
            }
        }
        ClassStats& s = stats[c];
        s.support = tp + fn;
        s.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        s.recall = s.support > 0 ? static_cast<double>(tp) / s.support : 0.0;
        s.f1 = (s.precision + s.recall) > 0.0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
    }
    return stats;
}

double weighted_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                   int n_classes) {
    const auto stats = per_class_stats(preds, labels, n_classes);
    const double n = static_cast<double>(labels.size());
    double acc = 0.0;
    for (const auto& s : stats) {
        acc += (s.support / n) * s.f1;
    }
    return 100.0 * acc;
}

}  // namespace taxotrace
