#pragma once

#include <vector>

namespace taxotrace {

struct EerResult {
    double eer_percent = 0.0;
    double threshold = 0.0;
};

/// Equal error rate over bona fide-likelihood scores. `is_bonafide[i]`
/// flags whether scores[i] belongs to a bona fide trial.
///
/// Sweep thresholds sit at midpoints between consecutive distinct sorted
/// scores plus sentinels past both ends. FAR(t) = fraction of spoof scores
/// >= t, FRR(t) = fraction of bona fide scores < t. The EER is read off by
/// linear interpolation between the two sweep points bracketing the sign
/// change of FAR - FRR. Throws DegenerateLabels for single-class input.
EerResult compute_eer(const std::vector<double>& scores, const std::vector<bool>& is_bonafide);

/// Support-weighted mean of per-class F1 in percent. A class with
/// precision + recall == 0 contributes F1 = 0.
double weighted_f1(const std::vector<int>& preds, const std::vector<int>& labels,
                   int n_classes);

/// confusion[r][p] = count of samples with reference class r predicted as p.
std::vector<std::vector<long>> confusion(const std::vector<int>& preds,
                                         const std::vector<int>& labels, int n_classes);

struct ClassStats {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;

    bool operator==(const ClassStats&) const = default;
};

std::vector<ClassStats> per_class_stats(const std::vector<int>& preds,
                                        const std::vector<int>& labels, int n_classes);

}  // namespace taxotrace
