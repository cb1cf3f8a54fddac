#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxotrace/setup.hpp"
#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

struct ScoreSet {
    std::string utterance_id;
    std::map<TaskKind, Eigen::VectorXd> probs;  // active heads only
    std::map<TaskKind, int> predicted;          // argmax per head
    double bonafide_score = 0.0;
};

/// Argmax per head; exact ties resolve to the lowest class index.
std::map<TaskKind, int> predict_classes(const std::map<TaskKind, Eigen::VectorXd>& probs);

/// Bona fide score for one utterance. With BIN active its bona fide
/// probability is used directly; otherwise the k-th root of the product of
/// the k active heads' bona fide probabilities (the cubic-root fusion for
/// the three-head M2 configuration). Probabilities are floored at 1e-12
/// before the product. Throws NoActiveHeads when probs is empty.
double score_bonafide(const std::map<TaskKind, Eigen::VectorXd>& probs,
                      const TrainSetup& setup);

/// Plain fusion helper over bona fide probabilities (geometric mean).
double fuse_bonafide(const std::vector<double>& bonafide_probs);

// ---- score file (tab-separated, 9 significant digits) ----------------------

/// Column layout: utterance_id, bonafide_score, bin_pred, vq_pred, aux_pred,
/// dec_pred, then one `<task>:<class>` probability column per class of every
/// task. Inactive heads leave their fields empty. Rows sorted by
/// utterance_id.
std::string render_score_file(const std::vector<ScoreSet>& rows, const TrainSetup& setup);

struct ScoreRow {
    std::string utterance_id;
    double bonafide_score = 0.0;
    std::map<TaskKind, int> predicted;  // present for active heads only
};

std::vector<ScoreRow> parse_score_file(const std::string& text);

}  // namespace taxotrace
