#pragma once

#include <Eigen/Dense>
#include <map>

#include "taxotrace/model.hpp"
#include "taxotrace/setup.hpp"

namespace taxotrace {

using TaskLabels = std::map<TaskKind, int>;

struct LossBreakdown {
    std::map<TaskKind, double> per_head;  // cross-entropy, active heads only
    double total = 0.0;                   // lambda-weighted sum
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
double cross_entropy(const Eigen::VectorXd& logits, int label);

/// Weighted multi-task loss over the heads active in `setup`. Throws
/// MissingLabel when a label for an active head is absent.
LossBreakdown total_loss(const HeadLogits& logits, const TaskLabels& labels,
                         const TrainSetup& setup);

/// d(total)/d(logits) per active head: lambda * (softmax(logits) - onehot).
HeadGrads total_loss_grad(const HeadLogits& logits, const TaskLabels& labels,
                          const TrainSetup& setup);

/// Softmax per head; every vector is a valid probability distribution.
std::map<TaskKind, Eigen::VectorXd> predict_probs(const HeadLogits& logits);

}  // namespace taxotrace
