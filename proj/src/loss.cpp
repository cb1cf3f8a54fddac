#include "taxotrace/loss.hpp"

#include <cmath>

#include "taxotrace/error.hpp"

namespace taxotrace {

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - m).exp();
    return e / e.sum();
}

double cross_entropy(const Eigen::VectorXd& logits, int label) {
    if (label < 0 || label >= logits.size()) {
        throw TraceError(ErrorCode::MissingLabel,
                         "label " + std::to_string(label) + " out of range");
    }
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return lse - logits(label);
}

LossBreakdown total_loss(const HeadLogits& logits, const TaskLabels& labels,
                         const TrainSetup& setup) {
    LossBreakdown out;
    for (TaskKind t : setup.active_heads) {
        auto lit = logits.find(t);
        if (lit == logits.end()) {
            throw TraceError(ErrorCode::MissingLabel, "no logits for head " + to_string(t));
        }
        auto yit = labels.find(t);
        if (yit == labels.end()) {
            throw TraceError(ErrorCode::MissingLabel, "no label for head " + to_string(t));
        }
        const double l = cross_entropy(lit->second, yit->second);
        out.per_head[t] = l;
        out.total += setup.lambda(t) * l;
    }
    return out;
}

HeadGrads total_loss_grad(const HeadLogits& logits, const TaskLabels& labels,
                          const TrainSetup& setup) {
    HeadGrads grads;
    for (TaskKind t : setup.active_heads) {
        auto lit = logits.find(t);
        auto yit = labels.find(t);
        if (lit == logits.end() || yit == labels.end()) {
            throw TraceError(ErrorCode::MissingLabel, "missing head " + to_string(t));
        }
        Eigen::VectorXd g = softmax(lit->second);
        g(yit->second) -= 1.0;
        grads[t] = setup.lambda(t) * g;
    }
    return grads;
}

std::map<TaskKind, Eigen::VectorXd> predict_probs(const HeadLogits& logits) {
    std::map<TaskKind, Eigen::VectorXd> probs;
    for (const auto& [task, l] : logits) {
        probs[task] = softmax(l);
    }
    return probs;
}

}  // namespace taxotrace
