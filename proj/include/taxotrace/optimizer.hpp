#pragma once

#include <string>
#include <vector>

#include "taxotrace/checkpoint.hpp"
#include "taxotrace/model.hpp"

namespace taxotrace {

/// Stochastic gradient descent with adaptive per-parameter step scaling
/// (first/second moment estimates) and decoupled weight decay. The decay
/// term is applied to the parameter directly, not through the gradient, so
/// weight_decay = 0 reproduces the plain adaptive update exactly.
class AdaptiveOptimizer {
public:
    AdaptiveOptimizer(double learning_rate, double weight_decay, double beta1 = 0.9,
                      double beta2 = 0.999, double eps = 1e-8)
        : lr_(learning_rate), wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    /// One update over the named tensors using their accumulated grads.
    void step(ParamStore& params, const std::vector<std::string>& names,
              OptimizerState& state) const;

private:
    double lr_, wd_, beta1_, beta2_, eps_;
};

}  // namespace taxotrace
