#include "taxotrace/optimizer.hpp"

#include <cmath>

namespace taxotrace {

void AdaptiveOptimizer::step(ParamStore& params, const std::vector<std::string>& names,
                             OptimizerState& state) const {
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(state.step));
    for (const auto& name : names) {
        Tensor& t = params.at(name);
        auto mit = state.m.find(name);
        if (mit == state.m.end()) {
            mit = state.m.emplace(name, Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()))
                      .first;
            state.v.emplace(name, Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
        }
        Eigen::MatrixXd& m = mit->second;
        Eigen::MatrixXd& v = state.v.at(name);
        m = beta1_ * m + (1.0 - beta1_) * t.grad;
        v = (beta2_ * v.array() + (1.0 - beta2_) * t.grad.array().square()).matrix();
        const auto m_hat = m.array() / bc1;
        const auto v_hat = v.array() / bc2;
        t.value.array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
        if (wd_ != 0.0) {
            t.value.array() -= lr_ * wd_ * t.value.array();
        }
    }
}

}  // namespace taxotrace
