#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>

#include "taxotrace/model.hpp"
#include "taxotrace/setup.hpp"

namespace taxotrace {

struct OptimizerState {
    long step = 0;
    std::map<std::string, Eigen::MatrixXd> m;
    std::map<std::string, Eigen::MatrixXd> v;
};

/// Self-contained training state: last parameters plus the best-on-dev
/// snapshot, optimizer moments, the TrainSetup and class orders. The file
/// format is a JSON header followed by raw little-endian doubles, and
/// round-trips bit-exactly.
struct Checkpoint {
    static constexpr int kVersion = 1;

    TrainSetup setup;
    ModelConfig model_config;
    std::map<std::string, Eigen::MatrixXd> params;       // last epoch
    std::map<std::string, Eigen::MatrixXd> best_params;  // dev-selected
    OptimizerState opt;
    int next_epoch = 0;
    int best_epoch = -1;        // -1: no dev evaluation yet
    double best_metric = 0.0;   // lower dev BIN EER, else -mean weighted F1

    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);

    /// Model with this checkpoint's architecture and parameters.
    /// Prefers the best-on-dev snapshot when `use_best` and one exists.
    Model instantiate(bool use_best) const;
};

}  // namespace taxotrace
