#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

/// One training configuration from the nine-entry catalog:
///   S_BIN/S_VQ/S_AUX/S_DEC  single task
///   D_VQ/D_AUX/D_DEC        BIN + one source-tracing task
///   M1                       all four heads
///   M2                       VQ + AUX + DEC (fused spoof score at inference)
struct TrainSetup {
    std::string config_name = "M2";
    std::vector<TaskKind> active_heads;        // in BIN,VQ,AUX,DEC order
    std::array<double, 4> lambdas{1, 1, 1, 1};  // indexed by TaskKind; 0 when inactive
    double learning_rate = 1e-3;  // toy front-end profile; 1e-6 suits a pretrained one
    double weight_decay = 1e-4;
    int batch_size = 8;
    int epochs = 30;
    int patience = 10;
    std::uint64_t seed = 1;
    std::string frontend = "toy";
    int d_model = 64;
    double augment_strength = 0.0;

    bool is_active(TaskKind task) const;
    double lambda(TaskKind task) const { return lambdas[static_cast<int>(task)]; }

    /// Active heads implied by a catalog name, default hyperparameters.
    static TrainSetup from_config_name(const std::string& name);

    /// JSON config file; unknown fields rejected, absent fields keep the
    /// catalog defaults for config_name.
    static TrainSetup load_json(const std::filesystem::path& path);
    std::string to_json() const;
    static TrainSetup from_json(const std::string& text);

    /// Enforces the invariants: at least one active head, lambda_i > 0 iff
    /// head i is active, positive learning rate and batch size.
    void validate() const;
};

std::vector<std::string> all_config_names();

}  // namespace taxotrace
