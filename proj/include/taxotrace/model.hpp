#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "taxotrace/setup.hpp"
#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

using HeadLogits = std::map<TaskKind, Eigen::VectorXd>;
using HeadGrads = std::map<TaskKind, Eigen::VectorXd>;

struct Tensor {
    std::string name;
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
};

/// Named parameter tensors in a stable registration order (the checkpoint
/// and optimizer orders follow it).
class ParamStore {
public:
    Tensor& add(const std::string& name, int rows, int cols);
    Tensor& at(const std::string& name);
    const Tensor& at(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::vector<Tensor>& tensors() { return tensors_; }
    const std::vector<Tensor>& tensors() const { return tensors_; }
    void zero_grad();

private:
    std::vector<Tensor> tensors_;
    std::map<std::string, std::size_t> index_;
};

struct FrontendConfig {
    int d_model = 64;
    int frame = 512, hop = 512;  // spectral analysis frame/hop; frame is a power of two
    int n_bands = 64;            // log-power bands per frame (<= frame/2)
    int c1 = 32;
    int c2 = 64;
    int k1 = 3, s1 = 1;
    int k2 = 3, s2 = 1;
    int k3 = 3, s3 = 2;
};

struct ModelConfig {
    FrontendConfig frontend;
    int head_hidden = 32;
    std::uint64_t init_seed = 1;
};

/// Deterministic per-frame log-power band features for one waveform
/// (frames x n_bands). The parameter-free feature stage of the toy
/// front-end; exposed for tests.
Eigen::MatrixXd spectral_features(const std::vector<double>& samples,
                                  const FrontendConfig& config);

/// Shared convolutional front-end over log-spectral band features plus
/// four independent task backends
/// (attentive mean pooling over frames, then a two-layer classifier).
/// All four heads always exist and are deterministically initialized; a
/// TrainSetup chooses which ones participate in forward/backward.
class Model {
public:
    explicit Model(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    /// Number of hidden frames produced for an input of `n_samples`.
    int frame_count(int n_samples) const;

    /// Hidden sequence (frames x d_model) for one waveform.
    Eigen::MatrixXd frontend_forward(const std::vector<double>& samples) const;

    /// Logits for each head active in `setup`, from a shared hidden sequence.
    HeadLogits heads_forward(const Eigen::MatrixXd& hidden, const TrainSetup& setup) const;

    /// Training-path forward with intermediates retained for backward().
    struct Cache;
    HeadLogits forward(const std::vector<double>& samples, const TrainSetup& setup,
                       Cache& cache) const;

    /// Accumulates parameter gradients for the heads present in `dlogits`
    /// and the shared front-end. Call params().zero_grad() between batches.
    void backward(const Cache& cache, const HeadGrads& dlogits);

    /// Tensor names updated when training under `setup`: the front-end plus
    /// every active head. Inactive heads never move.
    std::vector<std::string> trainable_names(const TrainSetup& setup) const;

    struct Cache {
        Eigen::MatrixXd input;                 // spectral features, frames x n_bands
        Eigen::MatrixXd u1, a1;                // im2col + post-ReLU per conv
        Eigen::MatrixXd u2, a2;
        Eigen::MatrixXd u3, hidden;
        struct HeadCache {
            Eigen::VectorXd attn;              // softmax over frames
            Eigen::VectorXd pooled;            // d_model
            Eigen::VectorXd h1;                // post-ReLU hidden
        };
        std::map<TaskKind, HeadCache> heads;
    };

private:
    struct ConvShape {
        int in_ch, out_ch, kernel, stride;
    };

    ConvShape conv_shape(int layer) const;
    Eigen::MatrixXd im2col(const Eigen::MatrixXd& x, const ConvShape& s) const;
    void col2im(const Eigen::MatrixXd& du, const ConvShape& s, Eigen::MatrixXd& dx) const;

    ModelConfig config_;
    ParamStore params_;
};

}  // namespace taxotrace
