#include "taxotrace/model.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "taxotrace/dsp.hpp"
#include "taxotrace/error.hpp"

namespace taxotrace {

Tensor& ParamStore::add(const std::string& name, int rows, int cols) {
    if (index_.count(name)) {
        throw TraceError(ErrorCode::InvalidArgument, "duplicate tensor " + name);
    }
    index_[name] = tensors_.size();
    tensors_.push_back({name, Eigen::MatrixXd::Zero(rows, cols),
                        Eigen::MatrixXd::Zero(rows, cols)});
    return tensors_.back();
}

Tensor& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw TraceError(ErrorCode::InvalidArgument, "no tensor " + name);
    }
    return tensors_[it->second];
}

const Tensor& ParamStore::at(const std::string& name) const {
    return const_cast<ParamStore*>(this)->at(name);
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) != 0; }

void ParamStore::zero_grad() {
    for (auto& t : tensors_) t.grad.setZero();
}

namespace {

std::string head_prefix(TaskKind task) { return "head." + to_string(task) + "."; }

Eigen::VectorXd softmax_vec(const Eigen::VectorXd& s) {
    const double m = s.maxCoeff();
    Eigen::VectorXd e = (s.array() - m).exp();
    return e / e.sum();
}

}  // namespace

Model::Model(const ModelConfig& config) : config_(config) {
    const FrontendConfig& f = config_.frontend;
    if (f.frame <= 0 || (f.frame & (f.frame - 1)) != 0) {
        throw TraceError(ErrorCode::InvalidArgument, "analysis frame must be a power of two");
    }
    if (f.n_bands <= 0 || f.n_bands > f.frame / 2) {
        throw TraceError(ErrorCode::InvalidArgument, "n_bands must lie in [1, frame/2]");
    }
    params_.add("frontend.conv1.w", f.c1, f.k1 * f.n_bands);
    params_.add("frontend.conv1.b", f.c1, 1);
    params_.add("frontend.conv2.w", f.c2, f.k2 * f.c1);
    params_.add("frontend.conv2.b", f.c2, 1);
    params_.add("frontend.conv3.w", f.d_model, f.k3 * f.c2);
    params_.add("frontend.conv3.b", f.d_model, 1);
    for (TaskKind t : kAllTasks) {
        const std::string p = head_prefix(t);
        const int classes = task_class_count(t);
        params_.add(p + "att_v", f.d_model, 1);
        params_.add(p + "fc1_w", config_.head_hidden, f.d_model);
        params_.add(p + "fc1_b", config_.head_hidden, 1);
        params_.add(p + "fc2_w", classes, config_.head_hidden);
        params_.add(p + "fc2_b", classes, 1);
    }

    // seeded uniform fan-in init; biases stay zero
    std::mt19937_64 rng(config_.init_seed);
    for (auto& t : params_.tensors()) {
        if (t.name.ends_with(".b") || t.name.ends_with("_b")) continue;
        const double bound = std::sqrt(1.0 / static_cast<double>(t.value.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index j = 0; j < t.value.cols(); ++j) {
            for (Eigen::Index i = 0; i < t.value.rows(); ++i) {
                t.value(i, j) = dist(rng);
            }
        }
    }
}

Model::ConvShape Model::conv_shape(int layer) const {
    const FrontendConfig& f = config_.frontend;
    switch (layer) {
        case 1: return {f.n_bands, f.c1, f.k1, f.s1};
        case 2: return {f.c1, f.c2, f.k2, f.s2};
        default: return {f.c2, f.d_model, f.k3, f.s3};
    }
}

int Model::frame_count(int n_samples) const {
    const FrontendConfig& f = config_.frontend;
    const int t0 = (n_samples - f.frame) / f.hop + 1;
    const int t1 = (t0 - f.k1) / f.s1 + 1;
    const int t2 = (t1 - f.k2) / f.s2 + 1;
    return (t2 - f.k3) / f.s3 + 1;
}

Eigen::MatrixXd spectral_features(const std::vector<double>& samples,
                                  const FrontendConfig& config) {
    const int frame = config.frame, hop = config.hop, n_bands = config.n_bands;
    const int n = static_cast<int>(samples.size());
    const int t0 = (n - frame) / hop + 1;
    if (t0 <= 0) {
        throw TraceError(ErrorCode::InvalidArgument, "input too short for feature framing");
    }
    const int bins = frame / 2;  // bins 1..frame/2, DC dropped
    Eigen::MatrixXd feat(t0, n_bands);
    std::vector<std::complex<double>> buf(frame);
    std::vector<double> power(std::size_t(bins) + 1);
    auto bands_from_power = [&](int t) {
        for (int b = 0; b < n_bands; ++b) {
            // Near-equal contiguous bin groups covering [1, frame/2].
            const int lo = 1 + (bins * b) / n_bands;
            const int hi = 1 + (bins * (b + 1)) / n_bands;
            double p = 0.0;
            for (int k = lo; k < hi; ++k) p += power[k];
            p /= double(hi - lo);
            feat(t, b) = 0.25 * (std::log(p + 1e-8) - 2.0);
        }
    };
    // Two real frames ride one complex transform: for z = f1 + i*f2,
    // F1[k] = (Z[k] + conj(Z[n-k]))/2 and F2[k] = (Z[k] - conj(Z[n-k]))/(2i).
    for (int t = 0; t + 1 < t0; t += 2) {
        const double* f1 = samples.data() + std::size_t(t) * hop;
        const double* f2 = samples.data() + std::size_t(t + 1) * hop;
        for (int i = 0; i < frame; ++i) buf[i] = {f1[i], f2[i]};
        fft(buf, false);
        for (int k = 1; k <= bins; ++k) {
            const std::complex<double> zk = buf[k];
            const std::complex<double> zc = std::conj(buf[frame - k]);
            power[k] = 0.25 * std::norm(zk + zc);
        }
        bands_from_power(t);
        for (int k = 1; k <= bins; ++k) {
            const std::complex<double> zk = buf[k];
            const std::complex<double> zc = std::conj(buf[frame - k]);
            power[k] = 0.25 * std::norm(zk - zc);
        }
        bands_from_power(t + 1);
    }
    if (t0 % 2 != 0) {
        const int t = t0 - 1;
        for (int i = 0; i < frame; ++i) buf[i] = samples[std::size_t(t) * hop + i];
        fft(buf, false);
        for (int k = 1; k <= bins; ++k) power[k] = std::norm(buf[k]);
        bands_from_power(t);
    }
    return feat;
}

Eigen::MatrixXd Model::im2col(const Eigen::MatrixXd& x, const ConvShape& s) const {
    const int t_in = static_cast<int>(x.rows());
    const int t_out = (t_in - s.kernel) / s.stride + 1;
    if (t_out <= 0) {
        throw TraceError(ErrorCode::InvalidArgument, "input too short for conv stack");
    }
    Eigen::MatrixXd u(t_out, s.kernel * s.in_ch);
    for (int t = 0; t < t_out; ++t) {
        for (int j = 0; j < s.kernel; ++j) {
            for (int c = 0; c < s.in_ch; ++c) {
                u(t, j * s.in_ch + c) = x(t * s.stride + j, c);
            }
        }
    }
    return u;
}

void Model::col2im(const Eigen::MatrixXd& du, const ConvShape& s, Eigen::MatrixXd& dx) const {
    for (int t = 0; t < du.rows(); ++t) {
        for (int j = 0; j < s.kernel; ++j) {
            for (int c = 0; c < s.in_ch; ++c) {
                dx(t * s.stride + j, c) += du(t, j * s.in_ch + c);
            }
        }
    }
}

HeadLogits Model::forward(const std::vector<double>& samples, const TrainSetup& setup,
                          Cache& cache) const {
    cache.input = spectral_features(samples, config_.frontend);
    auto conv = [&](const Eigen::MatrixXd& x, int layer, Eigen::MatrixXd& u,
                    Eigen::MatrixXd& a) {
        const ConvShape s = conv_shape(layer);
        u = im2col(x, s);
        const auto& w = params_.at("frontend.conv" + std::to_string(layer) + ".w").value;
        const auto& b = params_.at("frontend.conv" + std::to_string(layer) + ".b").value;
        a = (u * w.transpose()).rowwise() + b.col(0).transpose();
        a = a.cwiseMax(0.0);  // ReLU
    };
    Eigen::MatrixXd a3;
    conv(cache.input, 1, cache.u1, cache.a1);
    conv(cache.a1, 2, cache.u2, cache.a2);
    conv(cache.a2, 3, cache.u3, a3);
    cache.hidden = std::move(a3);

    HeadLogits logits;
    cache.heads.clear();
    for (TaskKind t : setup.active_heads) {
        const std::string p = head_prefix(t);
        Cache::HeadCache hc;
        const Eigen::VectorXd scores = cache.hidden * params_.at(p + "att_v").value.col(0);
        hc.attn = softmax_vec(scores);
        hc.pooled = cache.hidden.transpose() * hc.attn;
        const auto& w1 = params_.at(p + "fc1_w").value;
        const auto& b1 = params_.at(p + "fc1_b").value;
        const auto& w2 = params_.at(p + "fc2_w").value;
        const auto& b2 = params_.at(p + "fc2_b").value;
        hc.h1 = ((w1 * hc.pooled + b1.col(0)).array().max(0.0)).matrix();
        logits[t] = w2 * hc.h1 + b2.col(0);
        cache.heads[t] = std::move(hc);
    }
    return logits;
}

Eigen::MatrixXd Model::frontend_forward(const std::vector<double>& samples) const {
    Cache cache;
    TrainSetup none;
    none.active_heads.clear();
    forward(samples, none, cache);
    return cache.hidden;
}

HeadLogits Model::heads_forward(const Eigen::MatrixXd& hidden, const TrainSetup& setup) const {
    if (!hidden.allFinite()) {
        throw TraceError(ErrorCode::InvalidArgument, "hidden sequence is not finite");
    }
    HeadLogits logits;
    for (TaskKind t : setup.active_heads) {
        const std::string p = head_prefix(t);
        const Eigen::VectorXd attn =
            softmax_vec(hidden * params_.at(p + "att_v").value.col(0));
        const Eigen::VectorXd pooled = hidden.transpose() * attn;
        const Eigen::VectorXd h1 =
            ((params_.at(p + "fc1_w").value * pooled + params_.at(p + "fc1_b").value.col(0))
                 .array()
                 .max(0.0))
                .matrix();
        logits[t] = params_.at(p + "fc2_w").value * h1 + params_.at(p + "fc2_b").value.col(0);
    }
    return logits;
}

void Model::backward(const Cache& cache, const HeadGrads& dlogits) {
    Eigen::MatrixXd dhidden = Eigen::MatrixXd::Zero(cache.hidden.rows(), cache.hidden.cols());

    for (const auto& [task, dlog] : dlogits) {
        const std::string p = head_prefix(task);
        const auto& hc = cache.heads.at(task);
        auto& w2 = params_.at(p + "fc2_w");
        auto& b2 = params_.at(p + "fc2_b");
        auto& w1 = params_.at(p + "fc1_w");
        auto& b1 = params_.at(p + "fc1_b");
        auto& v = params_.at(p + "att_v");

        w2.grad += dlog * hc.h1.transpose();
        b2.grad.col(0) += dlog;
        Eigen::VectorXd dh1 = w2.value.transpose() * dlog;
        Eigen::VectorXd dz1 =
            (dh1.array() * (hc.h1.array() > 0.0).cast<double>()).matrix();
        w1.grad += dz1 * hc.pooled.transpose();
        b1.grad.col(0) += dz1;
        Eigen::VectorXd dpooled = w1.value.transpose() * dz1;

        // pooled = H^T a;  a = softmax(H v)
        dhidden += hc.attn * dpooled.transpose();
        Eigen::VectorXd da = cache.hidden * dpooled;
        const double dot = hc.attn.dot(da);
        Eigen::VectorXd ds = (hc.attn.array() * (da.array() - dot)).matrix();
        v.grad.col(0) += cache.hidden.transpose() * ds;
        dhidden += ds * v.value.col(0).transpose();
    }

    auto conv_backward = [&](int layer, const Eigen::MatrixXd& u, const Eigen::MatrixXd& act,
                             const Eigen::MatrixXd& da, Eigen::MatrixXd* dx,
                             Eigen::Index in_rows) {
        const ConvShape s = conv_shape(layer);
        const Eigen::MatrixXd dz =
            (da.array() * (act.array() > 0.0).cast<double>()).matrix();
        auto& w = params_.at("frontend.conv" + std::to_string(layer) + ".w");
        auto& b = params_.at("frontend.conv" + std::to_string(layer) + ".b");
        w.grad += dz.transpose() * u;
        b.grad.col(0) += dz.colwise().sum().transpose();
        if (dx != nullptr) {
            dx->setZero(in_rows, s.in_ch);
            const Eigen::MatrixXd du = dz * w.value;
            col2im(du, s, *dx);
        }
    };

    Eigen::MatrixXd da2, da1;
    conv_backward(3, cache.u3, cache.hidden, dhidden, &da2, cache.a2.rows());
    conv_backward(2, cache.u2, cache.a2, da2, &da1, cache.a1.rows());
    conv_backward(1, cache.u1, cache.a1, da1, nullptr, 0);
}

std::vector<std::string> Model::trainable_names(const TrainSetup& setup) const {
    std::vector<std::string> names;
    for (const auto& t : params_.tensors()) {
        if (t.name.starts_with("frontend.")) {
            names.push_back(t.name);
            continue;
        }
        for (TaskKind task : setup.active_heads) {
            if (t.name.starts_with(head_prefix(task))) {
                names.push_back(t.name);
                break;
            }
        }
    }
    return names;
}

}  // namespace taxotrace
