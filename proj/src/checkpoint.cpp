#include "taxotrace/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "json.hpp"
#include "taxotrace/error.hpp"

namespace taxotrace {

namespace {

constexpr char kMagic[8] = {'T', 'A', 'X', 'O', 'C', 'K', 'P', 'T'};

nlohmann::ordered_json model_config_json(const ModelConfig& c) {
    return {{"d_model", c.frontend.d_model}, {"frame", c.frontend.frame},
            {"hop", c.frontend.hop},         {"n_bands", c.frontend.n_bands},
            {"c1", c.frontend.c1},           {"c2", c.frontend.c2},
            {"k1", c.frontend.k1},           {"s1", c.frontend.s1},
            {"k2", c.frontend.k2},           {"s2", c.frontend.s2},
            {"k3", c.frontend.k3},           {"s3", c.frontend.s3},
            {"head_hidden", c.head_hidden},  {"init_seed", c.init_seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.frontend.d_model = j.at("d_model").get<int>();
    c.frontend.frame = j.at("frame").get<int>();
    c.frontend.hop = j.at("hop").get<int>();
    c.frontend.n_bands = j.at("n_bands").get<int>();
    c.frontend.c1 = j.at("c1").get<int>();
    c.frontend.c2 = j.at("c2").get<int>();
    c.frontend.k1 = j.at("k1").get<int>();
    c.frontend.s1 = j.at("s1").get<int>();
    c.frontend.k2 = j.at("k2").get<int>();
    c.frontend.s2 = j.at("s2").get<int>();
    c.frontend.k3 = j.at("k3").get<int>();
    c.frontend.s3 = j.at("s3").get<int>();
    c.head_hidden = j.at("head_hidden").get<int>();
    c.init_seed = j.at("init_seed").get<std::uint64_t>();
    return c;
}

struct TensorRef {
    std::string group;  // "params" | "best" | "opt_m" | "opt_v"
    std::string name;
    const Eigen::MatrixXd* mat;
};

void collect(const std::map<std::string, Eigen::MatrixXd>& group, const std::string& tag,
             std::vector<TensorRef>& out) {
    for (const auto& [name, mat] : group) {
        out.push_back({tag, name, &mat});
    }
}

}  // namespace

void Checkpoint::save(const std::filesystem::path& path) const {
    std::vector<TensorRef> refs;
    collect(params, "params", refs);
    collect(best_params, "best", refs);
    collect(opt.m, "opt_m", refs);
    collect(opt.v, "opt_v", refs);

    nlohmann::ordered_json header;
    header["version"] = kVersion;
    header["setup"] = nlohmann::ordered_json::parse(setup.to_json());
    header["model_config"] = model_config_json(model_config);
    header["next_epoch"] = next_epoch;
    header["best_epoch"] = best_epoch;
    header["best_metric"] = best_metric;
    header["opt_step"] = opt.step;
    nlohmann::ordered_json class_orders;
    for (TaskKind t : kAllTasks) {
        class_orders[to_string(t)] = task_classes(t);
    }
    header["class_orders"] = class_orders;
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const auto& r : refs) {
        tensors.push_back({{"group", r.group},
                           {"name", r.name},
                           {"rows", r.mat->rows()},
                           {"cols", r.mat->cols()}});
    }
    header["tensors"] = tensors;
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write checkpoint " + path.string());
    }
    out.write(kMagic, 8);
    const std::uint64_t hlen = header_text.size();
    out.write(reinterpret_cast<const char*>(&hlen), 8);
    out.write(header_text.data(), static_cast<std::streamsize>(hlen));
    for (const auto& r : refs) {
        out.write(reinterpret_cast<const char*>(r.mat->data()),
                  static_cast<std::streamsize>(sizeof(double) * r.mat->size()));
    }
    if (!out) {
        throw TraceError(ErrorCode::IoError, "write failed for " + path.string());
    }
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open checkpoint " + path.string());
    }
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) {
        throw TraceError(ErrorCode::VersionMismatch, "not a checkpoint file: " + path.string());
    }
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), 8);
    if (!in || hlen > (1ull << 24)) {
        throw TraceError(ErrorCode::VersionMismatch, "corrupt checkpoint header");
    }
    std::string header_text(hlen, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(hlen));
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception&) {
        throw TraceError(ErrorCode::VersionMismatch, "corrupt checkpoint header");
    }
    if (header.value("version", -1) != kVersion) {
        throw TraceError(ErrorCode::VersionMismatch,
                         "unsupported checkpoint version in " + path.string());
    }

    Checkpoint ckpt;
    try {
        ckpt.setup = TrainSetup::from_json(header.at("setup").dump());
        ckpt.model_config = model_config_from_json(header.at("model_config"));
        ckpt.next_epoch = header.at("next_epoch").get<int>();
        ckpt.best_epoch = header.at("best_epoch").get<int>();
        ckpt.best_metric = header.at("best_metric").get<double>();
        ckpt.opt.step = header.at("opt_step").get<long>();
        for (const auto& t : header.at("tensors")) {
            const std::string group = t.at("group").get<std::string>();
            const std::string name = t.at("name").get<std::string>();
            Eigen::MatrixXd mat(t.at("rows").get<Eigen::Index>(),
                                t.at("cols").get<Eigen::Index>());
            in.read(reinterpret_cast<char*>(mat.data()),
                    static_cast<std::streamsize>(sizeof(double) * mat.size()));
            if (!in) {
                throw TraceError(ErrorCode::VersionMismatch, "truncated checkpoint data");
            }
            if (group == "params") ckpt.params[name] = std::move(mat);
            else if (group == "best") ckpt.best_params[name] = std::move(mat);
            else if (group == "opt_m") ckpt.opt.m[name] = std::move(mat);
            else if (group == "opt_v") ckpt.opt.v[name] = std::move(mat);
            else
                throw TraceError(ErrorCode::VersionMismatch, "unknown tensor group " + group);
        }
    } catch (const nlohmann::json::exception& e) {
        throw TraceError(ErrorCode::VersionMismatch,
                         std::string("bad checkpoint header: ") + e.what());
    }
    return ckpt;
}

Model Checkpoint::instantiate(bool use_best) const {
    Model model(model_config);
    const auto& source = (use_best && !best_params.empty()) ? best_params : params;
    for (auto& t : model.params().tensors()) {
        auto it = source.find(t.name);
        if (it == source.end()) {
            throw TraceError(ErrorCode::VersionMismatch,
                             "checkpoint missing tensor " + t.name);
        }
        if (it->second.rows() != t.value.rows() || it->second.cols() != t.value.cols()) {
            throw TraceError(ErrorCode::VersionMismatch,
                             "checkpoint tensor shape mismatch for " + t.name);
        }
        t.value = it->second;
    }
    return model;
}

}  // namespace taxotrace
