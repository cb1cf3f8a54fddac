#include "taxotrace/setup.hpp"

#include <fstream>

#include "json.hpp"

namespace taxotrace {

bool TrainSetup::is_active(TaskKind task) const {
    for (TaskKind t : active_heads) {
        if (t == task) return true;
    }
    return false;
}

std::vector<std::string> all_config_names() {
    return {"S_BIN", "S_VQ", "S_AUX", "S_DEC", "D_VQ", "D_AUX", "D_DEC", "M1", "M2"};
}

TrainSetup TrainSetup::from_config_name(const std::string& name) {
    TrainSetup s;
    s.config_name = name;
    if (name == "S_BIN") s.active_heads = {TaskKind::BIN};
    else if (name == "S_VQ") s.active_heads = {TaskKind::VQ};
    else if (name == "S_AUX") s.active_heads = {TaskKind::AUX};
    else if (name == "S_DEC") s.active_heads = {TaskKind::DEC};
    else if (name == "D_VQ") s.active_heads = {TaskKind::BIN, TaskKind::VQ};
    else if (name == "D_AUX") s.active_heads = {TaskKind::BIN, TaskKind::AUX};
    else if (name == "D_DEC") s.active_heads = {TaskKind::BIN, TaskKind::DEC};
    else if (name == "M1")
        s.active_heads = {TaskKind::BIN, TaskKind::VQ, TaskKind::AUX, TaskKind::DEC};
    else if (name == "M2") s.active_heads = {TaskKind::VQ, TaskKind::AUX, TaskKind::DEC};
    else
        throw TraceError(ErrorCode::InvalidArgument, "unknown config_name '" + name + "'");
    s.lambdas = {0, 0, 0, 0};
    for (TaskKind t : s.active_heads) s.lambdas[static_cast<int>(t)] = 1.0;
    return s;
}

void TrainSetup::validate() const {
    if (active_heads.empty()) {
        throw TraceError(ErrorCode::InvalidArgument, "no active heads");
    }
    for (TaskKind t : kAllTasks) {
        const double l = lambda(t);
        if (is_active(t) && l <= 0) {
            throw TraceError(ErrorCode::InvalidArgument,
                             "lambda for active head " + to_string(t) + " must be > 0");
        }
        if (!is_active(t) && l != 0) {
            throw TraceError(ErrorCode::InvalidArgument,
                             "lambda for inactive head " + to_string(t) + " must be 0");
        }
    }
    if (learning_rate <= 0) {
        throw TraceError(ErrorCode::InvalidArgument, "learning_rate must be positive");
    }
    if (weight_decay < 0) {
        throw TraceError(ErrorCode::InvalidArgument, "weight_decay must be nonnegative");
    }
    if (batch_size <= 0 || epochs < 0 || patience < 0 || d_model <= 0) {
        throw TraceError(ErrorCode::InvalidArgument, "invalid training hyperparameters");
    }
    if (frontend != "toy" && frontend != "external") {
        throw TraceError(ErrorCode::InvalidArgument, "frontend must be 'toy' or 'external'");
    }
}

std::string TrainSetup::to_json() const {
    nlohmann::ordered_json j;
    j["config_name"] = config_name;
    j["lambdas"] = lambdas;
    j["learning_rate"] = learning_rate;
    j["weight_decay"] = weight_decay;
    j["batch_size"] = batch_size;
    j["epochs"] = epochs;
    j["patience"] = patience;
    j["seed"] = seed;
    j["frontend"] = frontend;
    j["d_model"] = d_model;
    j["augment_strength"] = augment_strength;
    return j.dump(2);
}

TrainSetup TrainSetup::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw TraceError(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    if (!j.contains("config_name")) {
        throw TraceError(ErrorCode::ParseError, "config missing config_name");
    }
    TrainSetup s = from_config_name(j["config_name"].get<std::string>());
    try {
        if (j.contains("lambdas")) {
            auto v = j["lambdas"].get<std::vector<double>>();
            if (v.size() != 4) {
                throw TraceError(ErrorCode::ParseError, "lambdas must have 4 entries");
            }
            std::copy(v.begin(), v.end(), s.lambdas.begin());
        }
        if (j.contains("learning_rate")) s.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("weight_decay")) s.weight_decay = j["weight_decay"].get<double>();
        if (j.contains("batch_size")) s.batch_size = j["batch_size"].get<int>();
        if (j.contains("epochs")) s.epochs = j["epochs"].get<int>();
        if (j.contains("patience")) s.patience = j["patience"].get<int>();
        if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("frontend")) s.frontend = j["frontend"].get<std::string>();
        if (j.contains("d_model")) s.d_model = j["d_model"].get<int>();
        if (j.contains("augment_strength"))
            s.augment_strength = j["augment_strength"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw TraceError(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
    s.validate();
    return s;
}

TrainSetup TrainSetup::load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open config " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

}  // namespace taxotrace
