#include "taxotrace/taxonomy.hpp"

#include <fstream>

#include "json.hpp"

namespace taxotrace {

std::string to_string(VqClass v) {
    switch (v) {
        case VqClass::Mvq: return "Mvq";
        case VqClass::Svq: return "Svq";
        case VqClass::Scq: return "Scq";
    }
    return "?";
}

std::string to_string(AuxClass a) {
    switch (a) {
        case AuxClass::Sem: return "Sem";
        case AuxClass::Disent: return "Disent";
        case AuxClass::NoAux: return "None";
    }
    return "?";
}

std::string to_string(DecClass d) {
    switch (d) {
        case DecClass::Time: return "Time";
        case DecClass::Freq: return "Freq";
    }
    return "?";
}

std::string to_string(TaskKind t) {
    switch (t) {
        case TaskKind::BIN: return "BIN";
        case TaskKind::VQ: return "VQ";
        case TaskKind::AUX: return "AUX";
        case TaskKind::DEC: return "DEC";
    }
    return "?";
}

VqClass vq_from_string(const std::string& s) {
    if (s == "Mvq") return VqClass::Mvq;
    if (s == "Svq") return VqClass::Svq;
    if (s == "Scq") return VqClass::Scq;
    throw TraceError(ErrorCode::ParseError, "unknown VQ class '" + s + "'");
}

AuxClass aux_from_string(const std::string& s) {
    if (s == "Sem") return AuxClass::Sem;
    if (s == "Disent") return AuxClass::Disent;
    if (s == "None") return AuxClass::NoAux;
    throw TraceError(ErrorCode::ParseError, "unknown AUX class '" + s + "'");
}

DecClass dec_from_string(const std::string& s) {
    if (s == "Time") return DecClass::Time;
    if (s == "Freq") return DecClass::Freq;
    throw TraceError(ErrorCode::ParseError, "unknown DEC class '" + s + "'");
}

TaskKind task_from_string(const std::string& s) {
    if (s == "BIN") return TaskKind::BIN;
    if (s == "VQ") return TaskKind::VQ;
    if (s == "AUX") return TaskKind::AUX;
    if (s == "DEC") return TaskKind::DEC;
    throw TraceError(ErrorCode::ParseError, "unknown task '" + s + "'");
}

const std::vector<std::string>& task_classes(TaskKind task) {
    static const std::vector<std::string> bin = {"bonafide", "spoof"};
    static const std::vector<std::string> vq = {"bonafide", "Mvq", "Svq", "Scq"};
    static const std::vector<std::string> aux = {"bonafide", "Sem", "Disent", "None"};
    static const std::vector<std::string> dec = {"bonafide", "Time", "Freq"};
    switch (task) {
        case TaskKind::BIN: return bin;
        case TaskKind::VQ: return vq;
        case TaskKind::AUX: return aux;
        case TaskKind::DEC: return dec;
    }
    return bin;
}

int task_class_count(TaskKind task) {
    return static_cast<int>(task_classes(task).size());
}

void CodecRegistry::register_codec(const CodecSpec& spec) {
    auto [it, inserted] = specs_.emplace(spec.codec_id, spec);
    if (!inserted) {
        throw TraceError(ErrorCode::DuplicateCodecId,
                         "codec '" + spec.codec_id + "' already registered");
    }
    order_.push_back(spec.codec_id);
}

const CodecSpec& CodecRegistry::lookup(const std::string& codec_id) const {
    auto it = specs_.find(codec_id);
    if (it == specs_.end()) {
        throw TraceError(ErrorCode::UnknownCodecId, "codec '" + codec_id + "' not registered");
    }
    return it->second;
}

bool CodecRegistry::contains(const std::string& codec_id) const {
    return specs_.count(codec_id) != 0;
}

CodecRegistry CodecRegistry::load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open registry file " + path.string());
    }
    CodecRegistry reg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw TraceError(ErrorCode::ParseError,
                             path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        CodecSpec spec;
        try {
            spec.codec_id = j.at("codec_id").get<std::string>();
            spec.display_name = j.value("display_name", spec.codec_id);
            spec.label.vq = vq_from_string(j.at("vq").get<std::string>());
            spec.label.aux = aux_from_string(j.at("aux").get<std::string>());
            spec.label.dec = dec_from_string(j.at("dec").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw TraceError(ErrorCode::ParseError,
                             path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        reg.register_codec(spec);
    }
    return reg;
}

void CodecRegistry::save_jsonl(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write registry file " + path.string());
    }
    for (const auto& id : order_) {
        const CodecSpec& spec = specs_.at(id);
        nlohmann::ordered_json j;
        j["codec_id"] = spec.codec_id;
        j["display_name"] = spec.display_name;
        j["vq"] = to_string(spec.label.vq);
        j["aux"] = to_string(spec.label.aux);
        j["dec"] = to_string(spec.label.dec);
        out << j.dump() << "\n";
    }
}

namespace {

int class_index(TaskKind task, const std::string& name) {
    const auto& names = task_classes(task);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    throw TraceError(ErrorCode::ParseError,
                     "class '" + name + "' not in task " + to_string(task));
}

}  // namespace

int label_of(const std::string& origin, TaskKind task, const CodecRegistry& registry) {
    if (origin == kBonafideOrigin) return 0;
    const CodecSpec& spec = registry.lookup(origin);
    switch (task) {
        case TaskKind::BIN: return 1;
        case TaskKind::VQ: return class_index(task, to_string(spec.label.vq));
        case TaskKind::AUX: return class_index(task, to_string(spec.label.aux));
        case TaskKind::DEC: return class_index(task, to_string(spec.label.dec));
    }
    return 0;
}

}  // namespace taxotrace
