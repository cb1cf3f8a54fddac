#include "taxotrace/manifest.hpp"

#include <fstream>
#include <set>

#include "json.hpp"
#include "taxotrace/hash.hpp"

namespace taxotrace {

std::string to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::EvalCors: return "eval_cors";
        case Split::EvalCosgKnown: return "eval_cosg_known";
        case Split::EvalCosgAll: return "eval_cosg_all";
    }
    return "?";
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "dev") return Split::Dev;
    if (s == "eval_cors") return Split::EvalCors;
    if (s == "eval_cosg_known") return Split::EvalCosgKnown;
    if (s == "eval_cosg_all") return Split::EvalCosgAll;
    throw TraceError(ErrorCode::ParseError, "unknown split '" + s + "'");
}

namespace {

nlohmann::ordered_json entry_to_json(const ManifestEntry& e) {
    nlohmann::ordered_json j;
    j["utterance_id"] = e.utterance_id;
    j["audio_path"] = e.audio_path;
    j["origin"] = e.origin;
    j["split"] = to_string(e.split);
    j["sample_rate"] = e.sample_rate;
    return j;
}

}  // namespace

Manifest ingest_manifest(const std::filesystem::path& path, const CodecRegistry& registry) {
    std::ifstream in(path);
    if (!in) {
        throw TraceError(ErrorCode::IoError, "cannot open manifest " + path.string());
    }
    Manifest manifest;
    manifest.base_dir = path.parent_path();
    std::set<std::string> seen_ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        ManifestEntry e;
        try {
            auto j = nlohmann::json::parse(line);
            e.utterance_id = j.at("utterance_id").get<std::string>();
            e.audio_path = j.at("audio_path").get<std::string>();
            e.origin = j.at("origin").get<std::string>();
            e.split = split_from_string(j.at("split").get<std::string>());
            e.sample_rate = j.at("sample_rate").get<int>();
        } catch (const nlohmann::json::exception& ex) {
            throw TraceError(ErrorCode::ParseError, where + ": " + ex.what());
        }
        if (e.sample_rate != 16000) {
            throw TraceError(ErrorCode::ParseError,
                             where + ": sample_rate must be 16000, got " +
                                 std::to_string(e.sample_rate));
        }
        if (e.origin != kBonafideOrigin && !registry.contains(e.origin)) {
            throw TraceError(ErrorCode::UnknownCodecId,
                             where + ": origin '" + e.origin + "' not registered");
        }
        if (!seen_ids.insert(e.utterance_id).second) {
            throw TraceError(ErrorCode::DuplicateUtteranceId,
                             where + ": duplicate utterance_id '" + e.utterance_id + "'");
        }
        manifest.entries.push_back(std::move(e));
    }
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw TraceError(ErrorCode::IoError, "cannot write manifest " + path.string());
    }
    for (const auto& e : manifest.entries) {
        out << entry_to_json(e).dump() << "\n";
    }
}

std::string manifest_digest(const Manifest& manifest) {
    std::uint64_t h = kFnvOffset;
    for (const auto& e : manifest.entries) {
        h = fnv1a_update(h, entry_to_json(e).dump());
        h = fnv1a_update(h, std::uint64_t{0x0a});
    }
    return hex_digest(h);
}

std::vector<ManifestEntry> filter_split(const Manifest& manifest, Split split) {
    std::vector<ManifestEntry> out;
    for (const auto& e : manifest.entries) {
        if (e.split == split) out.push_back(e);
    }
    return out;
}

}  // namespace taxotrace
