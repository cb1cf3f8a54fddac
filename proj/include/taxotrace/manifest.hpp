#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "taxotrace/taxonomy.hpp"

namespace taxotrace {

enum class Split { Train, Dev, EvalCors, EvalCosgKnown, EvalCosgAll };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct ManifestEntry {
    std::string utterance_id;
    std::string audio_path;  // relative to the manifest's directory
    std::string origin;      // "bonafide" or a codec_id
    Split split = Split::Train;
    int sample_rate = 16000;

    bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
    std::filesystem::path base_dir;  // directory audio_path is relative to
    std::vector<ManifestEntry> entries;

    std::filesystem::path audio_path(const ManifestEntry& e) const {
        return base_dir / e.audio_path;
    }
};

/// Parses and validates a JSON-lines manifest. Entries keep file order.
/// Throws ParseError / UnknownCodecId / DuplicateUtteranceId with the
/// offending line number in the message.
Manifest ingest_manifest(const std::filesystem::path& path, const CodecRegistry& registry);

void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

/// FNV-1a digest of the serialized entries, used to echo data identity
/// into reports and determinism checks.
std::string manifest_digest(const Manifest& manifest);

std::vector<ManifestEntry> filter_split(const Manifest& manifest, Split split);

}  // namespace taxotrace
