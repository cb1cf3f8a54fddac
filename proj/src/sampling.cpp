#include "taxotrace/sampling.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "taxotrace/hash.hpp"

namespace taxotrace {

namespace {

std::string category_of(const ManifestEntry& e, TaskKind grouping,
                        const CodecRegistry& registry) {
    const CodecSpec& spec = registry.lookup(e.origin);
    switch (grouping) {
        case TaskKind::VQ: return to_string(spec.label.vq);
        case TaskKind::AUX: return to_string(spec.label.aux);
        case TaskKind::DEC: return to_string(spec.label.dec);
        default: break;
    }
    throw TraceError(ErrorCode::InvalidArgument, "grouping must be VQ, AUX or DEC");
}

}  // namespace

Manifest balanced_sample(const Manifest& manifest, TaskKind grouping, int total_spoof,
                         std::uint64_t seed, const CodecRegistry& registry) {
    if (total_spoof < 0) {
        throw TraceError(ErrorCode::InvalidArgument, "total_spoof must be nonnegative");
    }
    const auto& classes = task_classes(grouping);
    std::vector<std::string> categories(classes.begin() + 1, classes.end());
    std::sort(categories.begin(), categories.end());  // remainder rule is lexicographic

    // category -> codec_id -> entry indices (manifest order)
    std::map<std::string, std::map<std::string, std::vector<std::size_t>>> pool;
    for (const auto& c : categories) pool[c];
    std::size_t available = 0;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& e = manifest.entries[i];
        if (e.origin == kBonafideOrigin) continue;
        pool[category_of(e, grouping, registry)][e.origin].push_back(i);
        ++available;
    }
    if (static_cast<std::size_t>(total_spoof) > available) {
        throw TraceError(ErrorCode::InvalidArgument,
                         "total_spoof " + std::to_string(total_spoof) + " exceeds available " +
                             std::to_string(available));
    }
    for (const auto& c : categories) {
        if (pool[c].empty()) {
            throw TraceError(ErrorCode::EmptyCategory, c);
        }
    }

    const int k = static_cast<int>(categories.size());
    std::set<std::size_t> selected;
    for (int ci = 0; ci < k; ++ci) {
        const std::string& cat = categories[ci];
        const int target = total_spoof / k + (ci < total_spoof % k ? 1 : 0);

        // seeded shuffle within each codec, then round-robin across codec ids
        std::vector<std::pair<std::string, std::vector<std::size_t>>> codecs;
        for (auto& [codec_id, indices] : pool[cat]) {
            auto shuffled = indices;
            std::mt19937_64 rng(derive_seed(seed, "sample", 0, cat + "/" + codec_id));
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            codecs.emplace_back(codec_id, std::move(shuffled));
        }
        int taken = 0;
        for (std::size_t depth = 0; taken < target; ++depth) {
            bool any = false;
            for (auto& [codec_id, indices] : codecs) {
                if (depth < indices.size()) {
                    any = true;
                    selected.insert(indices[depth]);
                    if (++taken == target) break;
                }
            }
            if (!any) {
                throw TraceError(ErrorCode::InvalidArgument,
                                 "category " + cat + " has fewer than " +
                                     std::to_string(target) + " spoof entries");
            }
        }
    }

    Manifest out;
    out.base_dir = manifest.base_dir;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        if (manifest.entries[i].origin == kBonafideOrigin || selected.count(i)) {
            out.entries.push_back(manifest.entries[i]);
        }
    }
    return out;
}

}  // namespace taxotrace
