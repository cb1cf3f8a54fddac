#pragma once

#include <cstdint>

#include "taxotrace/manifest.hpp"

namespace taxotrace {

/// Taxonomy-guided balanced sampling. Keeps every bona fide entry and picks
/// `total_spoof` spoof entries split as evenly as possible across the
/// grouping axis's spoof categories (per-category counts differ by at most
/// one; any remainder goes to the lexicographically first categories).
/// Within a category the picks round-robin across codec ids, randomized
/// within each codec under `seed`. Output preserves the input entry order.
Manifest balanced_sample(const Manifest& manifest, TaskKind grouping, int total_spoof,
                         std::uint64_t seed, const CodecRegistry& registry);

}  // namespace taxotrace
