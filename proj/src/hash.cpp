#include "taxotrace/hash.hpp"

#include <cstdio>

namespace taxotrace {

std::string hex_digest(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace taxotrace
