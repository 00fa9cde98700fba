#pragma once

#include <cstdint>
#include <string_view>

namespace dtwidx {

/// FNV-1a over bytes; used to fingerprint parameter blocks in index files
/// and benchmark outputs.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace dtwidx
