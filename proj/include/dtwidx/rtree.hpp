#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dtwidx/paa.hpp"

namespace dtwidx {

/// Node of a static R-tree over PAA vectors. Internal nodes own their
/// children; leaves hold entry ids resolvable through the index store.
struct RTreeNode {
    Mbr box;
    std::vector<RTreeNode> children;
    std::vector<std::uint64_t> entries;
    std::size_t subtree_size = 0;

    bool is_leaf() const { return children.empty(); }
};

/**
 * Sort-tile-recursive bulk load. Entries are tiled dimension by dimension
 * into leaves of at most node_capacity ids, then consecutive nodes are
 * packed level by level until a single root remains. Deterministic: ties
 * are broken by entry id at the leaf level and by position above it.
 */
RTreeNode build_rtree(
    const std::vector<std::pair<std::uint64_t, const PaaVector*>>& items,
    std::size_t node_capacity);

}  // namespace dtwidx
