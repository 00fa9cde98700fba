#include "dtwidx/rtree.hpp"

#include <algorithm>
#include <stdexcept>

namespace dtwidx {

namespace {

struct KeyedItem {
    std::size_t pos;
    const double* pt;
    std::uint64_t tie;
};

// Smallest s with s^k >= p, by integer search; avoids libm rounding.
std::size_t ceil_root(std::size_t p, std::size_t k) {
    if (p <= 1 || k == 0) return 1;
    for (std::size_t s = 1;; ++s) {
        std::size_t acc = 1;
        bool overflow = false;
        for (std::size_t i = 0; i < k && !overflow; ++i) {
            if (acc > p / s + 1) {
                overflow = true;
            } else {
                acc *= s;
            }
        }
        if (overflow || acc >= p) return s;
    }
}

// Tiles items[begin, end) into groups of at most cap, slicing along one
// dimension per recursion level.
void tile(std::vector<KeyedItem>& items, std::size_t begin, std::size_t end,
          std::size_t dim, std::size_t dims, std::size_t cap,
          std::vector<std::pair<std::size_t, std::size_t>>& groups) {
    const std::size_t n = end - begin;
    if (n <= cap) {
        groups.emplace_back(begin, end);
        return;
    }
    const auto by_dim = [dim](const KeyedItem& a, const KeyedItem& b) {
        if (a.pt[dim] != b.pt[dim]) return a.pt[dim] < b.pt[dim];
        return a.tie < b.tie;
    };
    std::sort(items.begin() + static_cast<std::ptrdiff_t>(begin),
              items.begin() + static_cast<std::ptrdiff_t>(end), by_dim);
    if (dim + 1 == dims) {
        for (std::size_t at = begin; at < end; at += cap) {
            groups.emplace_back(at, std::min(end, at + cap));
        }
        return;
    }
    const std::size_t pages = (n + cap - 1) / cap;
    const std::size_t slabs = ceil_root(pages, dims - dim);
    const std::size_t slab_size = (n + slabs - 1) / slabs;
    for (std::size_t at = begin; at < end; at += slab_size) {
        tile(items, at, std::min(end, at + slab_size), dim + 1, dims, cap,
             groups);
    }
}

std::vector<std::pair<std::size_t, std::size_t>> tile_all(
    std::vector<KeyedItem>& items, std::size_t dims, std::size_t cap) {
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    tile(items, 0, items.size(), 0, dims, cap, groups);
    return groups;
}

}  // namespace

RTreeNode build_rtree(
    const std::vector<std::pair<std::uint64_t, const PaaVector*>>& items,
    std::size_t node_capacity) {
    if (items.empty()) {
        throw std::invalid_argument("cannot build an r-tree without entries");
    }
    if (node_capacity < 2) {
        throw std::invalid_argument("node capacity must be at least 2");
    }
    const std::size_t dims = items.front().second->n_paa();

    std::vector<KeyedItem> keyed(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        keyed[i] = KeyedItem{i, items[i].second->coords.data(), items[i].first};
    }

    std::vector<RTreeNode> level;
    for (const auto& [begin, end] : tile_all(keyed, dims, node_capacity)) {
        RTreeNode leaf;
        leaf.box = Mbr::of(*items[keyed[begin].pos].second);
        for (std::size_t k = begin; k < end; ++k) {
            leaf.box.expand(*items[keyed[k].pos].second);
            leaf.entries.push_back(items[keyed[k].pos].first);
        }
        leaf.subtree_size = leaf.entries.size();
        level.push_back(std::move(leaf));
    }

    while (level.size() > 1) {
        std::vector<double> centers(level.size() * dims);
        std::vector<KeyedItem> nodes(level.size());
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t d = 0; d < dims; ++d) {
                centers[i * dims + d] =
                    (level[i].box.low[d] + level[i].box.high[d]) / 2.0;
            }
            nodes[i] = KeyedItem{i, centers.data() + i * dims,
                                 static_cast<std::uint64_t>(i)};
        }
        std::vector<RTreeNode> parents;
        for (const auto& [begin, end] : tile_all(nodes, dims, node_capacity)) {
            RTreeNode parent;
            parent.box = level[nodes[begin].pos].box;
            parent.subtree_size = 0;
            for (std::size_t k = begin; k < end; ++k) {
                RTreeNode& child = level[nodes[k].pos];
                parent.box.expand(child.box);
                parent.subtree_size += child.subtree_size;
                parent.children.push_back(std::move(child));
            }
            parents.push_back(std::move(parent));
        }
        level = std::move(parents);
    }
    return std::move(level.front());
}

}  // namespace dtwidx
