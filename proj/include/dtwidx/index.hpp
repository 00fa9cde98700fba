#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dtwidx/paa.hpp"
#include "dtwidx/rtree.hpp"
#include "dtwidx/series.hpp"

namespace dtwidx {

struct IndexConfig {
    std::size_t band_radius = 0;
    std::size_t n_paa = 16;
    double pad_value = 0.0;
    std::size_t node_capacity = 16;
    std::optional<std::size_t> lmax;
    bool keogh_filter = false;
};

struct SearchStats {
    std::size_t node_visits = 0;
    std::size_t mbr_evaluations = 0;
    std::size_t paa_evaluations = 0;
    std::size_t keogh_evaluations = 0;
    std::size_t dtw_evaluations = 0;
    std::size_t pruned_by_mbr = 0;
    std::size_t pruned_by_paa = 0;
    std::size_t pruned_by_keogh = 0;
    std::size_t infeasible_excluded = 0;

    bool operator==(const SearchStats&) const = default;
};

struct Match {
    std::uint64_t id = 0;
    double distance = 0.0;

    bool operator==(const Match&) const = default;
};

struct RangeResult {
    std::vector<Match> matches;
    SearchStats stats;
};

class DtwIndex;

/**
 * Builds an immutable index: every sequence is extended to a common length,
 * reduced to a PAA vector and bulk-loaded into an R-tree. When config.lmax
 * is unset it resolves to the smallest multiple of n_paa strictly above the
 * longest sequence. Sequence ids must be unique. Emits a warning (collected
 * or stderr) when the length spread is too wide for any single query to
 * reach every entry.
 */
DtwIndex build_index(const std::vector<TimeSeries>& dataset,
                     const IndexConfig& config,
                     std::vector<std::string>* warnings = nullptr);

/// Oracle: band-constrained DTW against every candidate, no index.
RangeResult linear_scan(const std::vector<TimeSeries>& dataset,
                        const TimeSeries& q, double epsilon,
                        std::size_t band_radius);

void save_index(const DtwIndex& index, const std::string& path);
DtwIndex load_index(const std::string& path);

class DtwIndex {
public:
    const IndexConfig& config() const { return config_; }
    std::size_t lmax() const { return lmax_; }
    std::size_t size() const { return store_.size(); }
    const RTreeNode& root() const { return root_; }
    const std::vector<TimeSeries>& sequences() const { return store_; }
    const std::vector<PaaVector>& paa_vectors() const { return paa_; }
    const TimeSeries& sequence(std::uint64_t id) const;
    const PaaVector& paa(std::uint64_t id) const;

    /**
     * Exact epsilon-range search: descends the tree pruning subtrees whose
     * box bound exceeds epsilon, prunes leaf entries by the PAA bound, and
     * answers the survivors with band-constrained DTW on the original
     * sequences. Matches are sorted by distance, then id. Every comparison
     * is inclusive. The match set always equals linear_scan's.
     */
    RangeResult range_search(const TimeSeries& q, double epsilon) const;

private:
    DtwIndex(IndexConfig config, std::size_t lmax,
             std::vector<TimeSeries> store, std::vector<PaaVector> paa,
             RTreeNode root);

    friend DtwIndex build_index(const std::vector<TimeSeries>&,
                                const IndexConfig&,
                                std::vector<std::string>*);
    friend DtwIndex load_index(const std::string&);

    IndexConfig config_;
    std::size_t lmax_ = 0;
    std::vector<TimeSeries> store_;
    std::vector<PaaVector> paa_;
    std::unordered_map<std::uint64_t, std::size_t> by_id_;
    RTreeNode root_;
};

/// Index file problems, split by cause so callers can react precisely.
class IndexIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class VersionError : public IndexIoError {
public:
    using IndexIoError::IndexIoError;
};

class ChecksumError : public IndexIoError {
public:
    using IndexIoError::IndexIoError;
};

class TruncatedError : public IndexIoError {
public:
    using IndexIoError::IndexIoError;
};

class CorruptError : public IndexIoError {
public:
    using IndexIoError::IndexIoError;
};

}  // namespace dtwidx
