#include "dtwidx/index.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "dtwidx/dtw.hpp"
#include "dtwidx/ingest.hpp"
#include "dtwidx/lower_bounds.hpp"

namespace dtwidx {

DtwIndex::DtwIndex(IndexConfig config, std::size_t lmax,
                   std::vector<TimeSeries> store, std::vector<PaaVector> paa,
                   RTreeNode root)
    : config_(std::move(config)),
      lmax_(lmax),
      store_(std::move(store)),
      paa_(std::move(paa)),
      root_(std::move(root)) {
    by_id_.reserve(store_.size());
    for (std::size_t i = 0; i < store_.size(); ++i) {
        const auto [it, inserted] = by_id_.emplace(store_[i].id, i);
        if (!inserted) {
            throw std::invalid_argument("duplicate sequence id in index");
        }
    }
}

const TimeSeries& DtwIndex::sequence(std::uint64_t id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        throw std::invalid_argument("unknown sequence id");
    }
    return store_[it->second];
}

const PaaVector& DtwIndex::paa(std::uint64_t id) const {
    const auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        throw std::invalid_argument("unknown sequence id");
    }
    return paa_[it->second];
}

DtwIndex build_index(const std::vector<TimeSeries>& dataset,
                     const IndexConfig& config,
                     std::vector<std::string>* warnings) {
    if (dataset.empty()) {
        throw std::invalid_argument("cannot index an empty dataset");
    }
    if (config.n_paa < 1) {
        throw std::invalid_argument("n_paa must be at least 1");
    }
    if (config.node_capacity < 2) {
        throw std::invalid_argument("node capacity must be at least 2");
    }
    std::size_t max_len = 0;
    std::size_t min_len = dataset.front().length();
    for (const auto& seq : dataset) {
        validate_series(seq);
        max_len = std::max(max_len, seq.length());
        min_len = std::min(min_len, seq.length());
    }
    std::size_t lmax;
    if (config.lmax) {
        lmax = *config.lmax;
        if (lmax <= max_len) {
            throw std::invalid_argument(
                "explicit lmax must exceed every sequence length");
        }
        if (lmax % config.n_paa != 0) {
            throw std::invalid_argument(
                "explicit lmax must be divisible by n_paa");
        }
    } else {
        lmax = choose_lmax_for_length(max_len, config.n_paa);
    }
    if (max_len - min_len > 2 * config.band_radius) {
        std::ostringstream msg;
        msg << "length spread " << (max_len - min_len) << " exceeds twice the"
            << " band radius " << config.band_radius
            << "; no single query can reach every entry";
        if (warnings) {
            warnings->push_back(msg.str());
        } else {
            std::cerr << "warning: " << msg.str() << "\n";
        }
    }

    const ExtensionParams params{lmax, config.pad_value};
    std::vector<TimeSeries> store = dataset;
    std::vector<PaaVector> paa;
    paa.reserve(store.size());
    for (const auto& seq : store) {
        paa.push_back(paa_transform(extend(seq, params), config.n_paa));
    }
    std::vector<std::pair<std::uint64_t, const PaaVector*>> items;
    items.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        items.emplace_back(store[i].id, &paa[i]);
    }
    RTreeNode root = build_rtree(items, config.node_capacity);

    IndexConfig resolved = config;
    resolved.lmax = lmax;
    return DtwIndex(std::move(resolved), lmax, std::move(store),
                    std::move(paa), std::move(root));
}

namespace {

struct SearchContext {
    const DtwIndex& index;
    const TimeSeries& query;
    const Envelope& env_ext;
    const PaaEnvelope& penv;
    double epsilon;
    RangeResult& out;
};

void test_candidate(SearchContext& ctx, std::uint64_t id) {
    const DtwIndex& index = ctx.index;
    SearchStats& stats = ctx.out.stats;

    stats.paa_evaluations += 1;
    if (lb_paa(ctx.penv, index.paa(id)) > ctx.epsilon) {
        stats.pruned_by_paa += 1;
        return;
    }
    const TimeSeries& candidate = index.sequence(id);
    if (index.config().keogh_filter) {
        stats.keogh_evaluations += 1;
        const ExtensionParams params{index.lmax(), index.config().pad_value};
        const double lb = lb_keogh(ctx.env_ext, extend(candidate, params));
        if (lb > ctx.epsilon) {
            stats.pruned_by_keogh += 1;
            return;
        }
    }
    stats.dtw_evaluations += 1;
    const auto d = dtw(ctx.query, candidate,
                       BandConstraint::banded(index.config().band_radius));
    if (!d) {
        stats.infeasible_excluded += 1;
        return;
    }
    if (*d <= ctx.epsilon) {
        ctx.out.matches.push_back(Match{id, *d});
    }
}

void visit(SearchContext& ctx, const RTreeNode& node) {
    ctx.out.stats.node_visits += 1;
    if (node.is_leaf()) {
        for (std::uint64_t id : node.entries) {
            test_candidate(ctx, id);
        }
        return;
    }
    for (const RTreeNode& child : node.children) {
        ctx.out.stats.mbr_evaluations += 1;
        if (lb_mbr(ctx.penv, child.box) > ctx.epsilon) {
            ctx.out.stats.pruned_by_mbr += child.subtree_size;
            continue;
        }
        visit(ctx, child);
    }
}

void sort_matches(std::vector<Match>& matches) {
    std::sort(matches.begin(), matches.end(),
              [](const Match& a, const Match& b) {
                  if (a.distance != b.distance) return a.distance < b.distance;
                  return a.id < b.id;
              });
}

}  // namespace

RangeResult DtwIndex::range_search(const TimeSeries& q, double epsilon) const {
    validate_series(q);
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be nonnegative");
    }
    if (q.length() >= lmax_) {
        throw std::invalid_argument(
            "query is too long for this index's extension length");
    }

    const ExtensionParams params{lmax_, config_.pad_value};
    const TimeSeries q_ext = extend(q, params);
    const Envelope env_ext = envelope(q_ext, config_.band_radius);
    const PaaEnvelope penv = paa_envelope(env_ext, config_.n_paa);

    RangeResult result;
    SearchContext ctx{*this, q, env_ext, penv, epsilon, result};
    result.stats.mbr_evaluations += 1;
    if (lb_mbr(penv, root_.box) > epsilon) {
        result.stats.pruned_by_mbr += root_.subtree_size;
    } else {
        visit(ctx, root_);
    }
    sort_matches(result.matches);
    return result;
}

RangeResult linear_scan(const std::vector<TimeSeries>& dataset,
                        const TimeSeries& q, double epsilon,
                        std::size_t band_radius) {
    validate_series(q);
    if (epsilon < 0.0) {
        throw std::invalid_argument("epsilon must be nonnegative");
    }
    RangeResult result;
    const BandConstraint band = BandConstraint::banded(band_radius);
    for (const auto& candidate : dataset) {
        result.stats.dtw_evaluations += 1;
        const auto d = dtw(q, candidate, band);
        if (!d) {
            result.stats.infeasible_excluded += 1;
            continue;
        }
        if (*d <= epsilon) {
            result.matches.push_back(Match{candidate.id, *d});
        }
    }
    sort_matches(result.matches);
    return result;
}

}  // namespace dtwidx
