#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dtwidx/ingest.hpp"

namespace dtwidx {

enum class LowerBound { keogh_plus, yi, kim, paa };

std::string_view to_string(LowerBound bound);
std::optional<LowerBound> lower_bound_from_string(std::string_view name);

/**
 * Ratio of a lower bound to the true distance, in [0, 1]. The 0/0 case is
 * defined as 1: a zero distance forces a zero bound, which is perfectly
 * tight. A ratio beyond 1 + 1e-9 means the bound is not a lower bound at
 * all and raises std::logic_error rather than being clamped.
 */
double tightness(double lb_value, double dtw_value);

struct TightnessStats {
    LowerBound bound = LowerBound::keogh_plus;
    std::vector<double> ratios;
    double mean = 0.0;
    std::size_t count = 0;
    std::size_t infeasible_excluded = 0;
};

struct PruningStats {
    LowerBound bound = LowerBound::keogh_plus;
    std::size_t s_total = 0;
    std::size_t s_pruned = 0;

    double power() const {
        return s_total == 0
                   ? 0.0
                   : static_cast<double>(s_pruned) / static_cast<double>(s_total);
    }
};

struct SweepConfig {
    std::size_t query_count = 100;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    std::size_t band_radius = 0;
    std::size_t n_paa = 16;
    std::optional<std::size_t> lmax;
    double pad_value = 0.0;

    std::vector<LowerBound> bounds = {LowerBound::keogh_plus, LowerBound::yi,
                                      LowerBound::kim, LowerBound::paa};
    std::vector<double> epsilon_grid;
    std::vector<std::size_t> n_paa_grid;
    std::vector<std::size_t> r_grid;
    std::vector<std::size_t> lmax_grid;
};

/**
 * Draws query_count queries from the dataset (without replacement, by
 * seed), then averages tightness over every query-candidate pair. The query
 * itself is excluded from its candidate set; pairs whose DTW is infeasible
 * are excluded and counted. Deterministic per seed, threads included.
 */
TightnessStats measure_tightness(const Dataset& ds, LowerBound bound,
                                 const SweepConfig& cfg);

/// Per query: counts candidates whose bound value exceeds epsilon, out of
/// the full dataset. Aggregated over the drawn queries.
PruningStats measure_pruning(const Dataset& ds, LowerBound bound,
                             double epsilon, const SweepConfig& cfg);

enum class SweepKind { epsilon, n_paa, band_radius, lmax };

struct ResultRow {
    std::string dataset;
    std::uint64_t seed = 0;
    std::size_t r = 0;
    std::size_t n_paa = 0;
    std::size_t lmax = 0;
    double pad_value = 0.0;
    double epsilon = 0.0;
    std::string bound;
    std::string metric;
    double value = 0.0;

    bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
    std::uint64_t seed = 0;
    std::uint64_t params_hash = 0;
    std::vector<ResultRow> rows;
};

/// Fingerprint of a sweep configuration, embedded in emitted files.
std::uint64_t hash_params(const SweepConfig& cfg, std::string_view dataset);

/**
 * Runs one parameter sweep and returns a row per grid point and bound:
 * epsilon sweeps report pruning power, n_paa and band_radius sweeps report
 * mean tightness, lmax sweeps report mean DTW between extended pairs plus
 * the PAA tightness at each extension length.
 */
ResultTable run_sweep(SweepKind kind, const Dataset& ds,
                      const SweepConfig& cfg);

enum class ResultFormat { csv, jsonl };

/// Writes the table with a metadata line first (seed, parameter hash);
/// floats carry 17 significant digits so parsing returns identical values.
void emit_results(const ResultTable& table, const std::string& path,
                  ResultFormat format);

ResultTable parse_results(const std::string& path, ResultFormat format);

}  // namespace dtwidx
