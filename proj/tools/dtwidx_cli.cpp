#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtwidx/bench.hpp"
#include "dtwidx/hash.hpp"
#include "dtwidx/index.hpp"
#include "dtwidx/ingest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonFlags {
    std::string input;
    std::int64_t r = -1;
    double r_frac = 0.10;
    std::size_t n_paa = 16;
    std::string lmax = "auto";
    double pad = 0.0;
    std::optional<std::uint64_t> truncate_seed;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--input", flags.input, "UCR-layout dataset file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--r", flags.r, "band radius (overrides --r-frac)");
    cmd->add_option("--r-frac", flags.r_frac,
                    "band radius as a fraction of the longest sequence");
    cmd->add_option("--paa", flags.n_paa, "PAA segment count");
    cmd->add_option("--lmax", flags.lmax,
                    "extension length, or 'auto' to derive it");
    cmd->add_option("--pad", flags.pad, "padding constant for extension");
    cmd->add_option("--truncate-seed", flags.truncate_seed,
                    "apply the random-truncation protocol with this seed");
}

std::size_t resolve_radius(const CommonFlags& flags, std::size_t max_length) {
    if (flags.r >= 0) return static_cast<std::size_t>(flags.r);
    if (!(flags.r_frac > 0.0) || flags.r_frac > 1.0) {
        throw std::invalid_argument("--r-frac must be in (0, 1]");
    }
    const double raw = flags.r_frac * static_cast<double>(max_length);
    const auto rounded = static_cast<std::size_t>(std::floor(raw + 0.5));
    return std::max<std::size_t>(1, rounded);
}

std::optional<std::size_t> resolve_lmax_flag(const CommonFlags& flags) {
    if (flags.lmax == "auto") return std::nullopt;
    std::size_t value = 0;
    const char* first = flags.lmax.data();
    const char* last = first + flags.lmax.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || value == 0) {
        throw std::invalid_argument("--lmax expects a positive integer or 'auto'");
    }
    return value;
}

struct PreparedData {
    dtwidx::Dataset ds;
    std::size_t band_radius = 0;
    std::size_t original_max_length = 0;
};

PreparedData prepare_dataset(const CommonFlags& flags) {
    PreparedData out;
    out.ds = dtwidx::load_ucr(flags.input);
    out.original_max_length = out.ds.max_length();
    out.band_radius = resolve_radius(flags, out.original_max_length);
    if (flags.truncate_seed) {
        out.ds = dtwidx::truncate_random(
            out.ds, dtwidx::TruncationSpec{*flags.truncate_seed,
                                           out.band_radius});
    }
    return out;
}

void log_params(std::size_t r, std::size_t n_paa, std::size_t lmax,
                double pad, const std::string& seed_text) {
    std::cerr << "params: r=" << r << " n_paa=" << n_paa << " lmax=" << lmax
              << " e=" << format_double(pad) << " seed=" << seed_text << "\n";
}

// Query files hold either one UCR-style line (label first) or bare samples.
// A leading integer-looking token followed by more fields is read as a
// label; anything else is a sample.
dtwidx::TimeSeries load_query(const std::string& path,
                              const std::string& format) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open query file: " + path);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char ch : line) {
            if (ch != ' ' && ch != '\t' && ch != ',') blank = false;
        }
        if (!blank) break;
        line.clear();
    }
    if (line.empty()) {
        throw std::runtime_error("query file has no data: " + path);
    }

    std::vector<std::string> fields;
    std::size_t at = 0;
    const auto is_delim = [](char ch) {
        return ch == '\t' || ch == ',' || ch == ' ';
    };
    while (at < line.size()) {
        while (at < line.size() && is_delim(line[at])) ++at;
        if (at == line.size()) break;
        std::size_t start = at;
        while (at < line.size() && !is_delim(line[at])) ++at;
        fields.push_back(line.substr(start, at - start));
    }

    const auto parse_field = [&](const std::string& text) {
        double v = 0.0;
        const char* first = text.data();
        const char* last = first + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            throw dtwidx::ParseError("malformed number '" + text +
                                     "' in query file",
                                     line_no, 1);
        }
        return v;
    };

    bool labeled;
    if (format == "ucr") {
        labeled = true;
    } else if (format == "raw") {
        labeled = false;
    } else {
        const std::string& head = fields.front();
        const bool integral =
            head.find_first_not_of("-0123456789") == std::string::npos;
        labeled = integral && fields.size() >= 2;
    }

    dtwidx::TimeSeries q;
    std::size_t start = 0;
    if (labeled) {
        if (fields.size() < 2) {
            throw std::runtime_error("labeled query line has no samples");
        }
        q.label = fields.front();
        start = 1;
    }
    for (std::size_t k = start; k < fields.size(); ++k) {
        q.values.push_back(parse_field(fields[k]));
    }
    dtwidx::validate_series(q);
    return q;
}

std::vector<dtwidx::LowerBound> parse_bounds(
    const std::vector<std::string>& names) {
    std::vector<dtwidx::LowerBound> bounds;
    for (const auto& name : names) {
        const auto bound = dtwidx::lower_bound_from_string(name);
        if (!bound) {
            throw std::invalid_argument("unknown lower bound: " + name);
        }
        bounds.push_back(*bound);
    }
    return bounds;
}

dtwidx::ResultFormat parse_format(const std::string& name) {
    if (name == "csv") return dtwidx::ResultFormat::csv;
    if (name == "jsonl") return dtwidx::ResultFormat::jsonl;
    throw std::invalid_argument("unknown output format: " + name);
}

std::uint64_t ensure_seed(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int run_build(const CommonFlags& flags, const std::string& out_path,
              std::size_t node_cap) {
    const PreparedData data = prepare_dataset(flags);
    dtwidx::IndexConfig config;
    config.band_radius = data.band_radius;
    config.n_paa = flags.n_paa;
    config.pad_value = flags.pad;
    config.node_capacity = node_cap;
    const auto lmax_flag = resolve_lmax_flag(flags);
    config.lmax = lmax_flag
                      ? *lmax_flag
                      : dtwidx::choose_lmax_for_length(
                            data.original_max_length, flags.n_paa);
    if (*config.lmax % flags.n_paa != 0) {
        throw std::invalid_argument("--lmax must be divisible by --paa");
    }

    log_params(config.band_radius, config.n_paa, *config.lmax,
               config.pad_value,
               flags.truncate_seed ? std::to_string(*flags.truncate_seed)
                                   : "none");

    const dtwidx::DtwIndex index =
        dtwidx::build_index(data.ds.sequences, config);
    dtwidx::save_index(index, out_path);
    std::cerr << "index written: " << out_path << " entries=" << index.size()
              << "\n";
    return kExitOk;
}

int run_query(const std::string& index_path, const std::string& query_path,
              const std::string& query_format, double epsilon, bool verify) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("--epsilon must be nonnegative");
    }
    const dtwidx::DtwIndex index = dtwidx::load_index(index_path);
    log_params(index.config().band_radius, index.config().n_paa, index.lmax(),
               index.config().pad_value, "none");

    const dtwidx::TimeSeries q = load_query(query_path, query_format);
    const dtwidx::RangeResult result = index.range_search(q, epsilon);
    for (const auto& match : result.matches) {
        std::cout << match.id << '\t' << format_double(match.distance) << "\n";
    }
    const auto& s = result.stats;
    std::cerr << "stats: matches=" << result.matches.size()
              << " node_visits=" << s.node_visits
              << " mbr_evals=" << s.mbr_evaluations
              << " paa_evals=" << s.paa_evaluations
              << " dtw_evals=" << s.dtw_evaluations
              << " pruned_mbr=" << s.pruned_by_mbr
              << " pruned_paa=" << s.pruned_by_paa
              << " infeasible=" << s.infeasible_excluded << "\n";

    if (verify) {
        const dtwidx::RangeResult oracle = dtwidx::linear_scan(
            index.sequences(), q, epsilon, index.config().band_radius);
        if (oracle.matches != result.matches) {
            std::cerr << "verification failed: index disagrees with linear scan"
                      << "\n";
            return kExitInternal;
        }
        std::cerr << "verified against linear scan: ok\n";
    }
    return kExitOk;
}

struct BenchFlags {
    CommonFlags common;
    std::size_t queries = 100;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    std::vector<std::string> bound_names = {"keogh_plus", "yi", "kim", "paa"};
    std::string format = "csv";
    std::string out_path;
};

void add_bench_flags(CLI::App* cmd, BenchFlags& flags) {
    add_common_flags(cmd, flags.common);
    cmd->add_option("--queries", flags.queries, "queries drawn per run");
    cmd->add_option("--seed", flags.seed, "RNG seed (generated when absent)");
    cmd->add_option("--threads", flags.threads, "worker threads");
    cmd->add_option("--bounds", flags.bound_names, "lower bounds to measure")
        ->delimiter(',');
    cmd->add_option("--format", flags.format, "output format: csv or jsonl");
    cmd->add_option("--out", flags.out_path, "result file path")->required();
}

dtwidx::SweepConfig make_sweep_config(const BenchFlags& flags,
                                      const PreparedData& data,
                                      std::uint64_t seed) {
    dtwidx::SweepConfig cfg;
    cfg.query_count = flags.queries;
    cfg.seed = seed;
    cfg.threads = flags.threads;
    cfg.band_radius = data.band_radius;
    cfg.n_paa = flags.common.n_paa;
    cfg.lmax = resolve_lmax_flag(flags.common);
    cfg.pad_value = flags.common.pad;
    cfg.bounds = parse_bounds(flags.bound_names);
    return cfg;
}

std::size_t display_lmax(const dtwidx::SweepConfig& cfg,
                         const dtwidx::Dataset& ds) {
    return cfg.lmax ? *cfg.lmax
                    : dtwidx::choose_lmax_for_length(ds.max_length(),
                                                     cfg.n_paa);
}

int run_bench_tightness(const BenchFlags& flags) {
    const PreparedData data = prepare_dataset(flags.common);
    const std::uint64_t seed = ensure_seed(flags.seed);
    const dtwidx::SweepConfig cfg = make_sweep_config(flags, data, seed);
    const std::size_t lmax = display_lmax(cfg, data.ds);
    log_params(cfg.band_radius, cfg.n_paa, lmax, cfg.pad_value,
               std::to_string(seed));

    dtwidx::ResultTable table;
    table.seed = seed;
    table.params_hash = dtwidx::hash_params(cfg, data.ds.name);
    for (const auto bound : cfg.bounds) {
        const dtwidx::TightnessStats stats =
            dtwidx::measure_tightness(data.ds, bound, cfg);
        std::cerr << "tightness " << dtwidx::to_string(bound) << ": mean="
                  << format_double(stats.mean) << " pairs=" << stats.count
                  << " infeasible=" << stats.infeasible_excluded << "\n";
        dtwidx::ResultRow row;
        row.dataset = data.ds.name;
        row.seed = seed;
        row.r = cfg.band_radius;
        row.n_paa = cfg.n_paa;
        row.lmax = lmax;
        row.pad_value = cfg.pad_value;
        row.bound = std::string(dtwidx::to_string(bound));
        row.metric = "mean_tightness";
        row.value = stats.mean;
        table.rows.push_back(std::move(row));
    }
    dtwidx::emit_results(table, flags.out_path, parse_format(flags.format));
    return kExitOk;
}

int run_bench_pruning(const BenchFlags& flags, double epsilon) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("--epsilon must be nonnegative");
    }
    const PreparedData data = prepare_dataset(flags.common);
    const std::uint64_t seed = ensure_seed(flags.seed);
    const dtwidx::SweepConfig cfg = make_sweep_config(flags, data, seed);
    const std::size_t lmax = display_lmax(cfg, data.ds);
    log_params(cfg.band_radius, cfg.n_paa, lmax, cfg.pad_value,
               std::to_string(seed));

    dtwidx::ResultTable table;
    table.seed = seed;
    table.params_hash = dtwidx::hash_params(cfg, data.ds.name);
    for (const auto bound : cfg.bounds) {
        const dtwidx::PruningStats stats =
            dtwidx::measure_pruning(data.ds, bound, epsilon, cfg);
        std::cerr << "pruning " << dtwidx::to_string(bound) << ": power="
                  << format_double(stats.power()) << " pruned="
                  << stats.s_pruned << "/" << stats.s_total << "\n";
        dtwidx::ResultRow row;
        row.dataset = data.ds.name;
        row.seed = seed;
        row.r = cfg.band_radius;
        row.n_paa = cfg.n_paa;
        row.lmax = lmax;
        row.pad_value = cfg.pad_value;
        row.epsilon = epsilon;
        row.bound = std::string(dtwidx::to_string(bound));
        row.metric = "pruning_power";
        row.value = stats.power();
        table.rows.push_back(std::move(row));
    }
    dtwidx::emit_results(table, flags.out_path, parse_format(flags.format));
    return kExitOk;
}

int run_bench_sweep(const BenchFlags& flags, const std::string& kind_name,
                    const std::vector<double>& eps_grid,
                    const std::vector<std::size_t>& n_paa_grid,
                    const std::vector<std::size_t>& r_grid,
                    const std::vector<std::size_t>& lmax_grid) {
    dtwidx::SweepKind kind;
    if (kind_name == "epsilon") {
        kind = dtwidx::SweepKind::epsilon;
    } else if (kind_name == "n_paa") {
        kind = dtwidx::SweepKind::n_paa;
    } else if (kind_name == "r") {
        kind = dtwidx::SweepKind::band_radius;
    } else if (kind_name == "lmax") {
        kind = dtwidx::SweepKind::lmax;
    } else {
        throw std::invalid_argument("unknown sweep kind: " + kind_name);
    }
    const PreparedData data = prepare_dataset(flags.common);
    const std::uint64_t seed = ensure_seed(flags.seed);
    dtwidx::SweepConfig cfg = make_sweep_config(flags, data, seed);
    cfg.epsilon_grid = eps_grid;
    cfg.n_paa_grid = n_paa_grid;
    cfg.r_grid = r_grid;
    cfg.lmax_grid = lmax_grid;
    log_params(cfg.band_radius, cfg.n_paa, display_lmax(cfg, data.ds),
               cfg.pad_value, std::to_string(seed));

    const dtwidx::ResultTable table = dtwidx::run_sweep(kind, data.ds, cfg);
    dtwidx::emit_results(table, flags.out_path, parse_format(flags.format));
    std::cerr << "sweep rows: " << table.rows.size() << "\n";
    return kExitOk;
}

template <typename Body>
int guarded(Body&& body) {
    try {
        return body();
    } catch (const dtwidx::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const dtwidx::IndexIoError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-series similarity search under band-constrained DTW"};
    app.require_subcommand(1);

    CommonFlags build_flags;
    std::string build_out;
    std::size_t node_cap = 16;
    CLI::App* build = app.add_subcommand("build", "build an index file");
    add_common_flags(build, build_flags);
    build->add_option("--out", build_out, "index file path")->required();
    build->add_option("--node-cap", node_cap, "R-tree node capacity");

    std::string query_index, query_path, query_format = "auto";
    double query_epsilon = 0.0;
    bool query_verify = false;
    CLI::App* query = app.add_subcommand("query", "run an epsilon-range search");
    query->add_option("--index", query_index, "index file path")
        ->required()
        ->check(CLI::ExistingFile);
    query->add_option("--query", query_path, "query sequence file")
        ->required()
        ->check(CLI::ExistingFile);
    query->add_option("--epsilon", query_epsilon, "search radius")->required();
    query->add_option("--query-format", query_format,
                      "query layout: ucr, raw, or auto");
    query->add_flag("--verify", query_verify,
                    "cross-check the result against a linear scan");

    CLI::App* bench = app.add_subcommand("bench", "benchmark lower bounds");
    bench->require_subcommand(1);

    BenchFlags tightness_flags;
    CLI::App* tightness =
        bench->add_subcommand("tightness", "mean lower-bound tightness");
    add_bench_flags(tightness, tightness_flags);

    BenchFlags pruning_flags;
    double pruning_epsilon = 0.0;
    CLI::App* pruning =
        bench->add_subcommand("pruning", "pruning power at one epsilon");
    add_bench_flags(pruning, pruning_flags);
    pruning->add_option("--epsilon", pruning_epsilon, "search radius")
        ->required();

    BenchFlags sweep_flags;
    std::string sweep_kind;
    std::vector<double> eps_grid;
    std::vector<std::size_t> n_paa_grid, r_grid, lmax_grid;
    CLI::App* sweep = bench->add_subcommand("sweep", "parameter sweeps");
    add_bench_flags(sweep, sweep_flags);
    sweep->add_option("--kind", sweep_kind, "epsilon, n_paa, r, or lmax")
        ->required();
    sweep->add_option("--eps-grid", eps_grid, "epsilon grid")->delimiter(',');
    sweep->add_option("--n-paa-grid", n_paa_grid, "PAA segment grid")
        ->delimiter(',');
    sweep->add_option("--r-grid", r_grid, "band radius grid")->delimiter(',');
    sweep->add_option("--lmax-grid", lmax_grid, "extension length grid")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*build) {
        return guarded([&] { return run_build(build_flags, build_out, node_cap); });
    }
    if (*query) {
        return guarded([&] {
            return run_query(query_index, query_path, query_format,
                             query_epsilon, query_verify);
        });
    }
    if (*tightness) {
        return guarded([&] { return run_bench_tightness(tightness_flags); });
    }
    if (*pruning) {
        return guarded(
            [&] { return run_bench_pruning(pruning_flags, pruning_epsilon); });
    }
    if (*sweep) {
        return guarded([&] {
            return run_bench_sweep(sweep_flags, sweep_kind, eps_grid,
                                   n_paa_grid, r_grid, lmax_grid);
        });
    }
    return kExitUsage;
}
