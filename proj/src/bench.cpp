#include "dtwidx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dtwidx/dtw.hpp"
#include "dtwidx/hash.hpp"
#include "dtwidx/lower_bounds.hpp"
#include "dtwidx/paa.hpp"

namespace dtwidx {

std::string_view to_string(LowerBound bound) {
    switch (bound) {
        case LowerBound::keogh_plus:
            return "keogh_plus";
        case LowerBound::yi:
            return "yi";
        case LowerBound::kim:
            return "kim";
        case LowerBound::paa:
            return "paa";
    }
    return "unknown";
}

std::optional<LowerBound> lower_bound_from_string(std::string_view name) {
    if (name == "keogh_plus") return LowerBound::keogh_plus;
    if (name == "yi") return LowerBound::yi;
    if (name == "kim") return LowerBound::kim;
    if (name == "paa") return LowerBound::paa;
    return std::nullopt;
}

double tightness(double lb_value, double dtw_value) {
    if (!std::isfinite(lb_value) || lb_value < 0.0) {
        throw std::invalid_argument("lower bound value must be finite and >= 0");
    }
    if (!std::isfinite(dtw_value) || dtw_value < 0.0) {
        throw std::invalid_argument("distance value must be finite and >= 0");
    }
    if (dtw_value == 0.0) {
        if (lb_value == 0.0) return 1.0;
        throw std::logic_error("lower bound exceeds a zero distance");
    }
    const double ratio = lb_value / dtw_value;
    if (ratio > 1.0 + 1e-9) {
        throw std::logic_error("lower bound exceeds the distance it bounds");
    }
    return ratio;
}

namespace {

struct ResolvedParams {
    std::size_t r = 0;
    std::size_t n_paa = 0;
    std::size_t lmax = 0;
    double pad = 0.0;
};

ResolvedParams resolve(const Dataset& ds, const SweepConfig& cfg) {
    if (ds.sequences.empty()) {
        throw std::invalid_argument("benchmark dataset is empty");
    }
    if (cfg.n_paa == 0) {
        throw std::invalid_argument("n_paa must be positive");
    }
    if (cfg.query_count == 0) {
        throw std::invalid_argument("query count must be positive");
    }
    ResolvedParams p;
    p.r = cfg.band_radius;
    p.n_paa = cfg.n_paa;
    p.pad = cfg.pad_value;
    if (cfg.lmax) {
        p.lmax = *cfg.lmax;
        if (p.lmax <= ds.max_length()) {
            throw std::invalid_argument(
                "lmax must exceed the longest sequence");
        }
        if (p.lmax % p.n_paa != 0) {
            throw std::invalid_argument("lmax must be divisible by n_paa");
        }
    } else {
        p.lmax = choose_lmax_for_length(ds.max_length(), p.n_paa);
    }
    return p;
}

// Partial Fisher-Yates with explicit modulo draws, so the selection depends
// only on the seed, not on library distribution internals.
std::vector<std::size_t> draw_queries(std::size_t n, std::size_t count,
                                      std::uint64_t seed) {
    count = std::min(count, n);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng() % (n - k));
        std::swap(pool[k], pool[j]);
    }
    pool.resize(count);
    return pool;
}

struct CandidateForms {
    std::vector<TimeSeries> extended;
    std::vector<PaaVector> cbars;
};

CandidateForms candidate_forms(const Dataset& ds, const ResolvedParams& p,
                               bool need_extended, bool need_paa) {
    CandidateForms forms;
    const ExtensionParams params{p.lmax, p.pad};
    if (need_extended || need_paa) {
        forms.extended.reserve(ds.size());
        for (const auto& seq : ds.sequences) {
            forms.extended.push_back(extend(seq, params));
        }
    }
    if (need_paa) {
        forms.cbars.reserve(ds.size());
        for (const auto& ext : forms.extended) {
            forms.cbars.push_back(paa_transform(ext, p.n_paa));
        }
    }
    return forms;
}

// Runs work(qi) for qi in [0, nq), possibly across threads. Each slot is
// written by exactly one invocation, so the caller's fixed-order reduction
// sees identical data no matter the thread count.
template <typename Work>
void parallel_queries(std::size_t nq, std::size_t threads, Work&& work) {
    threads = std::max<std::size_t>(1, std::min(threads, nq));
    if (threads == 1) {
        for (std::size_t qi = 0; qi < nq; ++qi) work(qi);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_lock;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t qi = next.fetch_add(1);
                if (qi >= nq) return;
                try {
                    work(qi);
                } catch (...) {
                    const std::scoped_lock hold(error_lock);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct QueryForms {
    Envelope env;
    PaaEnvelope penv;
};

QueryForms query_forms(const TimeSeries& q, LowerBound bound,
                       const ResolvedParams& p) {
    QueryForms forms;
    if (bound == LowerBound::keogh_plus || bound == LowerBound::paa) {
        forms.env = envelope(extend(q, ExtensionParams{p.lmax, p.pad}), p.r);
        if (bound == LowerBound::paa) {
            forms.penv = paa_envelope(forms.env, p.n_paa);
        }
    }
    return forms;
}

double bound_value(LowerBound bound, const TimeSeries& q,
                   const QueryForms& qf, const TimeSeries& c, std::size_t ci,
                   const CandidateForms& forms) {
    switch (bound) {
        case LowerBound::keogh_plus:
            return lb_keogh(qf.env, forms.extended[ci]);
        case LowerBound::paa:
            return lb_paa(qf.penv, forms.cbars[ci]);
        case LowerBound::yi:
            return lb_yi(q, c);
        case LowerBound::kim:
            return lb_kim(q, c);
    }
    throw std::logic_error("unhandled lower bound kind");
}

}  // namespace

TightnessStats measure_tightness(const Dataset& ds, LowerBound bound,
                                 const SweepConfig& cfg) {
    const ResolvedParams p = resolve(ds, cfg);
    const auto queries = draw_queries(ds.size(), cfg.query_count, cfg.seed);
    const CandidateForms forms = candidate_forms(
        ds, p, bound == LowerBound::keogh_plus || bound == LowerBound::paa,
        bound == LowerBound::paa);
    const BandConstraint band = BandConstraint::banded(p.r);

    std::vector<std::vector<double>> slots(queries.size());
    std::vector<std::size_t> infeasible(queries.size(), 0);
    parallel_queries(queries.size(), cfg.threads, [&](std::size_t qi) {
        const TimeSeries& q = ds.sequences[queries[qi]];
        const QueryForms qf = query_forms(q, bound, p);
        auto& ratios = slots[qi];
        ratios.reserve(ds.size() - 1);
        for (std::size_t ci = 0; ci < ds.size(); ++ci) {
            if (ci == queries[qi]) continue;
            const TimeSeries& c = ds.sequences[ci];
            const auto d = dtw(q, c, band);
            if (!d) {
                infeasible[qi] += 1;
                continue;
            }
            ratios.push_back(
                tightness(bound_value(bound, q, qf, c, ci, forms), *d));
        }
    });

    TightnessStats stats;
    stats.bound = bound;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        stats.infeasible_excluded += infeasible[qi];
        stats.ratios.insert(stats.ratios.end(), slots[qi].begin(),
                            slots[qi].end());
    }
    stats.count = stats.ratios.size();
    if (stats.count == 0) {
        throw std::invalid_argument(
            "no feasible query-candidate pairs to aggregate");
    }
    double sum = 0.0;
    for (double v : stats.ratios) sum += v;
    stats.mean = sum / static_cast<double>(stats.count);
    return stats;
}

PruningStats measure_pruning(const Dataset& ds, LowerBound bound,
                             double epsilon, const SweepConfig& cfg) {
    if (!(epsilon >= 0.0)) {
        throw std::invalid_argument("epsilon must be nonnegative");
    }
    const ResolvedParams p = resolve(ds, cfg);
    const auto queries = draw_queries(ds.size(), cfg.query_count, cfg.seed);
    const CandidateForms forms = candidate_forms(
        ds, p, bound == LowerBound::keogh_plus || bound == LowerBound::paa,
        bound == LowerBound::paa);

    std::vector<std::size_t> pruned(queries.size(), 0);
    parallel_queries(queries.size(), cfg.threads, [&](std::size_t qi) {
        const TimeSeries& q = ds.sequences[queries[qi]];
        const QueryForms qf = query_forms(q, bound, p);
        std::size_t hits = 0;
        for (std::size_t ci = 0; ci < ds.size(); ++ci) {
            if (bound_value(bound, q, qf, ds.sequences[ci], ci, forms) >
                epsilon) {
                hits += 1;
            }
        }
        pruned[qi] = hits;
    });

    PruningStats stats;
    stats.bound = bound;
    stats.s_total = queries.size() * ds.size();
    for (std::size_t hits : pruned) stats.s_pruned += hits;
    return stats;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_hash(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

// Mean banded DTW between extended pairs, same query protocol as the
// tightness measurements.
double mean_dtw_extended(const Dataset& ds, const SweepConfig& cfg) {
    const ResolvedParams p = resolve(ds, cfg);
    const auto queries = draw_queries(ds.size(), cfg.query_count, cfg.seed);
    const CandidateForms forms = candidate_forms(ds, p, true, false);
    const BandConstraint band = BandConstraint::banded(p.r);
    const ExtensionParams params{p.lmax, p.pad};

    std::vector<double> sums(queries.size(), 0.0);
    std::vector<std::size_t> counts(queries.size(), 0);
    parallel_queries(queries.size(), cfg.threads, [&](std::size_t qi) {
        const TimeSeries q_ext = extend(ds.sequences[queries[qi]], params);
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t ci = 0; ci < ds.size(); ++ci) {
            if (ci == queries[qi]) continue;
            const auto d = dtw(q_ext, forms.extended[ci], band);
            if (!d) continue;
            sum += *d;
            count += 1;
        }
        sums[qi] = sum;
        counts[qi] = count;
    });

    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        total += sums[qi];
        count += counts[qi];
    }
    if (count == 0) {
        throw std::invalid_argument("no pairs to aggregate");
    }
    return total / static_cast<double>(count);
}

}  // namespace

std::uint64_t hash_params(const SweepConfig& cfg, std::string_view dataset) {
    std::ostringstream out;
    out << "dataset=" << dataset << ";query_count=" << cfg.query_count
        << ";seed=" << cfg.seed << ";r=" << cfg.band_radius
        << ";n_paa=" << cfg.n_paa << ";lmax=";
    if (cfg.lmax) {
        out << *cfg.lmax;
    } else {
        out << "auto";
    }
    out << ";pad=" << format_double(cfg.pad_value) << ";bounds=";
    for (LowerBound b : cfg.bounds) out << to_string(b) << ",";
    out << ";eps_grid=";
    for (double v : cfg.epsilon_grid) out << format_double(v) << ",";
    out << ";n_paa_grid=";
    for (std::size_t v : cfg.n_paa_grid) out << v << ",";
    out << ";r_grid=";
    for (std::size_t v : cfg.r_grid) out << v << ",";
    out << ";lmax_grid=";
    for (std::size_t v : cfg.lmax_grid) out << v << ",";
    return fnv1a64(out.str());
}

ResultTable run_sweep(SweepKind kind, const Dataset& ds,
                      const SweepConfig& cfg) {
    ResultTable table;
    table.seed = cfg.seed;
    table.params_hash = hash_params(cfg, ds.name);

    const auto add_row = [&](std::size_t r, std::size_t n_paa,
                             std::size_t lmax, double epsilon,
                             std::string_view bound, std::string_view metric,
                             double value) {
        ResultRow row;
        row.dataset = ds.name;
        row.seed = cfg.seed;
        row.r = r;
        row.n_paa = n_paa;
        row.lmax = lmax;
        row.pad_value = cfg.pad_value;
        row.epsilon = epsilon;
        row.bound = std::string(bound);
        row.metric = std::string(metric);
        row.value = value;
        table.rows.push_back(std::move(row));
    };

    switch (kind) {
        case SweepKind::epsilon: {
            if (cfg.epsilon_grid.empty()) {
                throw std::invalid_argument("epsilon sweep needs a grid");
            }
            const ResolvedParams p = resolve(ds, cfg);
            for (double eps : cfg.epsilon_grid) {
                for (LowerBound bound : cfg.bounds) {
                    const PruningStats stats =
                        measure_pruning(ds, bound, eps, cfg);
                    add_row(p.r, p.n_paa, p.lmax, eps, to_string(bound),
                            "pruning_power", stats.power());
                }
            }
            break;
        }
        case SweepKind::n_paa: {
            if (cfg.n_paa_grid.empty()) {
                throw std::invalid_argument("n_paa sweep needs a grid");
            }
            std::size_t common = 1;
            for (std::size_t np : cfg.n_paa_grid) {
                if (np == 0) {
                    throw std::invalid_argument("n_paa grid values must be positive");
                }
                common = std::lcm(common, np);
            }
            const std::size_t lmax =
                cfg.lmax ? *cfg.lmax
                         : choose_lmax_for_length(ds.max_length(), common);
            for (std::size_t np : cfg.n_paa_grid) {
                SweepConfig point = cfg;
                point.n_paa = np;
                point.lmax = lmax;
                const TightnessStats stats =
                    measure_tightness(ds, LowerBound::paa, point);
                add_row(cfg.band_radius, np, lmax, 0.0, "paa",
                        "mean_tightness", stats.mean);
            }
            break;
        }
        case SweepKind::band_radius: {
            if (cfg.r_grid.empty()) {
                throw std::invalid_argument("band radius sweep needs a grid");
            }
            for (std::size_t r : cfg.r_grid) {
                SweepConfig point = cfg;
                point.band_radius = r;
                const ResolvedParams p = resolve(ds, point);
                for (LowerBound bound : cfg.bounds) {
                    const TightnessStats stats =
                        measure_tightness(ds, bound, point);
                    add_row(r, p.n_paa, p.lmax, 0.0, to_string(bound),
                            "mean_tightness", stats.mean);
                }
            }
            break;
        }
        case SweepKind::lmax: {
            if (cfg.lmax_grid.empty()) {
                throw std::invalid_argument("lmax sweep needs a grid");
            }
            for (std::size_t lmax : cfg.lmax_grid) {
                SweepConfig point = cfg;
                point.lmax = lmax;
                const ResolvedParams p = resolve(ds, point);
                add_row(p.r, p.n_paa, lmax, 0.0, "dtw", "mean_dtw_extended",
                        mean_dtw_extended(ds, point));
                const TightnessStats stats =
                    measure_tightness(ds, LowerBound::paa, point);
                add_row(p.r, p.n_paa, lmax, 0.0, "paa", "mean_tightness",
                        stats.mean);
            }
            break;
        }
    }
    return table;
}

namespace {

std::string escape_json(std::string_view text) {
    std::string out;
    out.reserve(text.size() + 2);
    for (char ch : text) {
        switch (ch) {
            case '"':
                out += "\\\"";
                break;
            case '\\':
                out += "\\\\";
                break;
            case '\n':
                out += "\\n";
                break;
            case '\t':
                out += "\\t";
                break;
            case '\r':
                out += "\\r";
                break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x",
                                  static_cast<unsigned>(ch));
                    out += buf;
                } else {
                    out.push_back(ch);
                }
        }
    }
    return out;
}

constexpr std::string_view kCsvHeader =
    "dataset,seed,r,n_paa,lmax,e,epsilon,bound,metric,value";

void emit_csv(const ResultTable& table, std::ostream& out) {
    out << "# seed=" << table.seed
        << " params_hash=" << format_hash(table.params_hash) << "\n";
    out << kCsvHeader << "\n";
    for (const auto& row : table.rows) {
        out << row.dataset << ',' << row.seed << ',' << row.r << ','
            << row.n_paa << ',' << row.lmax << ','
            << format_double(row.pad_value) << ','
            << format_double(row.epsilon) << ',' << row.bound << ','
            << row.metric << ',' << format_double(row.value) << "\n";
    }
}

void emit_jsonl(const ResultTable& table, std::ostream& out) {
    out << "{\"meta\":{\"seed\":" << table.seed << ",\"params_hash\":\""
        << format_hash(table.params_hash) << "\"}}\n";
    for (const auto& row : table.rows) {
        out << "{\"dataset\":\"" << escape_json(row.dataset)
            << "\",\"seed\":" << row.seed << ",\"r\":" << row.r
            << ",\"n_paa\":" << row.n_paa << ",\"lmax\":" << row.lmax
            << ",\"e\":" << format_double(row.pad_value)
            << ",\"epsilon\":" << format_double(row.epsilon)
            << ",\"bound\":\"" << escape_json(row.bound)
            << "\",\"metric\":\"" << escape_json(row.metric)
            << "\",\"value\":" << format_double(row.value) << "}\n";
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t at = 0;
    while (true) {
        const std::size_t comma = line.find(',', at);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(at));
            break;
        }
        fields.push_back(line.substr(at, comma - at));
        at = comma + 1;
    }
    return fields;
}

std::uint64_t parse_u64_field(const std::string& text) {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used, 10);
    if (used != text.size()) {
        throw std::runtime_error("malformed integer field: " + text);
    }
    return v;
}

double parse_double_field(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) {
        throw std::runtime_error("malformed float field: " + text);
    }
    return v;
}

ResultTable parse_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("result file is empty");
    }
    unsigned long long seed = 0;
    char hash_buf[32] = {0};
    if (std::sscanf(line.c_str(), "# seed=%llu params_hash=%31s", &seed,
                    hash_buf) != 2) {
        throw std::runtime_error("result file is missing its metadata line");
    }
    table.seed = seed;
    table.params_hash = std::stoull(hash_buf, nullptr, 16);
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("result file has an unexpected header");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 10) {
            throw std::runtime_error("result row has a wrong field count");
        }
        ResultRow row;
        row.dataset = fields[0];
        row.seed = parse_u64_field(fields[1]);
        row.r = static_cast<std::size_t>(parse_u64_field(fields[2]));
        row.n_paa = static_cast<std::size_t>(parse_u64_field(fields[3]));
        row.lmax = static_cast<std::size_t>(parse_u64_field(fields[4]));
        row.pad_value = parse_double_field(fields[5]);
        row.epsilon = parse_double_field(fields[6]);
        row.bound = fields[7];
        row.metric = fields[8];
        row.value = parse_double_field(fields[9]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable parse_jsonl(std::istream& in) {
    ResultTable table;
    std::string line;
    bool have_meta = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json doc = nlohmann::json::parse(line);
        if (!have_meta) {
            if (!doc.contains("meta")) {
                throw std::runtime_error(
                    "result file is missing its metadata record");
            }
            table.seed = doc["meta"]["seed"].get<std::uint64_t>();
            table.params_hash = std::stoull(
                doc["meta"]["params_hash"].get<std::string>(), nullptr, 16);
            have_meta = true;
            continue;
        }
        ResultRow row;
        row.dataset = doc["dataset"].get<std::string>();
        row.seed = doc["seed"].get<std::uint64_t>();
        row.r = doc["r"].get<std::size_t>();
        row.n_paa = doc["n_paa"].get<std::size_t>();
        row.lmax = doc["lmax"].get<std::size_t>();
        row.pad_value = doc["e"].get<double>();
        row.epsilon = doc["epsilon"].get<double>();
        row.bound = doc["bound"].get<std::string>();
        row.metric = doc["metric"].get<std::string>();
        row.value = doc["value"].get<double>();
        table.rows.push_back(std::move(row));
    }
    if (!have_meta) {
        throw std::runtime_error("result file is empty");
    }
    return table;
}

}  // namespace

void emit_results(const ResultTable& table, const std::string& path,
                  ResultFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open result file for writing: " +
                                 path);
    }
    if (format == ResultFormat::csv) {
        emit_csv(table, out);
    } else {
        emit_jsonl(table, out);
    }
    if (!out) {
        throw std::runtime_error("failed writing result file: " + path);
    }
}

ResultTable parse_results(const std::string& path, ResultFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open result file: " + path);
    }
    return format == ResultFormat::csv ? parse_csv(in) : parse_jsonl(in);
}

}  // namespace dtwidx
