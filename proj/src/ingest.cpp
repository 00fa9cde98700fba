#include "dtwidx/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string_view>

namespace dtwidx {

std::size_t Dataset::max_length() const {
    std::size_t best = 0;
    for (const auto& s : sequences) best = std::max(best, s.length());
    return best;
}

std::size_t Dataset::min_length() const {
    std::size_t best = sequences.empty() ? 0 : sequences.front().length();
    for (const auto& s : sequences) best = std::min(best, s.length());
    return best;
}

ParseError::ParseError(std::string message, std::size_t line,
                       std::size_t column)
    : std::runtime_error(std::move(message)), line_(line), column_(column) {}

namespace {

bool is_delim(char ch) {
    return ch == '\t' || ch == ',' || ch == ' ';
}

struct Field {
    std::string_view text;
    std::size_t column;
};

std::vector<Field> split_fields(std::string_view line) {
    std::vector<Field> fields;
    std::size_t at = 0;
    while (at < line.size()) {
        while (at < line.size() && is_delim(line[at])) ++at;
        if (at == line.size()) break;
        const std::size_t start = at;
        while (at < line.size() && !is_delim(line[at])) ++at;
        fields.push_back(Field{line.substr(start, at - start), start + 1});
    }
    return fields;
}

double parse_sample(const Field& field, std::size_t line_no) {
    double value = 0.0;
    const char* first = field.text.data();
    const char* last = first + field.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        std::ostringstream msg;
        msg << "malformed number '" << field.text << "' at line " << line_no
            << ", column " << field.column;
        throw ParseError(msg.str(), line_no, field.column);
    }
    return value;
}

}  // namespace

Dataset load_ucr(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }
    Dataset ds;
    ds.name = path;
    const std::size_t slash = path.find_last_of('/');
    if (slash != std::string::npos) ds.name = path.substr(slash + 1);
    const std::size_t dot = ds.name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) ds.name = ds.name.substr(0, dot);

    std::string line;
    std::size_t line_no = 0;
    std::uint64_t next_id = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto fields = split_fields(line);
        if (fields.empty()) {
            std::ostringstream msg;
            msg << "skipping empty line " << line_no << " in " << path;
            if (warnings) {
                warnings->push_back(msg.str());
            } else {
                std::cerr << msg.str() << "\n";
            }
            continue;
        }
        if (fields.size() < 2) {
            std::ostringstream msg;
            msg << "line " << line_no << " has a label but no samples";
            throw ParseError(msg.str(), line_no, fields.front().column);
        }
        TimeSeries seq;
        seq.id = next_id++;
        seq.label = std::string(fields.front().text);
        seq.values.reserve(fields.size() - 1);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            seq.values.push_back(parse_sample(fields[k], line_no));
        }
        validate_series(seq);
        ds.sequences.push_back(std::move(seq));
    }
    if (ds.sequences.empty()) {
        throw std::runtime_error("dataset file has no sequences: " + path);
    }
    return ds;
}

void write_ucr(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write dataset file: " + path);
    }
    char buf[64];
    for (const auto& seq : ds.sequences) {
        out << seq.label;
        for (double v : seq.values) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

Dataset truncate_random(const Dataset& ds, const TruncationSpec& spec) {
    const std::size_t r = spec.band_radius;
    if (ds.sequences.empty()) {
        throw std::invalid_argument("cannot truncate an empty dataset");
    }
    if (r >= ds.min_length()) {
        throw std::invalid_argument(
            "truncation budget must be smaller than the shortest sequence");
    }
    std::mt19937_64 rng(spec.seed);
    Dataset out;
    out.name = ds.name;
    out.sequences.reserve(ds.size());
    for (const auto& seq : ds.sequences) {
        const std::size_t cut = static_cast<std::size_t>(rng() % (r + 1));
        TimeSeries trimmed = seq;
        trimmed.values.resize(seq.length() - cut);
        out.sequences.push_back(std::move(trimmed));
    }
    if (out.max_length() - out.min_length() > r) {
        throw std::invalid_argument(
            "truncated lengths spread wider than the band radius; "
            "the input lengths are too uneven");
    }
    return out;
}

std::size_t choose_lmax_for_length(std::size_t max_length, std::size_t n_paa) {
    if (n_paa == 0) {
        throw std::invalid_argument("n_paa must be positive");
    }
    return (max_length / n_paa + 1) * n_paa;
}

std::size_t choose_lmax(const Dataset& ds, std::size_t n_paa) {
    return choose_lmax_for_length(ds.max_length(), n_paa);
}

std::size_t default_band_radius(const Dataset& ds) {
    return std::max<std::size_t>(1, (ds.max_length() + 5) / 10);
}

}  // namespace dtwidx
