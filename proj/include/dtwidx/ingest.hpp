#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dtwidx/series.hpp"

namespace dtwidx {

struct Dataset {
    std::vector<TimeSeries> sequences;
    std::string name;

    std::size_t size() const { return sequences.size(); }
    std::size_t max_length() const;
    std::size_t min_length() const;
};

/// Malformed numeric field, with 1-based line and column of the offender.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line, std::size_t column);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/**
 * Reads a UCR-layout text file: one sequence per line, the first field is
 * the class label, the rest are samples. Fields are separated by tabs,
 * commas or spaces. Numbers are parsed strictly; scientific notation is
 * accepted. Empty lines are skipped with a warning (collected into
 * `warnings` when given, otherwise written to stderr). Ids follow line
 * order.
 */
Dataset load_ucr(const std::string& path,
                 std::vector<std::string>* warnings = nullptr);

/// Writes a dataset back in UCR layout with full float precision, so a
/// load/write/load cycle reproduces every sample bit for bit.
void write_ucr(const Dataset& ds, const std::string& path);

struct TruncationSpec {
    std::uint64_t seed = 0;
    std::size_t band_radius = 0;
};

/**
 * Cuts a random suffix from every sequence: the kept length is drawn
 * uniformly from [original - r, original], deterministically per seed.
 * Rejects r >= the shortest sequence length. The result is verified to
 * keep every pair of lengths within r of each other.
 */
Dataset truncate_random(const Dataset& ds, const TruncationSpec& spec);

/// Smallest multiple of n_paa strictly greater than max_length.
std::size_t choose_lmax_for_length(std::size_t max_length, std::size_t n_paa);
std::size_t choose_lmax(const Dataset& ds, std::size_t n_paa);

/// 10% of the longest original length, rounded half up, never below 1.
std::size_t default_band_radius(const Dataset& ds);

}  // namespace dtwidx
