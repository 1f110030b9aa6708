#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "closetest/distributions.hpp"

namespace closetest {

// Malformed input file; the message names the path and 1-based line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& message, std::int64_t line_number)
        : std::runtime_error(message), line(line_number) {}
    std::int64_t line;
};

// Value formatted with 12 significant digits (all numeric CLI/CSV output).
std::string format_sig(double value, int digits = 12);

// Distribution file: UTF-8 text, one probability per line, '#' starts a
// comment, blank lines ignored.
DiscreteDistribution load_distribution(const std::string& path);

// Sample file: one 1-based integer symbol per line, '#' comments allowed.
SampleBatch load_samples(const std::string& path);

void save_samples(const SampleBatch& batch, const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace closetest
