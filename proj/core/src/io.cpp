#include "closetest/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "closetest/errors.hpp"

namespace closetest {

namespace {

std::string strip_comment_and_space(const std::string& line) {
    std::string s = line.substr(0, line.find('#'));
    const char* ws = " \t\r\n";
    auto begin = s.find_first_not_of(ws);
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(ws);
    return s.substr(begin, end - begin + 1);
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

}  // namespace

std::string format_sig(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
    return buf;
}

DiscreteDistribution load_distribution(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<double> probs;
    std::string line;
    std::int64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string token = strip_comment_and_space(line);
        if (token.empty()) continue;
        errno = 0;
        char* end = nullptr;
        double value = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0' || errno == ERANGE) {
            throw ParseError(path + ": line " + std::to_string(line_number) +
                                 ": expected a probability, got \"" + token + "\"",
                             line_number);
        }
        probs.push_back(value);
    }
    if (probs.empty()) throw ParseError(path + ": no probabilities found", line_number);
    return DiscreteDistribution(std::move(probs));
}

SampleBatch load_samples(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    SampleBatch batch;
    std::string line;
    std::int64_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::string token = strip_comment_and_space(line);
        if (token.empty()) continue;
        errno = 0;
        char* end = nullptr;
        long long value = std::strtoll(token.c_str(), &end, 10);
        if (end == token.c_str() || *end != '\0' || errno == ERANGE || value < 1 ||
            value > 0xFFFFFFFFll) {
            throw ParseError(path + ": line " + std::to_string(line_number) +
                                 ": expected a 1-based integer symbol, got \"" + token + "\"",
                             line_number);
        }
        batch.symbols.push_back(static_cast<std::uint32_t>(value));
    }
    return batch;
}

void save_samples(const SampleBatch& batch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (std::uint32_t s : batch.symbols) out << s << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

}  // namespace closetest
