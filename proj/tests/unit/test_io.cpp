#include <fstream>
#include <string>

#include "closetest/errors.hpp"
#include "closetest/io.hpp"
#include "doctest.h"

using namespace closetest;

namespace {

std::string tmp_path(const std::string& name) {
    return std::string(CLOSETEST_TEST_TMPDIR) + "/" + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << content;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("format_sig prints 12 significant digits by default") {
    CHECK(format_sig(0.125) == "0.125");
    CHECK(format_sig(1.0 / 3.0) == "0.333333333333");
    CHECK(format_sig(0.0) == "0");
    CHECK(format_sig(1234567.0) == "1234567");
}

TEST_CASE("load_distribution parses probabilities with comments") {
    const std::string path = tmp_path("dist_ok.txt");
    write_file(path, "# a distribution over 3 symbols\n0.5\n0.25   # trailing comment\n\n0.25\n");
    DiscreteDistribution d = load_distribution(path);
    CHECK(d.size() == 3);
    CHECK(d.prob(1) == doctest::Approx(0.5));
    CHECK(d.prob(3) == doctest::Approx(0.25));
}

TEST_CASE("load_distribution reports the offending line") {
    const std::string path = tmp_path("dist_bad.txt");
    write_file(path, "0.5\nnot-a-number\n0.5\n");
    CHECK_THROWS_WITH_AS(load_distribution(path), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("load_distribution rejects an off-normalized vector") {
    const std::string path = tmp_path("dist_sum.txt");
    write_file(path, "0.5\n0.6\n");
    CHECK_THROWS_AS(load_distribution(path), DomainError);
}

TEST_CASE("load_samples parses 1-based symbols and flags bad lines") {
    const std::string path = tmp_path("samples_ok.txt");
    write_file(path, "1\n2\n1\n# comment\n3\n");
    SampleBatch batch = load_samples(path);
    REQUIRE(batch.n() == 4);
    CHECK(batch.symbols == std::vector<std::uint32_t>{1, 2, 1, 3});

    const std::string bad = tmp_path("samples_bad.txt");
    write_file(bad, "1\n2\nabc\n");
    CHECK_THROWS_WITH_AS(load_samples(bad), doctest::Contains("line 3"), ParseError);

    const std::string zero = tmp_path("samples_zero.txt");
    write_file(zero, "1\n0\n");
    CHECK_THROWS_AS(load_samples(zero), ParseError);
}

TEST_CASE("save_samples round-trips through load_samples") {
    SampleBatch batch;
    batch.symbols = {5, 1, 3, 3, 2};
    const std::string path = tmp_path("samples_rt.txt");
    save_samples(batch, path);
    SampleBatch loaded = load_samples(path);
    CHECK(loaded.symbols == batch.symbols);
}

TEST_CASE("read_csv splits header and rows") {
    const std::string path = tmp_path("table.csv");
    write_file(path, "a,b,c\n1,2,3\n4,,6\n");
    CsvTable table = read_csv(path);
    REQUIRE(table.header.size() == 3);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1][1] == "");
    CHECK(table.rows[1][2] == "6");
}

TEST_SUITE_END();
