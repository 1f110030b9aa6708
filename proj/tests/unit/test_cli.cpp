#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "closetest/io.hpp"
#include "doctest.h"

#ifdef __unix__
#include <sys/wait.h>
#endif

namespace {

const char* kCli = CLOSETEST_CLI_PATH;

std::string tmp_path(const std::string& name) {
    return std::string(CLOSETEST_TEST_TMPDIR) + "/" + name;
}

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
    const std::string out_path = tmp_path("cli_out.txt");
    const std::string command = std::string(kCli) + " " + args + " > " + out_path + " 2>&1";
    int status = std::system(command.c_str());
    RunResult result;
#ifdef __unix__
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#else
    result.exit_code = status;
#endif
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

void write_lines(const std::string& path, const std::string& symbol, int count) {
    std::ofstream out(path);
    REQUIRE(out.good());
    for (int i = 0; i < count; ++i) out << symbol << '\n';
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("samplesize prints the certified n and the scaling terms") {
    RunResult r = run_cli("samplesize -k 1 -e 1 -d 0.5");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("7187") != std::string::npos);
    CHECK(r.output.find("dominant") != std::string::npos);
}

TEST_CASE("gap bound reproduces the clt-regime hand value") {
    RunResult r = run_cli("gap bound --binomial -n 16 -p 0 -q 0.03125");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0.00883883476483") != std::string::npos);
    CHECK(r.output.find("clt") != std::string::npos);
}

TEST_CASE("gap exact and zolotarev agree through the CLI") {
    RunResult exact = run_cli("gap binomial-exact -n 1 -p 0 -q 0.25");
    CHECK(exact.exit_code == 0);
    CHECK(exact.output.find("0.125") != std::string::npos);

    RunResult zol = run_cli("gap zolotarev --poisson --mu 2 --lambda 5 --csv");
    CHECK(zol.exit_code == 0);
    RunResult ref = run_cli("gap poisson-exact --mu 2 --lambda 5 --csv");
    CHECK(ref.exit_code == 0);

    auto value_of = [](const std::string& csv) {
        std::size_t header_end = csv.find('\n');
        std::string row = csv.substr(header_end + 1);
        std::stringstream ss(row);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        return std::stod(fields[7]);
    };
    CHECK(std::abs(value_of(zol.output) - value_of(ref.output)) <= 1e-6);
}

TEST_CASE("gap rejects inconsistent family flags") {
    RunResult r = run_cli("gap zolotarev -n 4 -p 0.1 -q 0.2");
    CHECK(r.exit_code == 2);
    RunResult both = run_cli("gap bound --binomial --poisson -n 16 -p 0 -q 0.1");
    CHECK(both.exit_code == 2);
    RunResult domain = run_cli("gap bound --binomial -n 15 -p 0 -q 0.1");
    CHECK(domain.exit_code == 2);
}

TEST_CASE("test subcommand: equal and far verdicts with the documented exit codes") {
    // (k=1, eps=1, delta=0.5) certifies n = 7187; 2n = 14374 samples per side.
    const std::string ones = tmp_path("p_ones.txt");
    write_lines(ones, "1", 14374);
    RunResult equal = run_cli("test --p-samples " + ones + " --q-samples " + ones +
                              " -k 1 -e 1 -d 0.5 --seed 1");
    CHECK(equal.exit_code == 0);
    CHECK(equal.output.find("equal") != std::string::npos);

    // (k=2, eps=0.9, delta=0.5): disjoint supports must read far.
    RunResult size_probe = run_cli("samplesize -k 2 -e 0.9 -d 0.5");
    REQUIRE(size_probe.exit_code == 0);
    std::stringstream probe(size_probe.output);
    std::string token;
    long long n2 = 0;
    probe >> token >> n2;  // first line: "n  <value>"
    REQUIRE(n2 >= 16);

    const std::string p2 = tmp_path("p_far.txt");
    const std::string q2 = tmp_path("q_far.txt");
    write_lines(p2, "1", static_cast<int>(2 * n2));
    write_lines(q2, "2", static_cast<int>(2 * n2));
    RunResult far = run_cli("test --p-samples " + p2 + " --q-samples " + q2 +
                            " -k 2 -e 0.9 -d 0.5 --seed 1");
    CHECK(far.exit_code == 1);
    CHECK(far.output.find("far") != std::string::npos);
}

TEST_CASE("test subcommand rejects bad inputs with exit 2") {
    const std::string bad = tmp_path("bad_samples.txt");
    {
        std::ofstream out(bad);
        out << "1\n1\nabc\n1\n";
    }
    const std::string good = tmp_path("good_short.txt");
    write_lines(good, "1", 4);

    RunResult malformed =
        run_cli("test --p-samples " + bad + " --q-samples " + good + " -k 1 -e 1 -d 0.5");
    CHECK(malformed.exit_code == 2);
    CHECK(malformed.output.find("line 3") != std::string::npos);

    // k smaller than the largest symbol in the file.
    const std::string wide = tmp_path("wide_symbols.txt");
    write_lines(wide, "3", 14374);
    RunResult range =
        run_cli("test --p-samples " + wide + " --q-samples " + wide + " -k 2 -e 1 -d 0.5");
    CHECK(range.exit_code == 2);

    // Not enough samples: the message names the required 2n per side.
    RunResult scarce =
        run_cli("test --p-samples " + good + " --q-samples " + good + " -k 1 -e 1 -d 0.5");
    CHECK(scarce.exit_code == 2);
    CHECK(scarce.output.find("14374") != std::string::npos);
}

TEST_CASE("test subcommand warns about and ignores excess samples") {
    const std::string extra = tmp_path("p_extra.txt");
    write_lines(extra, "1", 15000);
    RunResult r = run_cli("test --p-samples " + extra + " --q-samples " + extra +
                          " -k 1 -e 1 -d 0.5 --seed 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ignoring 626 excess samples") != std::string::npos);
}

TEST_CASE("simulate writes one CSV row per trial and is seed-reproducible") {
    const std::string csv = tmp_path("sim.csv");
    const std::string args = "simulate --null -k 4 -e 0.9 -d 0.5 -t 5 -n 16 --seed 11 -o " + csv;
    RunResult r1 = run_cli(args);
    CHECK(r1.exit_code == 0);
    closetest::CsvTable t1 = closetest::read_csv(csv);
    REQUIRE(t1.rows.size() == 5);

    // Bit-reproducible up to the wall-time line.
    auto strip_wall_time = [](const std::string& text) {
        std::string out;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.rfind("wall time", 0) != 0) out += line + '\n';
        }
        return out;
    };
    RunResult r2 = run_cli(args);
    CHECK(strip_wall_time(r2.output) == strip_wall_time(r1.output));
    closetest::CsvTable t2 = closetest::read_csv(csv);
    for (std::size_t i = 0; i < 5; ++i) CHECK(t1.rows[i] == t2.rows[i]);

    RunResult usage = run_cli("simulate -k 4 -e 0.9 -d 0.5");
    CHECK(usage.exit_code == 2);
}

TEST_CASE("verify runs the fast grids clean") {
    const std::string csv = tmp_path("verify.csv");
    RunResult r = run_cli("verify --cf-arguments --facts --csum -o " + csv);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find(" 0 violations") != std::string::npos);
    closetest::CsvTable table = closetest::read_csv(csv);
    CHECK(table.rows.size() == 12000 + (26 * 101 * 2 + 10 * 99) + 1000);
}

TEST_SUITE_END();
