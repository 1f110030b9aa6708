#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "closetest/errors.hpp"
#include "closetest/harness.hpp"
#include "closetest/io.hpp"

namespace {

using namespace closetest;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CLOSETEST_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 0;
}

void print_kv(const std::string& key, const std::string& value) {
    std::cout << key;
    for (std::size_t i = key.size(); i < 28; ++i) std::cout << ' ';
    std::cout << value << '\n';
}

// ---- test ----------------------------------------------------------------

struct TestArgs {
    std::string p_path, q_path;
    std::size_t k = 0;
    double epsilon = 0.5;
    double delta = 0.1;
    std::uint64_t seed = 0;
};

int cmd_test(const TestArgs& args) {
    TestParams params{args.k, args.epsilon, args.delta};
    TestPlan plan = make_plan(params);
    const std::size_t need = 2 * static_cast<std::size_t>(plan.n);

    SampleBatch p_samples = load_samples(args.p_path);
    SampleBatch q_samples = load_samples(args.q_path);
    for (auto& [batch, path] :
         {std::pair{&p_samples, args.p_path}, std::pair{&q_samples, args.q_path}}) {
        for (std::uint32_t s : batch->symbols) {
            if (s > args.k) {
                std::cerr << "error: " << path << ": symbol " << s
                          << " exceeds the domain size k = " << args.k << "\n";
                return 2;
            }
        }
        if (batch->n() < need) {
            std::cerr << "error: " << path << ": need at least 2n = " << need
                      << " samples per side at (k=" << args.k << ", eps=" << args.epsilon
                      << ", delta=" << args.delta << "), got " << batch->n() << "\n";
            return 2;
        }
        if (batch->n() > need) {
            std::cerr << "warning: " << path << ": ignoring " << batch->n() - need
                      << " excess samples\n";
            batch->symbols.resize(need);
        }
    }

    RngStream rng(args.seed, 0);
    Verdict verdict = run_test(plan, p_samples, q_samples, rng);
    print_kv("decision", to_string(verdict.decision));
    print_kv("z", format_sig(verdict.z_value));
    print_kv("threshold", format_sig(verdict.threshold));
    print_kv("n", std::to_string(plan.n));
    print_kv("effective k", std::to_string(plan.effective_k));
    return verdict.decision == Decision::Far ? 1 : 0;
}

// ---- gap -----------------------------------------------------------------

struct GapArgs {
    std::string mode;
    bool binomial = false;
    bool poisson = false;
    std::int64_t n = 0;
    double p = 0.0, q = 0.0;
    double mu = 0.0, lambda = 0.0;
    double tol = 1e-8;
    int fold_terms = 64;
    std::string rule = "kronrod";
    bool csv = false;
};

int cmd_gap(const GapArgs& args) {
    QuadratureConfig config;
    config.abs_tolerance = args.tol;
    config.fold_terms = args.fold_terms;
    config.panel_rule =
        args.rule == "simpson" ? PanelRule::AdaptiveSimpson : PanelRule::GaussKronrod;

    const bool use_poisson = args.poisson || args.mode == "poisson-exact";
    const bool use_binomial = args.binomial || args.mode == "binomial-exact";
    if (use_poisson && use_binomial) {
        std::cerr << "error: choose one of --binomial / --poisson\n";
        return 2;
    }
    if ((args.mode == "bound" || args.mode == "zolotarev") && !use_poisson && !use_binomial) {
        std::cerr << "error: mode '" << args.mode << "' needs --binomial or --poisson\n";
        return 2;
    }

    double value = 0.0;
    std::string regime;
    if (args.mode == "binomial-exact") {
        value = exact_gap_binomial(args.n, args.p, args.q);
    } else if (args.mode == "poisson-exact") {
        value = exact_gap_poisson(args.mu, args.lambda);
    } else if (args.mode == "zolotarev") {
        value = use_poisson
                    ? zolotarev_gap(make_poisson_cf(args.mu), make_poisson_cf(args.lambda), config)
                    : zolotarev_gap(make_binomial_cf(args.n, args.p),
                                    make_binomial_cf(args.n, args.q), config);
    } else if (args.mode == "bound") {
        GapBound bound = use_poisson ? lower_bound_poisson(args.mu, args.lambda)
                                     : lower_bound_binomial(args.n, args.p, args.q);
        value = bound.value;
        regime = to_string(bound.regime);
    } else {
        std::cerr << "error: unknown gap mode '" << args.mode << "'\n";
        return 2;
    }

    if (args.csv) {
        std::cout << "mode,family,n,p,q,mu,lambda,value,regime\n" << args.mode << ','
                  << (use_poisson ? "poisson" : "binomial") << ',';
        if (use_poisson) {
            std::cout << ",,," << format_sig(args.mu) << ',' << format_sig(args.lambda);
        } else {
            std::cout << args.n << ',' << format_sig(args.p) << ',' << format_sig(args.q) << ",,";
        }
        std::cout << ',' << format_sig(value) << ',' << regime << '\n';
    } else {
        print_kv("mode", args.mode);
        if (use_poisson) {
            print_kv("mu", format_sig(args.mu));
            print_kv("lambda", format_sig(args.lambda));
        } else {
            print_kv("n", std::to_string(args.n));
            print_kv("p", format_sig(args.p));
            print_kv("q", format_sig(args.q));
        }
        print_kv(args.mode == "bound" ? "bound" : "delta", format_sig(value));
        if (!regime.empty()) print_kv("regime", regime);
    }
    return 0;
}

// ---- samplesize ------------------------------------------------------------

struct SampleSizeArgs {
    std::size_t k = 1;
    double epsilon = 0.5;
    double delta = 0.1;
};

int cmd_samplesize(const SampleSizeArgs& args) {
    TestParams params{args.k, args.epsilon, args.delta};
    const std::int64_t n = required_samples(params);
    const double ds = delta_star(n, 4 * args.k, args.epsilon);

    const double log_term = std::log(1.0 / args.delta);
    const double k = static_cast<double>(args.k);
    const double eps = args.epsilon;
    const double term_log = log_term / (eps * eps);
    const double term_k23 =
        std::pow(k, 2.0 / 3.0) * std::cbrt(log_term) / std::pow(eps, 4.0 / 3.0);
    const double term_sqrtk = std::sqrt(k) * std::sqrt(log_term) / (eps * eps);

    std::string dominant = "log(1/delta)/eps^2";
    double best = term_log;
    if (term_k23 > best) {
        best = term_k23;
        dominant = "k^(2/3)log^(1/3)(1/delta)/eps^(4/3)";
    }
    if (term_sqrtk > best) {
        best = term_sqrtk;
        dominant = "k^(1/2)log^(1/2)(1/delta)/eps^2";
    }
    if (log_term == 0.0) dominant = "none (delta = 1)";

    print_kv("n", std::to_string(n));
    print_kv("gap floor", format_sig(ds));
    print_kv("threshold", format_sig(ds / 2.0));
    print_kv("term log(1/delta)/eps^2", format_sig(term_log));
    print_kv("term k^(2/3)...", format_sig(term_k23));
    print_kv("term k^(1/2)...", format_sig(term_sqrtk));
    print_kv("dominant", dominant);
    return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::size_t k = 0;
    double epsilon = 0.5;
    double delta = 0.1;
    std::int64_t trials = 200;
    std::optional<std::int64_t> n_override;
    double tv = -1.0;
    bool null_mode = false;
    bool alt_mode = false;
    std::string p_dist, q_dist;
    std::string out;
    std::string profile_out;
    bool profile = false;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

DiscreteDistribution paired_perturbed_uniform(std::size_t k, double tv) {
    if (k % 2 != 0) throw DomainError("paired perturbation needs an even domain size");
    if (!(tv >= 0.0 && tv <= 0.5)) {
        throw DomainError("paired perturbation supports tv in [0, 1/2] on a uniform base");
    }
    const double base = 1.0 / static_cast<double>(k);
    const double shift = 2.0 * tv / static_cast<double>(k);
    std::vector<double> probs(k);
    for (std::size_t i = 0; i < k; i += 2) {
        probs[i] = base + shift;
        probs[i + 1] = base - shift;
    }
    return DiscreteDistribution(std::move(probs));
}

int cmd_simulate(const SimulateArgs& args) {
    std::optional<DiscreteDistribution> p, q;
    if (!args.p_dist.empty()) p = load_distribution(args.p_dist);
    std::size_t k = p ? p->size() : args.k;
    if (k == 0) {
        std::cerr << "error: provide --k or --p-dist\n";
        return 2;
    }
    if (!p) p = DiscreteDistribution::uniform(k);

    if (!args.q_dist.empty()) {
        q = load_distribution(args.q_dist);
    } else if (args.null_mode) {
        q = *p;
    } else if (args.alt_mode) {
        if (!args.p_dist.empty()) {
            std::cerr << "error: --alt builds a perturbed uniform; drop --p-dist\n";
            return 2;
        }
        q = paired_perturbed_uniform(k, args.tv < 0.0 ? args.epsilon : args.tv);
    } else {
        std::cerr << "error: choose --null, --alt, or --q-dist\n";
        return 2;
    }
    if (q->size() != k) {
        std::cerr << "error: p and q have different domain sizes\n";
        return 2;
    }

    TestParams params{k, args.epsilon, args.delta};
    TestPlan plan = make_plan(params, args.n_override);

    ExperimentSpec spec{*p, *q, plan, args.trials, args.seed};
    ExperimentOptions options;
    options.threads = args.threads;

    const double tv = tv_distance(*p, *q);
    const bool null_like = tv == 0.0;
    ExperimentResult result = run_experiment(spec, options);

    print_kv("trials", std::to_string(result.trials));
    print_kv("n", std::to_string(plan.n));
    print_kv("tv(p,q)", format_sig(tv));
    print_kv("threshold", format_sig(plan.threshold));
    print_kv("far count", std::to_string(result.far_count));
    print_kv("far rate", format_sig(result.far_rate));
    print_kv("z mean", format_sig(result.z_mean));
    print_kv("z stddev", format_sig(result.z_stddev));
    print_kv("wall time (s)", format_sig(result.wall_time.count(), 4));

    // One-sided exact binomial test that the error rate is <= delta.
    const std::int64_t errors = null_like ? result.far_count : result.trials - result.far_count;
    const double p_value = binomial_upper_tail(result.trials, args.delta, errors);
    const bool pass = p_value > 0.001;
    print_kv("error count", std::to_string(errors));
    print_kv("binomial test p-value", format_sig(p_value));
    print_kv("calibration", pass ? "PASS" : "FAIL");

    if (!args.out.empty()) {
        write_experiment_csv(result, plan.threshold, args.out);
        print_kv("csv", args.out);
    }
    if (args.profile || !args.profile_out.empty()) {
        ConcentrationProfile profile = concentration_profile(spec, options);
        print_kv("deviation (floor / 3)", format_sig(profile.deviation));
        print_kv("empirical tail prob", format_sig(profile.tail_probability));
        print_kv("mcdiarmid bound", format_sig(profile.mcdiarmid_bound));
        if (!args.profile_out.empty()) {
            std::ofstream hist(args.profile_out);
            if (!hist) throw std::runtime_error("cannot write file: " + args.profile_out);
            hist << "bin_lo,bin_hi,count\n";
            for (std::size_t b = 0; b < profile.bin_counts.size(); ++b) {
                hist << format_sig(profile.bin_edges[b]) << ','
                     << format_sig(profile.bin_edges[b + 1]) << ',' << profile.bin_counts[b]
                     << '\n';
            }
            print_kv("profile csv", args.profile_out);
        }
    }
    return pass ? 0 : 1;
}

// ---- verify -----------------------------------------------------------------

struct VerifyArgs {
    bool all = false;
    bool binomial_bounds = false;
    bool poisson_bounds = false;
    bool cf_arguments = false;
    bool facts = false;
    bool zolotarev = false;
    bool csum = false;
    bool nonneg = false;
    std::string out;
    unsigned threads = 0;
};

int cmd_verify(const VerifyArgs& args) {
    GridConfig config;
    config.threads = args.threads;
    const bool any = args.binomial_bounds || args.poisson_bounds || args.cf_arguments || args.facts ||
                     args.zolotarev || args.csum || args.nonneg;
    if (any && !args.all) {
        config.selection = GridSelection{args.binomial_bounds, args.poisson_bounds, args.cf_arguments,
                                         args.facts,          args.zolotarev,    args.csum,
                                         args.nonneg};
    }

    VerificationReport report = verify_grids(config);

    std::map<std::string, std::pair<std::size_t, std::size_t>> by_check;
    for (const GridRow& row : report.rows) {
        auto& entry = by_check[row.check];
        ++entry.first;
        if (!row.ok) ++entry.second;
    }
    for (const auto& [check, counts] : by_check) {
        std::cout << check;
        for (std::size_t i = check.size(); i < 28; ++i) std::cout << ' ';
        std::cout << counts.first << " points, " << counts.second << " violations\n";
    }
    const std::size_t violations = report.violation_count();
    std::cout << "total: " << report.rows.size() << " points, " << violations << " violations\n";

    for (const GridRow* row : report.violations()) {
        std::cout << "violation: " << row->check << " at (";
        for (std::size_t i = 0; i < row->inputs.size(); ++i) {
            if (i) std::cout << ", ";
            std::cout << format_sig(row->inputs[i]);
        }
        std::cout << "): lhs " << format_sig(row->lhs) << ", rhs " << format_sig(row->rhs)
                  << ", margin " << format_sig(row->margin) << '\n';
    }

    if (!args.out.empty()) {
        write_verification_csv(report, args.out);
        std::cout << "csv: " << args.out << '\n';
    }
    return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-sample closeness tester with an exactly verified expectation-gap core"};
    app.require_subcommand(1);

    TestArgs test_args;
    test_args.seed = default_seed();
    auto* test_cmd = app.add_subcommand("test", "run the closeness test on two sample files");
    test_cmd->add_option("--p-samples", test_args.p_path, "sample file for p")->required();
    test_cmd->add_option("--q-samples", test_args.q_path, "sample file for q")->required();
    test_cmd->add_option("-k,--k", test_args.k, "domain size")->required();
    test_cmd->add_option("-e,--eps", test_args.epsilon, "distance parameter in (0,1]")->required();
    test_cmd->add_option("-d,--delta", test_args.delta, "error probability in (0,1]")->required();
    test_cmd->add_option("--seed", test_args.seed, "rng seed (default: CLOSETEST_SEED or 0)");

    GapArgs gap_args;
    auto* gap_cmd = app.add_subcommand("gap", "expectation gaps: exact, quadrature, or bound");
    gap_cmd->add_option("mode", gap_args.mode,
                        "binomial-exact | poisson-exact | zolotarev | bound")
        ->required();
    gap_cmd->add_flag("--binomial", gap_args.binomial, "use binomial counts");
    gap_cmd->add_flag("--poisson", gap_args.poisson, "use poisson counts");
    gap_cmd->add_option("-n,--n", gap_args.n, "binomial batch size");
    gap_cmd->add_option("-p,--p", gap_args.p, "binomial success probability p");
    gap_cmd->add_option("-q,--q", gap_args.q, "binomial success probability q");
    gap_cmd->add_option("--mu", gap_args.mu, "poisson mean mu");
    gap_cmd->add_option("--lambda", gap_args.lambda, "poisson mean lambda");
    gap_cmd->add_option("--tol", gap_args.tol, "quadrature absolute tolerance");
    gap_cmd->add_option("--fold-terms", gap_args.fold_terms, "kernel fold terms");
    gap_cmd->add_option("--rule", gap_args.rule, "quadrature rule: kronrod | simpson");
    gap_cmd->add_flag("--csv", gap_args.csv, "emit a CSV row instead of the table");

    SampleSizeArgs size_args;
    auto* size_cmd = app.add_subcommand("samplesize", "certified sample size for (k, eps, delta)");
    size_cmd->add_option("-k,--k", size_args.k, "domain size")->required();
    size_cmd->add_option("-e,--eps", size_args.epsilon, "distance parameter")->required();
    size_cmd->add_option("-d,--delta", size_args.delta, "error probability")->required();

    SimulateArgs sim_args;
    sim_args.seed = default_seed();
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo error-rate experiments");
    sim_cmd->add_option("-k,--k", sim_args.k, "domain size (uniform p)");
    sim_cmd->add_option("-e,--eps", sim_args.epsilon, "distance parameter")->required();
    sim_cmd->add_option("-d,--delta", sim_args.delta, "error probability")->required();
    sim_cmd->add_option("-t,--trials", sim_args.trials, "number of trials");
    sim_cmd->add_option("-n,--n", sim_args.n_override, "override the per-batch sample size");
    sim_cmd->add_option("--tv", sim_args.tv, "target tv distance for --alt (default: eps)");
    sim_cmd->add_flag("--null", sim_args.null_mode, "q = p");
    sim_cmd->add_flag("--alt", sim_args.alt_mode, "q = paired-perturbed uniform");
    sim_cmd->add_option("--p-dist", sim_args.p_dist, "distribution file for p");
    sim_cmd->add_option("--q-dist", sim_args.q_dist, "distribution file for q");
    sim_cmd->add_option("-o,--out", sim_args.out, "per-trial CSV output path");
    sim_cmd->add_flag("--profile", sim_args.profile, "print the concentration profile");
    sim_cmd->add_option("--profile-out", sim_args.profile_out, "histogram CSV output path");
    sim_cmd->add_option("--seed", sim_args.seed, "rng seed (default: CLOSETEST_SEED or 0)");
    sim_cmd->add_option("--threads", sim_args.threads, "worker threads (0 = cores)");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "run the inequality grids");
    verify_cmd->add_flag("--all", verify_args.all, "run every grid (default)");
    verify_cmd->add_flag("--binomial-bounds", verify_args.binomial_bounds, "binomial gap bound grid");
    verify_cmd->add_flag("--poisson-bounds", verify_args.poisson_bounds, "poisson gap bound grid");
    verify_cmd->add_flag("--cf-arguments", verify_args.cf_arguments, "argument-bound inequalities");
    verify_cmd->add_flag("--facts", verify_args.facts, "modulus and monotonicity facts");
    verify_cmd->add_flag("--zolotarev", verify_args.zolotarev, "quadrature cross-validation");
    verify_cmd->add_flag("--csum", verify_args.csum, "cauchy-schwarz sum inequality");
    verify_cmd->add_flag("--nonneg", verify_args.nonneg, "gap nonnegativity");
    verify_cmd->add_option("-o,--out", verify_args.out, "CSV output path");
    verify_cmd->add_option("--threads", verify_args.threads, "worker threads (0 = cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (test_cmd->parsed()) return cmd_test(test_args);
        if (gap_cmd->parsed()) return cmd_gap(gap_args);
        if (size_cmd->parsed()) return cmd_samplesize(size_args);
        if (sim_cmd->parsed()) return cmd_simulate(sim_args);
        if (verify_cmd->parsed()) return cmd_verify(verify_args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
