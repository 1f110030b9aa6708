#include "closetest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "closetest/errors.hpp"
#include "closetest/io.hpp"
#include "closetest/numeric.hpp"

namespace closetest {

namespace {

constexpr double kPi = 3.14159265358979323846;

double modulus_raw(double p, double t) {
    return std::hypot(1.0 - p * (1.0 - std::cos(t)), p * std::sin(t));
}

}  // namespace

void parallel_for(std::int64_t total, unsigned threads,
                  const std::function<void(std::int64_t)>& fn) {
    if (total <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned workers = threads == 0 ? hw : threads;
    if (static_cast<std::int64_t>(workers) > total) workers = static_cast<unsigned>(total);

    if (workers <= 1) {
        for (std::int64_t i = 0; i < total; ++i) fn(i);
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::int64_t chunk =
        std::max<std::int64_t>(1, total / (static_cast<std::int64_t>(workers) * 8));

    auto work = [&]() {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            std::int64_t begin = next.fetch_add(chunk);
            if (begin >= total) return;
            std::int64_t end = std::min(total, begin + chunk);
            try {
                for (std::int64_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options) {
    if (spec.trials < 1) throw DomainError("run_experiment: trials must be >= 1");
    if (spec.p.size() != spec.plan.params.k || spec.q.size() != spec.plan.params.k) {
        throw DimensionError("run_experiment: distributions do not match the plan's domain size");
    }

    const auto start = std::chrono::steady_clock::now();
    std::vector<double> zs(static_cast<std::size_t>(spec.trials));
    std::vector<std::uint8_t> far(static_cast<std::size_t>(spec.trials));

    parallel_for(spec.trials, options.threads, [&](std::int64_t i) {
        RngStream rng(spec.seed, static_cast<std::uint64_t>(i));
        const std::size_t batch = 2 * static_cast<std::size_t>(spec.plan.n);
        SampleBatch sp = sample_categorical(spec.p, batch, rng);
        SampleBatch sq = sample_categorical(spec.q, batch, rng);
        Verdict verdict = run_test(spec.plan, sp, sq, rng);
        zs[static_cast<std::size_t>(i)] = verdict.z_value;
        far[static_cast<std::size_t>(i)] = verdict.decision == Decision::Far ? 1 : 0;
    });

    ExperimentResult result;
    result.trials = spec.trials;
    for (std::uint8_t f : far) result.far_count += f;
    result.far_rate = static_cast<double>(result.far_count) / static_cast<double>(spec.trials);

    KahanSum mean_sum;
    for (double z : zs) mean_sum.add(z);
    result.z_mean = mean_sum.value() / static_cast<double>(spec.trials);
    KahanSum var_sum;
    for (double z : zs) var_sum.add((z - result.z_mean) * (z - result.z_mean));
    result.z_stddev = std::sqrt(var_sum.value() / static_cast<double>(spec.trials));

    result.wall_time = std::chrono::steady_clock::now() - start;
    if (options.keep_per_trial) result.per_trial_z = std::move(zs);
    return result;
}

ConcentrationProfile concentration_profile(const ExperimentSpec& spec,
                                           const ExperimentOptions& options) {
    ExperimentOptions opts = options;
    opts.keep_per_trial = true;
    ExperimentResult result = run_experiment(spec, opts);
    const std::vector<double>& zs = *result.per_trial_z;

    ConcentrationProfile profile;
    profile.trials = result.trials;
    profile.z_mean = result.z_mean;
    profile.z_stddev = result.z_stddev;
    profile.deviation = spec.plan.delta_star_value / 3.0;
    const double n = static_cast<double>(spec.plan.n);
    profile.mcdiarmid_bound =
        std::exp(-n * spec.plan.delta_star_value * spec.plan.delta_star_value / 72.0);

    std::int64_t exceed = 0;
    for (double z : zs) {
        if (std::abs(z - profile.z_mean) > profile.deviation) ++exceed;
    }
    profile.tail_probability = static_cast<double>(exceed) / static_cast<double>(result.trials);

    double lo = *std::min_element(zs.begin(), zs.end());
    double hi = *std::max_element(zs.begin(), zs.end());
    if (hi <= lo) hi = lo + 1e-12;
    const int bins = static_cast<int>(std::min<std::int64_t>(41, result.trials));
    profile.bin_edges.resize(bins + 1);
    profile.bin_counts.assign(bins, 0);
    for (int b = 0; b <= bins; ++b) {
        profile.bin_edges[b] = lo + (hi - lo) * static_cast<double>(b) / bins;
    }
    for (double z : zs) {
        int b = static_cast<int>(static_cast<double>(bins) * (z - lo) / (hi - lo));
        if (b >= bins) b = bins - 1;
        if (b < 0) b = 0;
        ++profile.bin_counts[b];
    }
    return profile;
}

// ---- Grid verification -------------------------------------------------------

namespace {

void append_rows(std::vector<GridRow>& out, std::vector<GridRow>& section) {
    out.insert(out.end(), std::make_move_iterator(section.begin()),
               std::make_move_iterator(section.end()));
    section.clear();
}

std::vector<GridRow> binomial_bound_rows(const GridConfig& config) {
    const int steps = config.prob_steps;
    std::vector<double> probs(steps + 1);
    for (int j = 0; j <= steps; ++j) probs[j] = static_cast<double>(j) / 100.0;

    std::vector<GridRow> rows;
    for (std::int64_t n : config.binomial_grid_n) {
        std::vector<std::vector<double>> pmfs(probs.size());
        std::vector<double> self(probs.size());
        parallel_for(static_cast<std::int64_t>(probs.size()), config.threads,
                     [&](std::int64_t j) {
                         pmfs[j] = binomial_pmf(n, probs[j]);
                         self[j] = abs_mean_difference(pmfs[j], pmfs[j]);
                     });

        const std::int64_t pairs = static_cast<std::int64_t>(probs.size() * probs.size());
        std::vector<GridRow> block(static_cast<std::size_t>(pairs));
        parallel_for(pairs, config.threads, [&](std::int64_t idx) {
            const std::size_t a = static_cast<std::size_t>(idx) / probs.size();
            const std::size_t b = static_cast<std::size_t>(idx) % probs.size();
            const double exact =
                2.0 * abs_mean_difference(pmfs[a], pmfs[b]) - self[a] - self[b];
            const GapBound bound =
                lower_bound_binomial_with(config.binomial_coeffs, n, probs[a], probs[b]);
            GridRow& row = block[static_cast<std::size_t>(idx)];
            row.check = "binomial-gap-bound";
            row.inputs = {static_cast<double>(n), probs[a], probs[b]};
            row.lhs = exact;
            row.rhs = bound.value;
            row.margin = exact - bound.value;
            row.ok = row.margin >= -config.binomial_bound_tolerance;
        });
        append_rows(rows, block);
    }
    return rows;
}

std::vector<GridRow> poisson_bound_rows(const GridConfig& config) {
    std::set<std::int64_t> keys;
    keys.insert(0);
    for (std::int64_t n : config.poisson_grid_n) {
        for (int j = 1; j <= config.prob_steps; ++j) keys.insert(n * j);
    }
    std::vector<double> values;
    values.reserve(keys.size());
    for (std::int64_t key : keys) values.push_back(static_cast<double>(key) / 100.0);

    std::vector<std::vector<double>> pmfs(values.size());
    std::vector<double> self(values.size());
    parallel_for(static_cast<std::int64_t>(values.size()), config.threads, [&](std::int64_t j) {
        pmfs[j] = poisson_pmf_truncated(values[j]);
        self[j] = abs_mean_difference(pmfs[j], pmfs[j]);
    });

    const std::int64_t pairs = static_cast<std::int64_t>(values.size() * values.size());
    std::vector<GridRow> rows(static_cast<std::size_t>(pairs));
    parallel_for(pairs, config.threads, [&](std::int64_t idx) {
        const std::size_t a = static_cast<std::size_t>(idx) / values.size();
        const std::size_t b = static_cast<std::size_t>(idx) % values.size();
        const double exact = 2.0 * abs_mean_difference(pmfs[a], pmfs[b]) - self[a] - self[b];
        const GapBound bound = lower_bound_poisson_with(config.poisson_coeffs, values[a], values[b]);
        GridRow& row = rows[static_cast<std::size_t>(idx)];
        row.check = "poisson-gap-bound";
        row.inputs = {values[a], values[b]};
        row.lhs = exact;
        row.rhs = bound.value;
        row.margin = exact - bound.value;
        row.ok = row.margin >= -config.poisson_bound_tolerance;
    });
    return rows;
}

std::vector<GridRow> argument_bound_rows(const GridConfig& config) {
    std::vector<double> probs;
    for (int j = 0; j <= config.argument_prob_steps; ++j) {
        probs.push_back(static_cast<double>(5 * j) / 100.0);
    }
    struct Point {
        std::int64_t n;
        double p, q, t;
    };
    std::vector<Point> points;
    for (std::int64_t n : config.argument_grid_n) {
        for (double p : probs) {
            for (double q : probs) {
                if (p == q) continue;
                for (int j = 1; j <= config.argument_t_points; ++j) {
                    points.push_back({n, p, q, kPi * static_cast<double>(j) / config.argument_t_points});
                }
            }
        }
    }
    std::vector<GridRow> rows(points.size());
    parallel_for(static_cast<std::int64_t>(points.size()), config.threads, [&](std::int64_t i) {
        const Point& pt = points[static_cast<std::size_t>(i)];
        const ArgumentBoundsCheck check = cf_argument_bounds_check(pt.n, pt.p, pt.q, pt.t);
        GridRow& row = rows[static_cast<std::size_t>(i)];
        row.check = "cf-argument-bounds";
        row.inputs = {static_cast<double>(pt.n), pt.p, pt.q, pt.t};
        row.lhs = check.lhs;
        row.rhs = check.lower;
        row.margin = std::min(check.lhs - check.lower, check.upper - check.lhs);
        row.ok = check.ok;
    });
    return rows;
}

std::vector<GridRow> fact_rows(const GridConfig& config) {
    std::vector<GridRow> rows;

    // Modulus floor 1/2 and arcsin argument range over p in [0, 1/4].
    for (int pj = 0; pj <= 25; ++pj) {
        const double p = static_cast<double>(pj) / 100.0;
        for (int tj = 0; tj <= 100; ++tj) {
            const double t = kPi * static_cast<double>(tj) / 100.0;
            const CfPolar polar = cf_polar_binomial(p, t);

            GridRow floor_row;
            floor_row.check = "fact-modulus-floor";
            floor_row.inputs = {p, t};
            floor_row.lhs = polar.modulus;
            floor_row.rhs = 0.5;
            floor_row.margin = polar.modulus - 0.5;
            floor_row.ok = floor_row.margin >= 0.0;
            rows.push_back(std::move(floor_row));

            const double ratio = p * std::sin(t) / polar.modulus;
            GridRow arc_row;
            arc_row.check = "fact-arcsin-range";
            arc_row.inputs = {p, t};
            arc_row.lhs = ratio;
            arc_row.rhs = 0.5;
            arc_row.margin = std::min(ratio, 0.5 - ratio);
            arc_row.ok = ratio >= 0.0 && ratio <= 0.5;
            rows.push_back(std::move(arc_row));
        }
    }

    // For fixed t in (0, pi): p sin t non-decreasing and r(t) decreasing over
    // p in [0, 1/2] (checked on consecutive grid points).
    std::vector<double> wide;
    for (int pj = 0; pj <= 10; ++pj) wide.push_back(static_cast<double>(pj) / 20.0);
    for (std::size_t i = 0; i + 1 < wide.size(); ++i) {
        for (int tj = 1; tj <= 99; ++tj) {
            const double t = kPi * static_cast<double>(tj) / 100.0;
            const double r_lo = modulus_raw(wide[i], t);
            const double r_hi = modulus_raw(wide[i + 1], t);
            GridRow row;
            row.check = "fact-monotonicity";
            row.inputs = {wide[i], wide[i + 1], t};
            row.lhs = r_hi;
            row.rhs = r_lo;
            row.margin = r_lo - r_hi;
            row.ok = r_lo > r_hi && wide[i + 1] * std::sin(t) >= wide[i] * std::sin(t);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<GridRow> zolotarev_rows(const GridConfig& config) {
    struct BinomialPair {
        std::int64_t n;
        double p, q;
    };
    struct PoissonPair {
        double mu, lambda;
    };
    std::vector<BinomialPair> binomials;
    std::vector<PoissonPair> poissons;
    RngStream rng(config.zolotarev_seed, 0);
    for (int i = 0; i < config.zolotarev_pairs; ++i) {
        BinomialPair pair;
        pair.n = 1 + static_cast<std::int64_t>(rng.next_below(128));
        pair.p = 0.25 * rng.next_double();
        pair.q = 0.25 * rng.next_double();
        binomials.push_back(pair);
    }
    for (int i = 0; i < config.zolotarev_pairs; ++i) {
        poissons.push_back({32.0 * rng.next_double(), 32.0 * rng.next_double()});
    }

    std::vector<GridRow> rows(binomials.size() + poissons.size());
    parallel_for(static_cast<std::int64_t>(rows.size()), config.threads, [&](std::int64_t i) {
        GridRow& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<std::size_t>(i) < binomials.size()) {
            const BinomialPair& pair = binomials[static_cast<std::size_t>(i)];
            const double quad =
                zolotarev_gap(make_binomial_cf(pair.n, pair.p), make_binomial_cf(pair.n, pair.q));
            const double exact = exact_gap_binomial(pair.n, pair.p, pair.q);
            row.check = "zolotarev-binomial";
            row.inputs = {static_cast<double>(pair.n), pair.p, pair.q};
            row.lhs = quad;
            row.rhs = exact;
        } else {
            const PoissonPair& pair = poissons[static_cast<std::size_t>(i) - binomials.size()];
            const double quad =
                zolotarev_gap(make_poisson_cf(pair.mu), make_poisson_cf(pair.lambda));
            const double exact = exact_gap_poisson(pair.mu, pair.lambda);
            row.check = "zolotarev-poisson";
            row.inputs = {pair.mu, pair.lambda};
            row.lhs = quad;
            row.rhs = exact;
        }
        row.margin = config.zolotarev_tolerance - std::abs(row.lhs - row.rhs);
        row.ok = row.margin >= 0.0;
    });
    return rows;
}

std::vector<GridRow> csum_rows(const GridConfig& config) {
    RngStream rng(config.zolotarev_seed, 1);
    std::vector<GridRow> rows;
    rows.reserve(static_cast<std::size_t>(config.csum_vectors));
    for (int i = 0; i < config.csum_vectors; ++i) {
        const std::size_t len = 1 + static_cast<std::size_t>(rng.next_below(20));
        std::vector<double> a(len), b(len);
        for (std::size_t j = 0; j < len; ++j) {
            a[j] = -5.0 + 10.0 * rng.next_double();
            b[j] = 1e-3 + 5.0 * rng.next_double();
        }
        KahanSum lhs, abs_sum, b_sum;
        for (std::size_t j = 0; j < len; ++j) {
            lhs.add(a[j] * a[j] / b[j]);
            abs_sum.add(std::abs(a[j]));
            b_sum.add(b[j]);
        }
        GridRow row;
        row.check = "csum-inequality";
        row.inputs = {static_cast<double>(i), static_cast<double>(len)};
        row.lhs = lhs.value();
        row.rhs = abs_sum.value() * abs_sum.value() / b_sum.value();
        row.margin = row.lhs - row.rhs;
        row.ok = csum_inequality_check(a, b);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<GridRow> nonnegativity_rows(const GridConfig& config) {
    std::vector<GridRow> rows;
    for (std::int64_t n : {static_cast<std::int64_t>(16), static_cast<std::int64_t>(64)}) {
        for (int a = 0; a <= 10; ++a) {
            for (int b = 0; b <= 10; ++b) {
                const double p = static_cast<double>(a) / 10.0;
                const double q = static_cast<double>(b) / 10.0;
                const double exact = exact_gap_binomial(n, p, q);
                GridRow row;
                row.check = "nonnegativity-binomial";
                row.inputs = {static_cast<double>(n), p, q};
                row.lhs = exact;
                row.rhs = 0.0;
                row.margin = exact;
                row.ok = exact >= -config.binomial_bound_tolerance;
                rows.push_back(std::move(row));
            }
        }
    }
    for (int a = 0; a <= 8; ++a) {
        for (int b = 0; b <= 8; ++b) {
            const double mu = 4.0 * a;
            const double lambda = 4.0 * b;
            const double exact = exact_gap_poisson(mu, lambda);
            GridRow row;
            row.check = "nonnegativity-poisson";
            row.inputs = {mu, lambda};
            row.lhs = exact;
            row.rhs = 0.0;
            row.margin = exact;
            row.ok = exact >= -config.poisson_bound_tolerance;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace

std::size_t VerificationReport::violation_count() const {
    std::size_t count = 0;
    for (const GridRow& row : rows) {
        if (!row.ok) ++count;
    }
    return count;
}

std::vector<const GridRow*> VerificationReport::violations() const {
    std::vector<const GridRow*> out;
    for (const GridRow& row : rows) {
        if (!row.ok) out.push_back(&row);
    }
    return out;
}

VerificationReport verify_grids(const GridConfig& config) {
    VerificationReport report;
    std::vector<GridRow> section;

    if (config.selection.binomial_bounds) {
        section = binomial_bound_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.poisson_bounds) {
        section = poisson_bound_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.cf_arguments) {
        section = argument_bound_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.facts) {
        section = fact_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.zolotarev) {
        section = zolotarev_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.csum) {
        section = csum_rows(config);
        append_rows(report.rows, section);
    }
    if (config.selection.nonnegativity) {
        section = nonnegativity_rows(config);
        append_rows(report.rows, section);
    }
    return report;
}

double binomial_upper_tail(std::int64_t trials, double rate, std::int64_t count) {
    if (trials < 0) throw DomainError("binomial_upper_tail: trials must be >= 0");
    if (!(rate >= 0.0 && rate <= 1.0)) throw DomainError("binomial_upper_tail: rate in [0,1]");
    if (count <= 0) return 1.0;
    if (count > trials) return 0.0;
    const std::vector<double> pmf = binomial_pmf(trials, rate);
    KahanSum sum;
    for (std::int64_t x = trials; x >= count; --x) sum.add(pmf[static_cast<std::size_t>(x)]);
    return std::min(1.0, sum.value());
}

void write_experiment_csv(const ExperimentResult& result, double threshold,
                          const std::string& path) {
    if (!result.per_trial_z) {
        throw DegenerateInputError("write_experiment_csv: per-trial values were not recorded");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "trial,z,decision\n";
    const std::vector<double>& zs = *result.per_trial_z;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        out << i << ',' << format_sig(zs[i]) << ','
            << (zs[i] >= threshold ? "far" : "equal") << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_verification_csv(const VerificationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "check,i1,i2,i3,i4,lhs,rhs,margin,ok\n";
    for (const GridRow& row : report.rows) {
        out << row.check;
        for (std::size_t i = 0; i < 4; ++i) {
            out << ',';
            if (i < row.inputs.size()) out << format_sig(row.inputs[i]);
        }
        out << ',' << format_sig(row.lhs) << ',' << format_sig(row.rhs) << ','
            << format_sig(row.margin) << ',' << (row.ok ? 1 : 0) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace closetest
