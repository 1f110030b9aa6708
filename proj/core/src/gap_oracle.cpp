#include "closetest/gap_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "closetest/errors.hpp"
#include "closetest/numeric.hpp"

namespace closetest {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::complex<double> cpow_int(std::complex<double> base, std::uint64_t e) {
    std::complex<double> result(1.0, 0.0);
    while (e > 0) {
        if (e & 1) result *= base;
        base *= base;
        e >>= 1;
    }
    return result;
}

// ---- Adaptive quadrature ---------------------------------------------------

struct PanelEstimate {
    double value;
    double error;
};

template <typename F>
PanelEstimate gauss_kronrod_panel(const F& f, double a, double b) {
    // G7/K15 nodes and weights: {abscissa, Gauss weight, Kronrod weight}.
    static const double kNodes[8][3] = {
        {0.000000000000000, 0.417959183673469, 0.209482141084728},
        {0.405845151377397, 0.381830050505119, 0.190350578064785},
        {0.741531185599394, 0.279705391489277, 0.140653259715525},
        {0.949107912342759, 0.129484966168870, 0.063092092629979},
        {0.207784955007898, 0.0, 0.204432940075298},
        {0.586087235467691, 0.0, 0.169004726639267},
        {0.864864423359769, 0.0, 0.104790010322250},
        {0.991455371120813, 0.0, 0.022935322010529},
    };
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double f0 = f(center);
    double g7 = kNodes[0][1] * f0;
    double k15 = kNodes[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        double dx = half * kNodes[i][0];
        double fi = f(center + dx) + f(center - dx);
        g7 += kNodes[i][1] * fi;
        k15 += kNodes[i][2] * fi;
    }
    g7 *= half;
    k15 *= half;
    return {k15, std::abs(k15 - g7)};
}

template <typename F>
PanelEstimate simpson_panel(const F& f, double a, double b) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
    const double s1 = (fa + 4.0 * fm + fb) * (b - a) / 6.0;
    const double s2 =
        (fa + 4.0 * fl + fm) * (b - a) / 12.0 + (fm + 4.0 * fr + fb) * (b - a) / 12.0;
    const double correction = (s2 - s1) / 15.0;
    return {s2 + correction, std::abs(correction)};
}

template <typename F>
double adaptive_integral(const F& f, double a, double b, double tolerance, PanelRule rule,
                         const char* context) {
    struct Panel {
        double a, b, tol;
        int depth;
    };

    constexpr int kMaxPanels = 200000;
    // Never accept a panel before a few bisections; a wide panel can fool the
    // embedded error estimate on oscillatory integrands.
    constexpr int kMinDepth = 3;
    const double min_width = 1e-13 * (b - a);

    std::vector<Panel> stack;
    stack.push_back({a, b, tolerance, 0});
    KahanSum total;
    int evaluated = 0;

    while (!stack.empty()) {
        Panel panel = stack.back();
        stack.pop_back();
        if (++evaluated > kMaxPanels) {
            std::ostringstream msg;
            msg << context << ": quadrature did not reach tolerance " << tolerance << " on ["
                << a << ", " << b << "] within " << kMaxPanels << " panel evaluations";
            throw QuadratureError(msg.str());
        }

        PanelEstimate est = (rule == PanelRule::GaussKronrod)
                                ? gauss_kronrod_panel(f, panel.a, panel.b)
                                : simpson_panel(f, panel.a, panel.b);

        if (panel.depth >= kMinDepth && est.error <= panel.tol) {
            total.add(est.value);
            continue;
        }
        if (panel.b - panel.a <= min_width) {
            if (std::isfinite(est.value)) {
                std::ostringstream msg;
                msg << context << ": panel [" << panel.a << ", " << panel.b
                    << "] stalled at error estimate " << est.error << " (local tolerance "
                    << panel.tol << ")";
                throw QuadratureError(msg.str());
            }
            std::ostringstream msg;
            msg << context << ": integrand is not finite near t = " << 0.5 * (panel.a + panel.b);
            throw QuadratureError(msg.str());
        }
        double mid = 0.5 * (panel.a + panel.b);
        stack.push_back({panel.a, mid, 0.5 * panel.tol, panel.depth + 1});
        stack.push_back({mid, panel.b, 0.5 * panel.tol, panel.depth + 1});
    }
    return total.value();
}

// Folds Int_0^inf f(t)/t^2 dt onto [0, 2*pi] for a 2*pi-periodic numerator f,
// and regularizes the removable singularity at t = 0: below the cutoff the
// ratio f(t)/t^2 is replaced by its limit, estimated from f itself by one
// Richardson step.
template <typename F>
double folded_zolotarev_integral(const F& f, const QuadratureConfig& config, const char* context) {
    if (!(config.abs_tolerance > 0.0)) {
        throw DomainError("QuadratureConfig: abs_tolerance must be positive");
    }
    if (config.fold_terms < 1) throw DomainError("QuadratureConfig: fold_terms must be >= 1");

    const double h = 3e-5;
    const double phi1 = f(h) / (h * h);
    const double phi2 = f(2.0 * h) / (4.0 * h * h);
    const double limit = std::max(0.0, (4.0 * phi1 - phi2) / 3.0);
    const double cutoff = 1e-6;
    const int fold_terms = config.fold_terms;

    auto integrand = [&](double t) {
        double phi = (t < cutoff) ? limit : f(t) / (t * t);
        return phi * (1.0 + t * t * periodic_kernel_remainder(t, fold_terms));
    };

    const double integral_tol = config.abs_tolerance * (kPi / 2.0);
    double integral =
        adaptive_integral(integrand, 0.0, kTwoPi, integral_tol, config.panel_rule, context);
    return (2.0 / kPi) * integral;
}

GapBound bound_from_terms(double small_mass, double large_separation, double clt) {
    GapBound bound;
    if (small_mass <= large_separation && small_mass <= clt) {
        bound.value = small_mass;
        bound.regime = GapRegime::SmallMass;
    } else if (large_separation <= clt) {
        bound.value = large_separation;
        bound.regime = GapRegime::LargeSeparation;
    } else {
        bound.value = clt;
        bound.regime = GapRegime::CltRegime;
    }
    return bound;
}

}  // namespace

const char* to_string(GapRegime regime) {
    switch (regime) {
        case GapRegime::SmallMass: return "small-mass";
        case GapRegime::LargeSeparation: return "large-separation";
        case GapRegime::CltRegime: return "clt";
    }
    return "unknown";
}

// ---- Characteristic functions ----------------------------------------------

std::complex<double> cf_binomial(std::int64_t n, double p, double t) {
    if (n < 0) throw DomainError("cf_binomial: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("cf_binomial: p must be in [0,1]");
    std::complex<double> base(1.0 - p * (1.0 - std::cos(t)), p * std::sin(t));
    return cpow_int(base, static_cast<std::uint64_t>(n));
}

std::complex<double> cf_poisson(double lambda, double t) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("cf_poisson: lambda must be finite and >= 0");
    }
    return std::polar(std::exp(lambda * (std::cos(t) - 1.0)), lambda * std::sin(t));
}

CharacteristicFn make_binomial_cf(std::int64_t n, double p) {
    if (n < 0) throw DomainError("make_binomial_cf: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("make_binomial_cf: p must be in [0,1]");
    return [n, p](double t) { return cf_binomial(n, p, t); };
}

CharacteristicFn make_poisson_cf(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("make_poisson_cf: lambda must be finite and >= 0");
    }
    return [lambda](double t) { return cf_poisson(lambda, t); };
}

CfPolar cf_polar_binomial(double p, double t) {
    if (!(p >= 0.0 && p <= 0.25)) throw DomainError("cf_polar_binomial: p must be in [0, 1/4]");
    if (!(t >= 0.0 && t <= kPi)) throw DomainError("cf_polar_binomial: t must be in [0, pi]");
    const double re = 1.0 - p * (1.0 - std::cos(t));
    const double im = p * std::sin(t);
    CfPolar polar;
    polar.modulus = std::hypot(re, im);
    polar.argument = std::asin(im / polar.modulus);
    return polar;
}

// ---- Exact gaps -------------------------------------------------------------

std::vector<double> binomial_pmf(std::int64_t n, double p) {
    if (n < 0) throw DomainError("binomial_pmf: n must be >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_pmf: p must be in [0,1]");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (p == 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (p == 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    const double log_p = std::log(p);
    const double log_1mp = std::log1p(-p);
    const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::int64_t x = 0; x <= n; ++x) {
        double lg = lgn - std::lgamma(static_cast<double>(x) + 1.0) -
                    std::lgamma(static_cast<double>(n - x) + 1.0);
        pmf[static_cast<std::size_t>(x)] =
            std::exp(lg + static_cast<double>(x) * log_p + static_cast<double>(n - x) * log_1mp);
    }
    return pmf;
}

std::vector<double> poisson_pmf_truncated(double lambda, double tail_tolerance) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("poisson_pmf_truncated: lambda must be finite and >= 0");
    }
    if (!(tail_tolerance > 0.0)) {
        throw DomainError("poisson_pmf_truncated: tail tolerance must be positive");
    }
    if (lambda == 0.0) return {1.0};

    const double log_lambda = std::log(lambda);
    const std::int64_t cap =
        static_cast<std::int64_t>(lambda + 15.0 * std::sqrt(lambda + 1.0) + 200.0);
    std::vector<double> pmf;
    pmf.reserve(64);
    double tail = 1.0;  // complemented CDF: P(X > x)
    for (std::int64_t x = 0; x <= cap; ++x) {
        double value = std::exp(static_cast<double>(x) * log_lambda - lambda -
                                std::lgamma(static_cast<double>(x) + 1.0));
        pmf.push_back(value);
        tail -= value;
        if (tail < tail_tolerance) break;
    }
    return pmf;
}

double abs_mean_difference(const std::vector<double>& pmf_a, const std::vector<double>& pmf_b) {
    KahanSum sum;
    for (std::size_t i = 0; i < pmf_a.size(); ++i) {
        const double wi = pmf_a[i];
        if (wi == 0.0) continue;
        for (std::size_t j = 0; j < pmf_b.size(); ++j) {
            double d = static_cast<double>(i > j ? i - j : j - i);
            sum.add(wi * pmf_b[j] * d);
        }
    }
    return sum.value();
}

double exact_gap_binomial(std::int64_t n, double p, double q) {
    if (n < 1) throw DomainError("exact_gap_binomial: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw DomainError("exact_gap_binomial: p, q must be in [0,1]");
    }
    const std::vector<double> pmf_p = binomial_pmf(n, p);
    const std::vector<double> pmf_q = binomial_pmf(n, q);
    return 2.0 * abs_mean_difference(pmf_p, pmf_q) - abs_mean_difference(pmf_p, pmf_p) -
           abs_mean_difference(pmf_q, pmf_q);
}

double exact_gap_poisson(double mu, double lambda) {
    if (!(mu >= 0.0) || !std::isfinite(mu) || !(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("exact_gap_poisson: mu, lambda must be finite and >= 0");
    }
    const std::vector<double> pmf_mu = poisson_pmf_truncated(mu);
    const std::vector<double> pmf_lambda = poisson_pmf_truncated(lambda);
    return 2.0 * abs_mean_difference(pmf_mu, pmf_lambda) -
           abs_mean_difference(pmf_mu, pmf_mu) - abs_mean_difference(pmf_lambda, pmf_lambda);
}

// ---- Zolotarev integrals -----------------------------------------------------

double periodic_kernel_remainder(double t, int fold_terms) {
    if (fold_terms < 1) throw DomainError("periodic_kernel_remainder: fold_terms must be >= 1");
    if (!(t >= 0.0 && t <= kTwoPi)) {
        throw DomainError("periodic_kernel_remainder: t must be in [0, 2*pi]");
    }
    double sum = 0.0;
    for (int j = fold_terms - 1; j >= 1; --j) {
        double denom = t + kTwoPi * static_cast<double>(j);
        sum += 1.0 / (denom * denom);
    }
    // Euler-Maclaurin tail for j >= fold_terms, exact to ~1e-16 at J = 64.
    const double a = t + kTwoPi * static_cast<double>(fold_terms);
    const double inv_a = 1.0 / a;
    const double inv_a2 = inv_a * inv_a;
    sum += inv_a / kTwoPi + 0.5 * inv_a2 + (kPi / 3.0) * inv_a2 * inv_a -
           (kTwoPi * kTwoPi * kTwoPi / 30.0) * inv_a2 * inv_a2 * inv_a;
    return sum;
}

double zolotarev_abs_mean(const CharacteristicFn& cf, const QuadratureConfig& config) {
    auto f = [&cf](double t) { return 1.0 - cf(t).real(); };
    return folded_zolotarev_integral(f, config, "zolotarev_abs_mean");
}

double zolotarev_gap(const CharacteristicFn& cf_u, const CharacteristicFn& cf_v,
                     const QuadratureConfig& config) {
    auto f = [&cf_u, &cf_v](double t) { return std::norm(cf_u(t) - cf_v(t)); };
    return folded_zolotarev_integral(f, config, "zolotarev_gap");
}

// ---- Closed-form bounds ------------------------------------------------------

GapBound lower_bound_binomial_with(const BoundCoefficients& coeffs, std::int64_t n, double p,
                                   double q) {
    if (n < 16) throw DomainError("lower_bound_binomial: n must be >= 16");
    if (!(p >= 0.0 && p <= 0.25) || !(q >= 0.0 && q <= 0.25)) {
        throw DomainError("lower_bound_binomial: p, q must be in [0, 1/4]");
    }
    const double dn = static_cast<double>(n);
    const double diff = dn * (p - q);
    const double small_mass = coeffs.small_mass * diff * diff;
    const double large_separation = coeffs.large_separation * dn * std::abs(p - q);
    const double clt =
        (p + q > 0.0) ? coeffs.clt * diff * diff / std::sqrt(dn * (p + q)) : kInf;
    return bound_from_terms(small_mass, large_separation, clt);
}

GapBound lower_bound_binomial(std::int64_t n, double p, double q) {
    return lower_bound_binomial_with(kBinomialBoundCoefficients, n, p, q);
}

GapBound lower_bound_poisson_with(const BoundCoefficients& coeffs, double mu, double lambda) {
    if (!(mu >= 0.0) || !std::isfinite(mu) || !(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lower_bound_poisson: mu, lambda must be finite and >= 0");
    }
    const double diff = mu - lambda;
    const double small_mass = coeffs.small_mass * diff * diff;
    const double large_separation = coeffs.large_separation * std::abs(diff);
    const double clt = (mu + lambda > 0.0) ? coeffs.clt * diff * diff / std::sqrt(mu + lambda)
                                           : kInf;
    return bound_from_terms(small_mass, large_separation, clt);
}

GapBound lower_bound_poisson(double mu, double lambda) {
    return lower_bound_poisson_with(kPoissonBoundCoefficients, mu, lambda);
}

ArgumentBoundsCheck cf_argument_bounds_check(std::int64_t n, double p, double q, double t) {
    if (n < 1) throw DomainError("cf_argument_bounds_check: n must be >= 1");
    if (!(p >= 0.0 && p <= 0.25) || !(q >= 0.0 && q <= 0.25)) {
        throw DomainError("cf_argument_bounds_check: p, q must be in [0, 1/4]");
    }
    if (!(t > 0.0 && t <= kPi)) throw DomainError("cf_argument_bounds_check: t must be in (0, pi]");

    const double theta = cf_polar_binomial(p, t).argument;
    const double eta = cf_polar_binomial(q, t).argument;
    const double dn = 2.0 * static_cast<double>(n);

    ArgumentBoundsCheck check;
    check.lhs = dn * std::abs(theta - eta);
    check.lower = dn * std::abs(p - q) * std::sin(t);
    check.upper = 7.0 * dn * std::abs(p - q) * t;
    const bool lower_ok = (p == q) ? (check.lhs >= check.lower) : (check.lhs > check.lower);
    check.ok = lower_ok && check.lhs <= check.upper;
    return check;
}

PerSymbolBound per_symbol_gap_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                 std::int64_t n) {
    if (p.size() != q.size()) throw DimensionError("per_symbol_gap_bound: domain sizes differ");
    if (n < 16) throw DomainError("per_symbol_gap_bound: n must be >= 16");
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.probs()[i] > 0.25 + 1e-12 || q.probs()[i] > 0.25 + 1e-12) {
            throw DomainError("per_symbol_gap_bound: entries must be <= 1/4 (flatten first)");
        }
    }

    const double dn = static_cast<double>(n);
    PerSymbolBound result;
    KahanSum sum;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p.probs()[i] - q.probs()[i];
        const double nd_abs = dn * std::abs(d);
        const double nd_sq = (dn * d) * (dn * d);
        const double mass = dn * (p.probs()[i] + q.probs()[i]);
        const double clt_u = mass > 0.0 ? nd_sq / std::sqrt(mass) : kInf;

        sum.add(std::min({nd_abs / 8.0, nd_sq / 16.0,
                          mass > 0.0 ? nd_sq / (40.0 * std::sqrt(mass)) : kInf}));

        const std::uint32_t symbol = static_cast<std::uint32_t>(i) + 1;
        if (nd_abs <= nd_sq && nd_abs <= clt_u) {
            result.s1.push_back(symbol);
        } else if (nd_sq <= clt_u) {
            result.s2.push_back(symbol);
        } else {
            result.s3.push_back(symbol);
        }
    }
    result.per_symbol_sum = sum.value() / dn;

    const double eps = tv_distance(p, q);
    const double k = static_cast<double>(p.size());
    result.closed_form_floor =
        (1.0 / 12.0) *
        std::min({eps, (eps * eps / 3.0) * (dn / k), (eps * eps / 11.0) * std::sqrt(dn / k)});
    return result;
}

bool csum_inequality_check(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionError("csum_inequality_check: lengths differ");
    if (a.empty()) throw DimensionError("csum_inequality_check: vectors must be nonempty");
    KahanSum lhs, abs_sum, b_sum;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(b[i] > 0.0)) throw DomainError("csum_inequality_check: b entries must be positive");
        lhs.add(a[i] * a[i] / b[i]);
        abs_sum.add(std::abs(a[i]));
        b_sum.add(b[i]);
    }
    const double rhs = abs_sum.value() * abs_sum.value() / b_sum.value();
    return lhs.value() >= rhs;
}

}  // namespace closetest
