#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "closetest/distributions.hpp"

namespace closetest {

// Polar form of a characteristic-function base point: modulus r(t) and
// argument theta(t) with r e^{i theta} = 1 - p + p e^{it}.
struct CfPolar {
    double modulus = 0.0;
    double argument = 0.0;
};

// Which term of the three-way minimum attains a closed-form gap bound.
enum class GapRegime { SmallMass, LargeSeparation, CltRegime };

const char* to_string(GapRegime regime);

struct GapBound {
    double value = 0.0;
    GapRegime regime = GapRegime::SmallMass;
};

// Coefficients of the three-term minimum, one per regime.  The defaults are
// the proven constants; the verification harness can inject corrupted values
// to confirm the grid checkers actually bite.
struct BoundCoefficients {
    double small_mass;
    double large_separation;
    double clt;
};

inline constexpr BoundCoefficients kBinomialBoundCoefficients{1.0 / 8.0, 1.0 / 16.0, 1.0 / 40.0};
inline constexpr BoundCoefficients kPoissonBoundCoefficients{1.0 / 20.0, 1.0 / 5.0, 1.0 / 7.0};

enum class PanelRule { AdaptiveSimpson, GaussKronrod };

struct QuadratureConfig {
    double abs_tolerance = 1e-8;
    int fold_terms = 64;
    PanelRule panel_rule = PanelRule::GaussKronrod;
};

using CharacteristicFn = std::function<std::complex<double>(double)>;

// ---- Characteristic functions -------------------------------------------

// (1 - p + p e^{it})^n
std::complex<double> cf_binomial(std::int64_t n, double p, double t);

// e^{lambda (e^{it} - 1)}
std::complex<double> cf_poisson(double lambda, double t);

CharacteristicFn make_binomial_cf(std::int64_t n, double p);
CharacteristicFn make_poisson_cf(double lambda);

// Polar decomposition of 1 - p + p e^{it} for p in [0, 1/4], t in [0, pi]:
// modulus r(t) = sqrt((1 - p(1-cos t))^2 + p^2 sin^2 t) and argument
// arcsin(p sin t / r(t)).
CfPolar cf_polar_binomial(double p, double t);

// ---- Exact expectation gaps ----------------------------------------------

// Delta = E[|X-Y| + |X'-Y'| - |X-X'| - |Y-Y'|] with X,X' ~ Bin(n,p) and
// Y,Y' ~ Bin(n,q) mutually independent, by double summation over the
// (n+1)x(n+1) joint PMF grid of each pairwise term.
double exact_gap_binomial(std::int64_t n, double p, double q);

// Same four-term expectation with X,X' ~ Poisson(mu), Y,Y' ~ Poisson(lambda);
// each marginal truncated where its upper tail mass drops below 1e-12.
double exact_gap_poisson(double mu, double lambda);

// PMF helpers backing the exact gaps (log-space binomial evaluation;
// truncated Poisson via the complemented-CDF recurrence).
std::vector<double> binomial_pmf(std::int64_t n, double p);
std::vector<double> poisson_pmf_truncated(double lambda, double tail_tolerance = 1e-12);

// E|A - B| for independent A ~ pmf_a, B ~ pmf_b on {0, 1, ...}.
double abs_mean_difference(const std::vector<double>& pmf_a, const std::vector<double>& pmf_b);

// ---- Zolotarev integrals ---------------------------------------------------

// E|X| = (2/pi) * Int_0^inf (1 - Re cf(t)) / t^2 dt, for an integer-valued X
// with finite mean (so the integrand is 2*pi-periodic in its numerator).
double zolotarev_abs_mean(const CharacteristicFn& cf, const QuadratureConfig& config = {});

// Delta = (2/pi) * Int_0^inf |u(t) - v(t)|^2 / t^2 dt.
double zolotarev_gap(const CharacteristicFn& cf_u, const CharacteristicFn& cf_v,
                     const QuadratureConfig& config = {});

// sum_{j=1}^{J-1} (t + 2 pi j)^{-2} plus the analytic tail for j >= J
// (Euler-Maclaurin through the third derivative); i.e. the folded kernel
// sum_{j>=0} (t + 2 pi j)^{-2} minus its leading 1/t^2 term.
double periodic_kernel_remainder(double t, int fold_terms);

// ---- Closed-form lower bounds and grid checks ------------------------------

// min( (1/8) n^2 (p-q)^2, (1/16) n |p-q|, n^2 (p-q)^2 / (40 sqrt(n(p+q))) )
// for p, q in [0, 1/4] and n >= 16.  The third term is +infinity at p+q = 0.
GapBound lower_bound_binomial(std::int64_t n, double p, double q);
GapBound lower_bound_binomial_with(const BoundCoefficients& coeffs, std::int64_t n, double p,
                                   double q);

// min( (1/20)(mu-lambda)^2, (1/5)|mu-lambda|, (1/7)(mu-lambda)^2/sqrt(mu+lambda) )
GapBound lower_bound_poisson(double mu, double lambda);
GapBound lower_bound_poisson_with(const BoundCoefficients& coeffs, double mu, double lambda);

// Checks 2n|theta(t) - eta(t)| against its sine lower bound and linear upper
// bound.  The lower inequality is strict for p != q; at p = q all three
// quantities vanish and the check degrades to >=.
struct ArgumentBoundsCheck {
    double lhs = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool ok = false;
};

ArgumentBoundsCheck cf_argument_bounds_check(std::int64_t n, double p, double q, double t);

// Per-symbol assembly of the binomial gap bounds over a pair of
// distributions with all entries <= 1/4, plus the closed-form floor
// (1/12) min(eps, (eps^2/3)(n/k), (eps^2/11) sqrt(n/k)) evaluated at
// eps = tv_distance(p, q).
struct PerSymbolBound {
    double per_symbol_sum = 0.0;
    double closed_form_floor = 0.0;
    // 1-based symbol indices, partitioned by which unweighted term
    // (|n d|, (n d)^2, (n d)^2 / sqrt(n(p+q))) attains the minimum;
    // ties resolve to the earliest set.
    std::vector<std::uint32_t> s1;
    std::vector<std::uint32_t> s2;
    std::vector<std::uint32_t> s3;
};

PerSymbolBound per_symbol_gap_bound(const DiscreteDistribution& p, const DiscreteDistribution& q,
                                 std::int64_t n);

// sum_i a_i^2 / b_i >= (sum_i |a_i|)^2 / sum_i b_i for positive b.
bool csum_inequality_check(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace closetest
