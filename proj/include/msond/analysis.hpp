#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "msond/channel.hpp"
#include "msond/selection.hpp"

namespace msond {

/// Number of unit-mean exponential terms in the two scheduling metrics.
struct ShapeParams {
    std::size_t stage1;  // 2SK - S - 1
    std::size_t stage2;  // 3SK - S - 1 (TIL)
};

ShapeParams shape_params(std::size_t pairs, std::size_t streams);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Series below x = a + 1, continued fraction above.
double regularized_gamma_p(double a, double x);

/// CDF of a sum of `shape` i.i.d. unit-mean exponentials (Gamma(shape, 1)),
/// which is what the simulated metrics follow with E|h|^2 = 1.
double cdf_metric(double l, std::size_t shape);

/// Same family in the chi-square convention, P(shape, l/2), where every
/// term has mean 2. Kept for cross-checking constants.
double cdf_metric_chi2(double l, std::size_t shape);

struct CdfLowerBound {
    double constant;          // e^-1 2^-a / Gamma(a+1)
    double bound;             // constant * l^a, <= cdf_metric(l, a)
    double variant_constant;  // e^-1 2^a / Gamma(a); not a bound for small a
    double variant_bound;     // variant_constant * l^a; may exceed 1
};

/// Power-law lower bound on the metric CDF for 0 < l <= 2.
CdfLowerBound cdf_lower_bound(double l, std::size_t shape);

/// l with cdf_metric(l, shape) = p, by bisection on a doubling bracket.
double inverse_cdf(double p, std::size_t shape);

/// Probability that exactly SK of N relays have TIL <= eps:
/// C(N, SK) F^SK (1 - F)^(N - SK), F = cdf_metric(eps, 3SK - S - 1).
double prob_exactly_sk(std::size_t relays, std::size_t pairs, std::size_t streams, double eps);

/// (C N / SK)^(1/a2) (SK)^-SK e^-SK, C the cdf_lower_bound constant. Lower
/// bound on E[1 / L_SK-th]; grows as N^(1/a2).
double inverse_til_bound(std::size_t relays, std::size_t pairs, std::size_t streams);

struct RelayRequirement {
    std::uint64_t count;
    bool saturated;  // snr^a did not fit in 64 bits
};

/// ceil(snr^(3SK-S-1)) for alternate relaying, ceil(snr^(2SK-S-1)) without.
RelayRequirement required_relays(double snr, std::size_t pairs, std::size_t streams, Mode mode);

/// TIL of the last relay admitted to Pi2, i.e. the largest selected TIL.
double til_order_statistic(const RelaySet& pi2, const MetricTable& stage2);

/// Mean TIL over all SK relays of Pi2.
double mean_selected_til(const RelaySet& pi2, const MetricTable& stage2);

struct DecayFit {
    double slope;
    double intercept;
    double r2;
};

/// Least squares of log(mean) against log(N).
DecayFit fit_decay(std::span<const std::pair<double, double>> points);

/// Slope of mean sum-rate against log2(snr) over the top decade of the grid.
/// Points are (linear snr, mean sum-rate); the grid must span >= 20 dB.
double estimate_dof(std::span<const std::pair<double, double>> curve);

/// Kolmogorov-Smirnov distance between the samples and a reference CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace msond
