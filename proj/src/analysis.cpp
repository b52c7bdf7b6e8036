#include "msond/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "msond/error.hpp"

namespace msond {

ShapeParams shape_params(std::size_t pairs, std::size_t streams)
{
    if (pairs < 1 || streams < 1) {
        throw InvalidArgument("shape_params: K and S must be >= 1");
    }
    const std::size_t sk = pairs * streams;
    return {2 * sk - streams - 1, 3 * sk - streams - 1};
}

namespace {

constexpr double kGammaTolerance = 1e-15;
constexpr int kGammaMaxIterations = 10000;

double gamma_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kGammaMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaTolerance) {
            break;
        }
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper tail Q(a, x) by modified Lentz on the Legendre continued fraction.
double gamma_continued_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaTolerance) {
            break;
        }
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_shape(std::size_t shape)
{
    if (shape < 1) {
        throw InvalidArgument("metric shape must be >= 1");
    }
}

}  // namespace

double regularized_gamma_p(double a, double x)
{
    if (!(a > 0.0)) {
        throw InvalidArgument("regularized_gamma_p: a must be positive");
    }
    if (std::isnan(x) || x < 0.0) {
        throw InvalidArgument("regularized_gamma_p: x must be non-negative");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (std::isinf(x)) {
        return 1.0;
    }
    if (x < a + 1.0) {
        return std::min(1.0, gamma_series(a, x));
    }
    return std::max(0.0, 1.0 - gamma_continued_fraction(a, x));
}

double cdf_metric(double l, std::size_t shape)
{
    check_shape(shape);
    if (std::isnan(l) || l < 0.0) {
        throw InvalidArgument("cdf_metric: l must be non-negative");
    }
    return regularized_gamma_p(static_cast<double>(shape), l);
}

double cdf_metric_chi2(double l, std::size_t shape)
{
    check_shape(shape);
    if (std::isnan(l) || l < 0.0) {
        throw InvalidArgument("cdf_metric_chi2: l must be non-negative");
    }
    return regularized_gamma_p(static_cast<double>(shape), l / 2.0);
}

CdfLowerBound cdf_lower_bound(double l, std::size_t shape)
{
    check_shape(shape);
    if (!(l > 0.0) || l > 2.0) {
        throw InvalidArgument("cdf_lower_bound: l must lie in (0, 2]");
    }
    const double a = static_cast<double>(shape);
    // gamma(a, x) >= x^a e^-x / a, applied at x = l/2 <= 1.
    const double constant = std::exp(-1.0 - a * std::log(2.0) - std::lgamma(a + 1.0));
    const double variant = std::exp(-1.0 + a * std::log(2.0) - std::lgamma(a));
    const double la = std::pow(l, a);
    return {constant, constant * la, variant, variant * la};
}

double inverse_cdf(double p, std::size_t shape)
{
    check_shape(shape);
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgument("inverse_cdf: p must lie in (0, 1)");
    }
    double lo = 0.0;
    double hi = 1.0;
    while (cdf_metric(hi, shape) < p) {
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 200 && hi - lo > std::numeric_limits<double>::epsilon() * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf_metric(mid, shape) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double prob_exactly_sk(std::size_t relays, std::size_t pairs, std::size_t streams, double eps)
{
    const std::size_t sk = pairs * streams;
    if (relays < sk) {
        throw InvalidArgument("prob_exactly_sk: N=" + std::to_string(relays) + " < SK=" + std::to_string(sk));
    }
    if (!(eps > 0.0)) {
        throw InvalidArgument("prob_exactly_sk: eps must be positive");
    }
    const double f = cdf_metric(eps, shape_params(pairs, streams).stage2);
    const std::size_t rest = relays - sk;
    if (f <= 0.0) {
        return 0.0;
    }
    if (f >= 1.0) {
        return rest == 0 ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(relays);
    const double m = static_cast<double>(sk);
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
    return std::exp(log_binom + m * std::log(f) + static_cast<double>(rest) * std::log1p(-f));
}

double inverse_til_bound(std::size_t relays, std::size_t pairs, std::size_t streams)
{
    const std::size_t sk = pairs * streams;
    if (relays < sk) {
        throw InvalidArgument("inverse_til_bound: N < SK");
    }
    const std::size_t a2 = shape_params(pairs, streams).stage2;
    const double c2 = cdf_lower_bound(1.0, a2).constant;
    const double m = static_cast<double>(sk);
    return std::pow(c2 * static_cast<double>(relays) / m, 1.0 / static_cast<double>(a2)) * std::pow(m, -m) *
           std::exp(-m);
}

RelayRequirement required_relays(double snr, std::size_t pairs, std::size_t streams, Mode mode)
{
    if (!(snr > 0.0) || !std::isfinite(snr)) {
        throw InvalidArgument("required_relays: snr must be positive and finite");
    }
    const ShapeParams shapes = shape_params(pairs, streams);
    const std::size_t exponent = mode == Mode::alternate ? shapes.stage2 : shapes.stage1;
    const double value = std::pow(snr, static_cast<double>(exponent));
    constexpr double limit = 18446744073709549568.0;  // largest double below 2^64
    if (!std::isfinite(value) || value > limit) {
        return {std::numeric_limits<std::uint64_t>::max(), true};
    }
    const double nearest = std::round(value);
    const double count = std::abs(value - nearest) <= 1e-9 * std::max(1.0, value) ? nearest : std::ceil(value);
    return {static_cast<std::uint64_t>(std::max(1.0, count)), false};
}

double til_order_statistic(const RelaySet& pi2, const MetricTable& stage2)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < pi2.pairs(); ++k) {
        for (std::size_t s = 0; s < pi2.streams(); ++s) {
            worst = std::max(worst, stage2(pi2.relay(k, s), k, s));
        }
    }
    return worst;
}

double mean_selected_til(const RelaySet& pi2, const MetricTable& stage2)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < pi2.pairs(); ++k) {
        for (std::size_t s = 0; s < pi2.streams(); ++s) {
            acc += stage2(pi2.relay(k, s), k, s);
        }
    }
    return acc / static_cast<double>(pi2.size());
}

namespace {

struct LineFit {
    double slope;
    double intercept;
    double r2;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y)
{
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (intercept + slope * x[i]);
        ss_res += e * e;
    }
    const double r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return {slope, intercept, r2};
}

}  // namespace

DecayFit fit_decay(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 4) {
        throw InvalidArgument("fit_decay: need at least 4 points, got " + std::to_string(points.size()));
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [n, mean] : points) {
        if (!(n > 0.0) || !(mean > 0.0)) {
            throw InvalidArgument("fit_decay: N and mean must be positive");
        }
        x.push_back(std::log(n));
        y.push_back(std::log(mean));
    }
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("fit_decay: N values must be distinct");
    }
    const LineFit fit = least_squares(x, y);
    return {fit.slope, fit.intercept, fit.r2};
}

double estimate_dof(std::span<const std::pair<double, double>> curve)
{
    if (curve.size() < 2) {
        throw InvalidArgument("estimate_dof: need at least 2 points");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& [snr, rate] : curve) {
        if (!(snr > 0.0)) {
            throw InvalidArgument("estimate_dof: snr must be positive");
        }
        lo = std::min(lo, snr);
        hi = std::max(hi, snr);
    }
    if (hi < 100.0 * lo * (1.0 - 1e-12)) {
        throw InvalidArgument("estimate_dof: snr grid spans less than 20 dB");
    }
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [snr, rate] : curve) {
        if (snr >= hi / 10.0 * (1.0 - 1e-12)) {
            x.push_back(std::log2(snr));
            y.push_back(rate);
        }
    }
    if (x.size() < 2) {
        throw InvalidArgument("estimate_dof: fewer than 2 points in the top decade of the grid");
    }
    return least_squares(x, y).slope;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty()) {
        throw InvalidArgument("ks_distance: no samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return worst;
}

}  // namespace msond
