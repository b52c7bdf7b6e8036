// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Lines starting with "info" are context, never verdicts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "msond/analysis.hpp"
#include "msond/error.hpp"
#include "msond/experiments.hpp"
#include "msond/selection.hpp"
#include "msond/transmission.hpp"
#include "oracles.hpp"

using namespace msond;

namespace {

constexpr std::size_t kTrials = 10000;
constexpr std::size_t kDistSamples = 100000;
const std::vector<double> kRelayGrid{25, 50, 100, 200, 400, 800};

int failures = 0;

void verdict(int id, bool pass, const std::string& title, std::string detail)
{
    while (!detail.empty() && (detail.back() == ' ' || detail.back() == ';')) {
        detail.pop_back();
    }
    std::printf("%s  %2d  %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) {
        ++failures;
    }
}

void info(const std::string& text)
{
    std::printf("info    %s\n", text.c_str());
    std::fflush(stdout);
}

std::string num(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

NetworkConfig network(std::size_t k, std::size_t s, std::size_t n)
{
    NetworkConfig cfg;
    cfg.pairs = k;
    cfg.streams = s;
    cfg.relays = n;
    cfg.antennas = 4;
    return cfg;
}

ExperimentSpec spec_for(ExperimentKind kind, const NetworkConfig& base, std::vector<double> sweep,
                        std::vector<Mode> modes, std::size_t trials = kTrials)
{
    ExperimentSpec spec;
    spec.kind = kind;
    spec.base = base;
    spec.sweep = std::move(sweep);
    spec.modes = std::move(modes);
    spec.trials = trials;
    spec.seed = 20240601;
    return spec;
}

/// Mean sum-rate per sweep value for one mode, in sweep order.
std::vector<double> rates_of(const SweepResult& r, Mode mode)
{
    std::vector<double> out;
    for (const SweepPoint& p : r.points) {
        if (p.mode == mode) {
            out.push_back(p.mean_sum_rate);
        }
    }
    return out;
}

/// First sweep value where a - b changes sign, linearly interpolated.
std::optional<double> crossing(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b)
{
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double d0 = a[i - 1] - b[i - 1];
        const double d1 = a[i] - b[i];
        if ((d0 > 0.0) != (d1 > 0.0)) {
            return x[i - 1] + (x[i] - x[i - 1]) * d0 / (d0 - d1);
        }
    }
    return std::nullopt;
}

std::vector<double> range(double first, double last, double step)
{
    std::vector<double> out;
    for (double v = first; v <= last + 1e-9; v += step) {
        out.push_back(v);
    }
    return out;
}

struct TilRun {
    std::size_t k;
    std::size_t s;
    double target;
    double tolerance;
    SweepResult result;
};

std::vector<TilRun> criterion_til_slopes()
{
    std::vector<TilRun> runs{{2, 1, -1.0 / 4.0, 0.05, {}}, {3, 1, -1.0 / 7.0, 0.05, {}}, {2, 2, -1.0 / 9.0, 0.04, {}}};
    bool all = true;
    std::string detail;
    for (TilRun& run : runs) {
        run.result = run_experiment(
            spec_for(ExperimentKind::til_decay, network(run.k, run.s, 200), kRelayGrid, {Mode::alternate}));
        std::vector<std::pair<double, double>> points;
        for (const SweepPoint& p : run.result.points) {
            points.emplace_back(p.value, p.mean_til_last);
        }
        const double slope = fit_decay(points).slope;
        const bool ok = std::abs(slope - run.target) <= run.tolerance;
        all = all && ok;
        detail += "(K,S)=(" + std::to_string(run.k) + "," + std::to_string(run.s) + ") slope " + num(slope) +
                  " vs " + num(run.target) + "+-" + num(run.tolerance) + (ok ? "" : " [out]") + "; ";

        // Exact finite-N reference: the SK/N quantile of the TIL law.
        const std::size_t a2 = shape_params(run.k, run.s).stage2;
        std::vector<std::pair<double, double>> quantiles;
        for (double n : kRelayGrid) {
            quantiles.emplace_back(n, inverse_cdf(static_cast<double>(run.k * run.s) / n, a2));
        }
        info("(K,S)=(" + std::to_string(run.k) + "," + std::to_string(run.s) + "): slope of the Gamma(" +
             std::to_string(a2) + ") SK/N quantile over the same N grid is " + num(fit_decay(quantiles).slope) +
             "; asymptotic value " + num(-1.0 / static_cast<double>(a2)));
    }
    verdict(1, all, "TIL decay slopes", detail);
    return runs;
}

void criterion_distributions()
{
    bool all = true;
    std::string detail;
    for (auto [k, s] : {std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}}) {
        ExperimentSpec spec = spec_for(ExperimentKind::dist_check, network(k, s, 4 * k * s), {}, {Mode::alternate},
                                       kDistSamples);
        const SweepResult r = run_experiment(spec);
        for (const DistCheckRow& row : r.dist) {
            const bool ok = row.ks_distance < 0.01;
            all = all && ok;
            detail += "(" + std::to_string(k) + "," + std::to_string(s) + ") " + row.stage + " a=" +
                      std::to_string(row.shape) + " KS " + num(row.ks_distance, 3) + "; ";
        }
    }
    verdict(2, all, "metric distributions vs Gamma(a,1), KS < 0.01 at 1e5", detail);
}

void criterion_cdf_bound()
{
    std::size_t violations = 0;
    for (std::size_t a = 2; a <= 12; ++a) {
        for (int i = 1; i <= 200; ++i) {
            const double l = 0.01 * i;
            if (cdf_lower_bound(l, a).bound > cdf_metric(l, a)) {
                ++violations;
            }
        }
    }
    const CdfLowerBound at2 = cdf_lower_bound(2.0, 2);
    const double cdf = cdf_metric(2.0, 2);
    const bool variant_flagged = at2.variant_bound > cdf;
    verdict(3, violations == 0 && variant_flagged, "power-law lower bound on the metric CDF",
            std::to_string(violations) + " violations on 200-point grid x a=2..12; variant constant " +
                num(at2.variant_constant) + " gives " + num(at2.variant_bound) + " > CDF " + num(cdf) +
                " at l=2, a=2 (flagged: " + (variant_flagged ? "yes" : "no") + ")");
}

void criterion_count_peak()
{
    bool all = true;
    std::string detail;
    for (auto [k, s, n] : {std::tuple{2, 1, 50}, std::tuple{2, 2, 200}}) {
        const std::size_t sk = k * s;
        const double eps_hat = inverse_cdf(static_cast<double>(sk) / n, shape_params(k, s).stage2);
        double best_eps = 0.0;
        double best = -1.0;
        // Uniform grid in eps, independent of eps_hat.
        constexpr int points = 20000;
        for (int i = 1; i <= points; ++i) {
            const double eps = 20.0 * i / points;
            const double p = prob_exactly_sk(n, k, s, eps);
            if (p > best) {
                best = p;
                best_eps = eps;
            }
        }
        const double rel = std::abs(best_eps - eps_hat) / eps_hat;
        all = all && rel <= 0.01;
        detail += "(" + std::to_string(k) + "," + std::to_string(s) + "," + std::to_string(n) + ") eps_hat " +
                  num(eps_hat, 6) + " grid argmax " + num(best_eps, 6) + " rel " + num(rel, 2) + "; ";
    }
    verdict(4, all, "P(exactly SK below eps) peaks at the SK/N quantile", detail);
}

void criterion_ar_nar()
{
    const std::vector<double> grid = range(10.0, 30.0, 1.0);
    const SweepResult r = run_experiment(
        spec_for(ExperimentKind::rate_vs_snr, network(2, 1, 200), grid, {Mode::alternate, Mode::non_alternate}));
    const auto ar = rates_of(r, Mode::alternate);
    const auto nar = rates_of(r, Mode::non_alternate);
    const auto at = [&](const std::vector<double>& v, double db) {
        return v[static_cast<std::size_t>(std::lround(db - grid.front()))];
    };
    const auto cross = crossing(grid, ar, nar);
    const bool low = at(ar, 15) > at(nar, 15);
    const bool high = at(nar, 30) > at(ar, 30);
    const bool window = cross && *cross >= 14.0 && *cross <= 20.0;
    verdict(5, low && high && window, "alternate vs non-alternate crossover",
            "15 dB AR " + num(at(ar, 15)) + " NAR " + num(at(nar, 15)) + "; 30 dB AR " + num(at(ar, 30)) + " NAR " +
                num(at(nar, 30)) + "; crossover " + (cross ? num(*cross, 3) + " dB" : std::string("none")) +
                " (window [14, 20])");
}

void criterion_required_relays()
{
    const RelayRequirement r = required_relays(5.0, 2, 1, Mode::alternate);
    verdict(6, r.count == 625 && !r.saturated, "relays needed at snr 5 (linear), K=2, S=1, alternate",
            std::to_string(r.count) + " (expected 625)");
}

void criterion_selection_oracle()
{
    Rng rng(7);
    std::uniform_int_distribution<std::size_t> pick_k(1, 3);
    std::uniform_int_distribution<std::size_t> pick_s(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> level(0, 4);
    std::size_t mismatches = 0;
    constexpr int tables = 10000;
    for (int t = 0; t < tables; ++t) {
        std::size_t k = pick_k(rng);
        std::size_t s = pick_s(rng);
        while (k * s > 12) {
            s = pick_s(rng);
        }
        std::uniform_int_distribution<std::size_t> pick_n(k * s, 12);
        const std::size_t n = pick_n(rng);
        const bool coarse = t % 3 == 0;  // many exact ties
        MetricTable table(n, k, s);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                for (std::size_t q = 0; q < s; ++q) {
                    table(i, j, q) = coarse ? level(rng) : unit(rng);
                }
            }
        }
        std::vector<std::size_t> excluded;
        for (std::size_t i = 0; i < n && n - excluded.size() > k * s; ++i) {
            if (unit(rng) < 0.2) {
                excluded.push_back(i);
            }
        }
        if (!(select_set(table, excluded, k, s) == oracle::timer_replay(table, excluded, k, s))) {
            ++mismatches;
        }
    }
    verdict(7, mismatches == 0, "greedy selection vs message-level timer replay",
            std::to_string(mismatches) + " mismatches over " + std::to_string(tables) + " tables (N <= 12)");
}

void criterion_zf_and_decomposition()
{
    Rng rng(8);
    double worst_zf = 0.0;
    double worst_term = 0.0;
    std::size_t trials = 0;
    std::size_t discarded = 0;
    for (auto [k, s] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 1}, std::pair{2, 2}, std::pair{1, 3}}) {
        const NetworkConfig cfg = network(k, s, 4 * k * s + 3);
        for (Mode mode : {Mode::alternate, Mode::non_alternate, Mode::full_duplex}) {
            for (int t = 0; t < 200; ++t) {
                ++trials;
                const auto beams = make_beam_configs(cfg, rng);
                const ChannelRealization chan = draw_block(cfg, rng);
                const RelayAssignment a = run_selection(chan, beams, cfg, mode).assignment;
                const std::size_t sets = mode == Mode::alternate ? 2 : 1;
                try {
                    for (std::size_t b = 0; b < sets; ++b) {
                        const RelaySet& set = b == 0 ? a.pi1 : *a.pi2;
                        for (std::size_t j = 0; j < cfg.pairs; ++j) {
                            const ComplexMatrix& u = beams[j].signal;
                            const ComplexMatrix f = zf_equalizer(u, chan, set, j);
                            std::vector<CVector> cols;
                            for (std::size_t q = 0; q < cfg.streams; ++q) {
                                cols.push_back(project_signal(u, chan.hop2(j, set.relay(j, q))));
                            }
                            worst_zf = std::max(worst_zf, max_abs_identity_error(
                                                              f.adjoint() * ComplexMatrix::from_columns(cols, cfg.streams)));
                            for (std::size_t q = 0; q < cfg.streams; ++q) {
                                const Hop1Terms want = hop1_terms(chan, beams, a, mode, b, j, q);
                                const Hop1Terms got = oracle::measured_hop1(chan, beams, a, mode, b, j, q);
                                const auto rel = [](double x, double y) {
                                    return std::abs(x - y) / std::max(1.0, std::abs(y));
                                };
                                worst_term = std::max({worst_term, rel(got.desired, want.desired),
                                                       rel(got.other_beams, want.other_beams),
                                                       rel(got.other_sources, want.other_sources),
                                                       rel(got.inter_relay, want.inter_relay)});
                            }
                        }
                    }
                } catch (const SingularMatrix&) {
                    ++discarded;
                }
            }
        }
    }
    verdict(8, worst_zf <= 1e-9 && worst_term <= 1e-10, "ZF identity and hop-1 term decomposition",
            std::to_string(trials) + " trials (" + std::to_string(discarded) + " singular); max |F^H A - I| " +
                num(worst_zf, 3) + " (<= 1e-9); max term error " + num(worst_term, 3) + " (<= 1e-10)");
}

bool non_decreasing(const std::vector<double>& v)
{
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return b < a; }) == v.end();
}

void criterion_monotonicity(const std::vector<TilRun>& til)
{
    const std::vector<double> snr_grid = range(0.0, 40.0, 2.5);
    const SweepResult by_snr = run_experiment(spec_for(ExperimentKind::rate_vs_snr, network(2, 1, 200), snr_grid,
                                                       {Mode::alternate, Mode::non_alternate, Mode::full_duplex}));
    bool snr_ok = true;
    for (Mode m : {Mode::alternate, Mode::non_alternate, Mode::full_duplex}) {
        snr_ok = snr_ok && non_decreasing(rates_of(by_snr, m));
    }

    bool til_ok = true;
    for (const TilRun& run : til) {
        for (std::size_t i = 1; i < run.result.points.size(); ++i) {
            til_ok = til_ok && run.result.points[i].mean_til_last < run.result.points[i - 1].mean_til_last;
        }
    }

    NetworkConfig at15 = network(2, 1, 200);
    at15.snr = db_to_linear(15.0);
    const SweepResult by_n = run_experiment(
        spec_for(ExperimentKind::rate_vs_n, at15, kRelayGrid, {Mode::alternate, Mode::non_alternate}));
    bool n_ok = true;
    std::string n_detail;
    for (Mode m : {Mode::alternate, Mode::non_alternate}) {
        const auto r = rates_of(by_n, m);
        n_ok = n_ok && non_decreasing(r);
        n_detail += std::string(to_string(m)) + " " + num(r.front()) + " -> " + num(r.back()) + " ";
    }
    verdict(9, snr_ok && til_ok && n_ok, "monotonicity",
            std::string("rate vs snr 0-40 dB non-decreasing: ") + (snr_ok ? "yes" : "no") +
                "; mean TIL decreasing in N (3 configs): " + (til_ok ? "yes" : "no") +
                "; rate vs N at 15 dB non-decreasing: " + (n_ok ? "yes" : "no") + " (" + n_detail + ")");
}

void criterion_full_duplex()
{
    const std::vector<double> grid = range(0.0, 30.0, 2.5);
    NetworkConfig cfg = network(2, 1, 200);
    cfg.snr = db_to_linear(15.0);
    const SweepResult r = run_experiment(
        spec_for(ExperimentKind::rate_vs_rsinr, cfg, grid, {Mode::full_duplex, Mode::alternate}));
    const auto fd = rates_of(r, Mode::full_duplex);
    const auto ar = rates_of(r, Mode::alternate);
    const auto cross = crossing(grid, fd, ar);
    const bool low = fd.front() > ar.front();
    const bool high = fd.back() < ar.back();
    verdict(10, low && high && cross.has_value(), "full-duplex vs alternate crossover in RSINR",
            "RSINR 0 dB FD " + num(fd.front()) + " AR " + num(ar.front()) + "; 30 dB FD " + num(fd.back()) + " AR " +
                num(ar.back()) + "; crossover " + (cross ? num(*cross, 3) + " dB" : std::string("none in (0, 30)")));

    // Same blocks, but full-duplex relays hear no other relay: isolates how
    // much of the gap is inter-relay interference among the selected set.
    constexpr std::size_t trials = 2000;
    double clean0 = 0.0;
    double clean30 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = derive_stream(1, 0, t);
        const auto beams = make_beam_configs(cfg, rng);
        ChannelRealization chan = draw_block(cfg, rng);
        const RelayAssignment a = run_selection(chan, beams, cfg, Mode::full_duplex).assignment;
        chan.zero_relay();
        try {
            const LinkBudget budget(chan, beams, a, Mode::full_duplex);
            clean0 += rate_report(budget.sinrs(cfg.snr, 1.0), Mode::full_duplex, cfg.snr, cfg.slots).sum_rate;
            clean30 +=
                rate_report(budget.sinrs(cfg.snr, db_to_linear(30.0)), Mode::full_duplex, cfg.snr, cfg.slots).sum_rate;
        } catch (const SingularMatrix&) {
        }
    }
    info("full-duplex without inter-relay interference: " + num(clean0 / trials) + " at RSINR 0 dB, " +
         num(clean30 / trials) + " at 30 dB (" + std::to_string(trials) + " blocks)");
}

void criterion_determinism()
{
    ExperimentSpec snr = spec_for(ExperimentKind::rate_vs_snr, network(2, 2, 60), range(0, 30, 10),
                                  {Mode::alternate, Mode::non_alternate, Mode::full_duplex}, 300);
    ExperimentSpec til = spec_for(ExperimentKind::til_decay, network(2, 1, 200), {25, 50, 100}, {Mode::alternate}, 300);
    bool same = true;
    for (ExperimentSpec* spec : {&snr, &til}) {
        std::string reference;
        for (std::size_t workers : {1, 4, 8}) {
            spec->workers = workers;
            const std::string csv = result_csv(run_experiment(*spec));
            if (reference.empty()) {
                reference = csv;
            } else {
                same = same && csv == reference;
            }
        }
    }
    verdict(11, same, "byte-identical CSV with 1, 4 and 8 workers", same ? "identical" : "outputs differ");
}

}  // namespace

int main()
{
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto til = criterion_til_slopes();
        criterion_distributions();
        criterion_cdf_bound();
        criterion_count_peak();
        criterion_ar_nar();
        criterion_required_relays();
        criterion_selection_oracle();
        criterion_zf_and_decomposition();
        criterion_monotonicity(til);
        criterion_full_duplex();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL      acceptance aborted: %s\n", e.what());
        return 1;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d criteria failed (%.0f s)\n", failures, seconds);
    return failures == 0 ? 0 : 1;
}
