#include "msond/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "msond/analysis.hpp"
#include "msond/error.hpp"
#include "msond/selection.hpp"
#include "msond/transmission.hpp"

#ifndef MSOND_VERSION
#define MSOND_VERSION "unknown"
#endif

namespace msond {

std::string_view to_string(ExperimentKind kind) noexcept
{
    switch (kind) {
    case ExperimentKind::til_decay:
        return "til-decay";
    case ExperimentKind::rate_vs_snr:
        return "rate-vs-snr";
    case ExperimentKind::rate_vs_n:
        return "rate-vs-n";
    case ExperimentKind::rate_vs_rsinr:
        return "rate-vs-rsinr";
    case ExperimentKind::lookup_table:
        return "lookup";
    case ExperimentKind::dist_check:
        return "dist-check";
    }
    return "?";
}

ExperimentKind parse_kind(std::string_view text)
{
    for (auto kind : {ExperimentKind::til_decay, ExperimentKind::rate_vs_snr, ExperimentKind::rate_vs_n,
                      ExperimentKind::rate_vs_rsinr, ExperimentKind::lookup_table, ExperimentKind::dist_check}) {
        if (text == to_string(kind)) {
            return kind;
        }
    }
    if (text == "lookup-table") {
        return ExperimentKind::lookup_table;
    }
    throw ConfigError("kind", "unknown experiment '" + std::string(text) + "'");
}

std::string version_string()
{
    return MSOND_VERSION;
}

namespace {

bool sweeps_relays(ExperimentKind kind) noexcept
{
    return kind == ExperimentKind::til_decay || kind == ExperimentKind::rate_vs_n ||
           kind == ExperimentKind::lookup_table;
}

std::size_t as_relay_count(double value)
{
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e7) {
        throw ConfigError("n-list", "relay count must be a positive integer, got " + std::to_string(value));
    }
    return static_cast<std::size_t>(value);
}

void check_network(const NetworkConfig& cfg, Mode mode)
{
    if (cfg.pairs < 1) {
        throw ConfigError("k", "K must be >= 1");
    }
    if (cfg.antennas < 1 || cfg.antennas > 16) {
        throw ConfigError("m", "M must be in [1, 16], got " + std::to_string(cfg.antennas));
    }
    if (cfg.streams < 1 || cfg.streams > cfg.antennas) {
        throw ConfigError("s", "S must satisfy 1 <= S <= M, got S=" + std::to_string(cfg.streams) +
                                   " > M=" + std::to_string(cfg.antennas));
    }
    const std::size_t needed = (mode == Mode::alternate ? 2 : 1) * cfg.stream_count();
    if (cfg.relays < needed) {
        throw ConfigError("n", "N=" + std::to_string(cfg.relays) + " < " + std::to_string(needed) +
                                   " relays needed for mode " + std::string(to_string(mode)));
    }
    if (cfg.slots < 3 || cfg.slots % 2 == 0) {
        throw ConfigError("l-slots", "L must be odd and >= 3, got " + std::to_string(cfg.slots));
    }
    if (!(cfg.snr > 0.0) || !std::isfinite(cfg.snr)) {
        throw ConfigError("snr-db", "snr must be finite");
    }
    if (!(cfg.rsinr >= 0.0) || !std::isfinite(cfg.rsinr)) {
        throw ConfigError("rsinr-db", "rsinr must be finite");
    }
}

}  // namespace

void ExperimentSpec::validate() const
{
    if (trials < 1) {
        throw ConfigError("trials", "must be >= 1");
    }
    if (workers < 1) {
        throw ConfigError("workers", "must be >= 1");
    }
    if (kind != ExperimentKind::dist_check && sweep.empty()) {
        throw ConfigError("sweep", "sweep list is empty");
    }
    for (double v : sweep) {
        if (!std::isfinite(v)) {
            throw ConfigError("sweep", "non-finite sweep value");
        }
    }

    if (kind == ExperimentKind::lookup_table) {
        if (strategies.empty()) {
            throw ConfigError("strategy", "no strategies");
        }
        if (snr_grid_db.empty()) {
            throw ConfigError("snr-db-list", "snr grid is empty");
        }
        for (double v : sweep) {
            for (const Strategy& st : strategies) {
                NetworkConfig cfg = base;
                cfg.relays = as_relay_count(v);
                cfg.streams = st.streams;
                check_network(cfg, st.mode);
            }
        }
        return;
    }

    if (modes.empty()) {
        throw ConfigError("mode", "no modes selected");
    }
    if (kind == ExperimentKind::til_decay &&
        std::find(modes.begin(), modes.end(), Mode::alternate) == modes.end()) {
        throw ConfigError("mode", "til-decay needs the alternate mode (the TIL is defined on the second set)");
    }
    for (Mode mode : modes) {
        NetworkConfig cfg = base;
        if (kind == ExperimentKind::dist_check) {
            // Stage-2 samples need a second set's worth of relays.
            check_network(cfg, Mode::alternate);
            continue;
        }
        if (!sweeps_relays(kind)) {
            check_network(cfg, mode);
            continue;
        }
        for (double v : sweep) {
            cfg.relays = as_relay_count(v);
            check_network(cfg, mode);
        }
    }
}

namespace {

/// Statistics of one (mode, S) at one evaluation point over the trials.
struct Accumulator {
    std::size_t completed = 0;
    std::size_t discarded = 0;
    double sum = 0.0;
    double sum_sq = 0.0;
    double til_last = 0.0;
    double til_selected = 0.0;

    void add(double rate)
    {
        ++completed;
        sum += rate;
        sum_sq += rate * rate;
    }
    double mean() const { return completed > 0 ? sum / static_cast<double>(completed) : 0.0; }
    double stderr_of_mean() const
    {
        if (completed < 2) {
            return 0.0;
        }
        const double n = static_cast<double>(completed);
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
        return std::sqrt(var / n);
    }
};

/// Outcome of one block for one strategy: rates per evaluation point, or
/// nothing when the ZF receiver was singular.
struct TrialOutcome {
    std::optional<std::vector<double>> rates;
    double til_last = std::numeric_limits<double>::quiet_NaN();
    double til_selected = std::numeric_limits<double>::quiet_NaN();
};

struct EvalPoint {
    double snr;
    double rsinr;
};

RelayAssignment first_set_only(const RelayAssignment& full)
{
    return {full.pi1, std::nullopt, {}};
}

/// One block: beams, channel, selection, then every mode at every point.
/// Result index: mode-major, then point.
std::vector<TrialOutcome> run_block(const NetworkConfig& cfg, std::span<const Mode> modes,
                                    std::span<const EvalPoint> points, Rng rng)
{
    const std::vector<BeamConfig> beams = make_beam_configs(cfg, rng);
    const ChannelRealization chan = draw_block(cfg, rng);
    const bool any_alternate = std::find(modes.begin(), modes.end(), Mode::alternate) != modes.end();
    const SelectionTrace trace =
        run_selection(chan, beams, cfg, any_alternate ? Mode::alternate : Mode::non_alternate);

    std::vector<TrialOutcome> out(modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode mode = modes[i];
        TrialOutcome& o = out[i];
        if (mode == Mode::alternate) {
            o.til_last = til_order_statistic(*trace.assignment.pi2, *trace.stage2);
            o.til_selected = mean_selected_til(*trace.assignment.pi2, *trace.stage2);
        }
        const RelayAssignment assignment =
            mode == Mode::alternate ? trace.assignment : first_set_only(trace.assignment);
        try {
            const LinkBudget budget(chan, beams, assignment, mode);
            std::vector<double> rates;
            rates.reserve(points.size());
            for (const EvalPoint& p : points) {
                rates.push_back(rate_report(budget.sinrs(p.snr, p.rsinr), mode, p.snr, cfg.slots).sum_rate);
            }
            o.rates = std::move(rates);
        } catch (const SingularMatrix&) {
            // discarded; counted by the caller
        }
    }
    return out;
}

/// Runs `trials` blocks of one network and reduces them in trial order.
/// Returns accumulators indexed [mode][point].
std::vector<std::vector<Accumulator>> run_blocks(const NetworkConfig& cfg, std::span<const Mode> modes,
                                                 std::span<const EvalPoint> points, std::size_t trials,
                                                 std::uint64_t seed, std::uint64_t point_index, std::size_t workers)
{
    const std::vector<Mode> mode_list(modes.begin(), modes.end());
    const std::vector<EvalPoint> point_list(points.begin(), points.end());
    const auto outcomes = parallel_map<std::vector<TrialOutcome>>(trials, workers, [&](std::size_t t) {
        return run_block(cfg, mode_list, point_list, derive_stream(seed, point_index, t));
    });

    std::vector<std::vector<Accumulator>> acc(modes.size(), std::vector<Accumulator>(points.size()));
    for (const auto& trial : outcomes) {
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const TrialOutcome& o = trial[i];
            for (std::size_t p = 0; p < points.size(); ++p) {
                Accumulator& a = acc[i][p];
                if (!o.rates) {
                    ++a.discarded;
                    continue;
                }
                a.add((*o.rates)[p]);
                if (!std::isnan(o.til_last)) {
                    a.til_last += o.til_last;
                    a.til_selected += o.til_selected;
                }
            }
        }
    }
    return acc;
}

SweepPoint make_point(std::string param, double value, Mode mode, std::size_t streams, const Accumulator& a)
{
    SweepPoint pt;
    pt.sweep_param = std::move(param);
    pt.value = value;
    pt.mode = mode;
    pt.streams = streams;
    pt.mean_sum_rate = a.mean();
    pt.stderr_sum_rate = a.stderr_of_mean();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const bool has_til = mode == Mode::alternate && a.completed > 0;
    pt.mean_til_last = has_til ? a.til_last / static_cast<double>(a.completed) : nan;
    pt.mean_til_selected = has_til ? a.til_selected / static_cast<double>(a.completed) : nan;
    pt.discarded = a.discarded;
    pt.trials = a.completed + a.discarded;
    return pt;
}

std::vector<SweepPoint> run_relay_sweep(const ExperimentSpec& spec)
{
    std::vector<SweepPoint> points;
    const EvalPoint eval{spec.base.snr, spec.base.rsinr};
    for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
        NetworkConfig cfg = spec.base;
        cfg.relays = as_relay_count(spec.sweep[p]);
        const auto acc = run_blocks(cfg, spec.modes, std::span(&eval, 1), spec.trials, spec.seed, p, spec.workers);
        for (std::size_t i = 0; i < spec.modes.size(); ++i) {
            points.push_back(make_point("N", spec.sweep[p], spec.modes[i], cfg.streams, acc[i][0]));
        }
    }
    return points;
}

/// snr or RSINR sweeps: every trial is evaluated at every sweep value, so the
/// points share blocks.
std::vector<SweepPoint> run_level_sweep(const ExperimentSpec& spec, bool rsinr)
{
    std::vector<EvalPoint> eval;
    for (double db : spec.sweep) {
        eval.push_back(rsinr ? EvalPoint{spec.base.snr, db_to_linear(db)} : EvalPoint{db_to_linear(db), spec.base.rsinr});
    }
    const auto acc = run_blocks(spec.base, spec.modes, eval, spec.trials, spec.seed, 0, spec.workers);
    std::vector<SweepPoint> points;
    for (std::size_t p = 0; p < spec.sweep.size(); ++p) {
        for (std::size_t i = 0; i < spec.modes.size(); ++i) {
            points.push_back(make_point(rsinr ? "rsinr_db" : "snr_db", spec.sweep[p], spec.modes[i],
                                        spec.base.streams, acc[i][p]));
        }
    }
    return points;
}

struct DistSample {
    double stage1;
    double stage2;
};

DistSample dist_sample(const NetworkConfig& cfg, Rng rng)
{
    const std::vector<BeamConfig> beams = make_beam_configs(cfg, rng);
    const ChannelRealization chan = draw_block(cfg, rng);
    std::uniform_int_distribution<std::size_t> pick_relay(0, cfg.relays - 1);
    std::uniform_int_distribution<std::size_t> pick_pair(0, cfg.pairs - 1);
    std::uniform_int_distribution<std::size_t> pick_stream(0, cfg.streams - 1);
    const std::size_t n = pick_relay(rng);
    const std::size_t k = pick_pair(rng);
    const std::size_t s = pick_stream(rng);

    // Pi1 is chosen among the other relays so that the probe relay's metric
    // is not conditioned on having lost the first round.
    const MetricTable stage1 = stage1_table(chan, beams);
    const std::size_t excluded[] = {n};
    const RelaySet pi1 = select_set(stage1, excluded, cfg.pairs, cfg.streams);
    return {stage1(n, k, s), metric_stage2(chan, beams, pi1, n, k, s)};
}

std::vector<DistCheckRow> run_dist_check(const ExperimentSpec& spec)
{
    const NetworkConfig& cfg = spec.base;
    const auto samples = parallel_map<DistSample>(spec.trials, spec.workers, [&](std::size_t t) {
        return dist_sample(cfg, derive_stream(spec.seed, 0, t));
    });
    const ShapeParams shapes = shape_params(cfg.pairs, cfg.streams);
    std::vector<double> first;
    std::vector<double> second;
    for (const DistSample& d : samples) {
        first.push_back(d.stage1);
        second.push_back(d.stage2);
    }
    const auto cdf = [](std::size_t a) { return [a](double l) { return cdf_metric(l, a); }; };
    return {
        {"stage1", shapes.stage1, first.size(), ks_distance(first, cdf(shapes.stage1))},
        {"stage2", shapes.stage2, second.size(), ks_distance(second, cdf(shapes.stage2))},
    };
}

}  // namespace

LookupTable build_lookup_table(const NetworkConfig& base, const std::vector<double>& relay_counts,
                               const std::vector<double>& snr_grid_db, const std::vector<Strategy>& strategies,
                               std::size_t trials, std::uint64_t seed, std::size_t workers)
{
    if (strategies.empty() || snr_grid_db.empty() || relay_counts.empty()) {
        throw InvalidArgument("build_lookup_table: empty relay list, snr grid or strategy list");
    }
    std::vector<double> grid = snr_grid_db;
    std::sort(grid.begin(), grid.end());
    std::vector<EvalPoint> eval;
    for (double db : grid) {
        eval.push_back({db_to_linear(db), base.rsinr});
    }

    LookupTable table;
    table.strategies = strategies;
    for (std::size_t p = 0; p < relay_counts.size(); ++p) {
        const std::size_t relays = as_relay_count(relay_counts[p]);
        // rates[strategy][snr]
        std::vector<std::vector<double>> rates;
        for (const Strategy& st : strategies) {
            NetworkConfig cfg = base;
            cfg.relays = relays;
            cfg.streams = st.streams;
            const Mode mode = st.mode;
            const auto acc = run_blocks(cfg, std::span(&mode, 1), eval, trials, seed, p, workers);
            std::vector<double> row;
            for (const Accumulator& a : acc[0]) {
                row.push_back(a.mean());
            }
            table.discarded += acc[0][0].discarded;
            rates.push_back(std::move(row));
        }

        std::optional<std::size_t> previous;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            LookupCell cell{relays, grid[g], strategies[0], rates[0][g], {}};
            std::size_t best = 0;
            for (std::size_t i = 0; i < strategies.size(); ++i) {
                cell.mean_rates.push_back(rates[i][g]);
                if (rates[i][g] > rates[best][g]) {
                    best = i;
                }
            }
            cell.best = strategies[best];
            cell.t_max = rates[best][g];
            if (previous && *previous != best) {
                table.boundaries.push_back({relays, strategies[*previous], strategies[best], grid[g]});
            }
            previous = best;
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

SweepResult run_experiment(const ExperimentSpec& spec)
{
    spec.validate();
    const auto start = std::chrono::steady_clock::now();

    SweepResult result;
    result.spec = spec;
    result.version = version_string();
    switch (spec.kind) {
    case ExperimentKind::til_decay:
    case ExperimentKind::rate_vs_n:
        result.points = run_relay_sweep(spec);
        break;
    case ExperimentKind::rate_vs_snr:
        result.points = run_level_sweep(spec, false);
        break;
    case ExperimentKind::rate_vs_rsinr:
        result.points = run_level_sweep(spec, true);
        break;
    case ExperimentKind::lookup_table:
        result.lookup = build_lookup_table(spec.base, spec.sweep, spec.snr_grid_db, spec.strategies, spec.trials,
                                           spec.seed, spec.workers);
        break;
    case ExperimentKind::dist_check:
        result.dist = run_dist_check(spec);
        break;
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

namespace {

std::string fmt(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string sweep_csv(const SweepResult& result)
{
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    for (const SweepPoint& p : result.points) {
        out << p.sweep_param << ',' << fmt(p.value) << ',' << to_string(p.mode) << ',' << p.streams << ','
            << fmt(p.mean_sum_rate) << ',' << fmt(p.stderr_sum_rate) << ',' << fmt(p.mean_til_last) << ','
            << p.discarded << ',' << p.trials << ',' << result.spec.seed << '\n';
    }
    return out.str();
}

std::string lookup_csv(const LookupTable& table)
{
    std::ostringstream out;
    out << "N,snr_db,mode,S,mean_sum_rate,best\n";
    for (const LookupCell& cell : table.cells) {
        for (std::size_t i = 0; i < table.strategies.size(); ++i) {
            const Strategy& st = table.strategies[i];
            out << cell.relays << ',' << fmt(cell.snr_db) << ',' << to_string(st.mode) << ',' << st.streams << ','
                << fmt(cell.mean_rates[i]) << ',' << (st == cell.best ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string dist_csv(const std::vector<DistCheckRow>& rows)
{
    std::ostringstream out;
    out << "stage,shape,samples,ks_distance\n";
    for (const DistCheckRow& r : rows) {
        out << r.stage << ',' << r.shape << ',' << r.samples << ',' << fmt(r.ks_distance) << '\n';
    }
    return out.str();
}

std::string result_csv(const SweepResult& result)
{
    switch (result.spec.kind) {
    case ExperimentKind::lookup_table:
        return lookup_csv(*result.lookup);
    case ExperimentKind::dist_check:
        return dist_csv(result.dist);
    default:
        return sweep_csv(result);
    }
}

namespace {

using nlohmann::json;

json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json strategy_json(const Strategy& st)
{
    return {{"mode", to_string(st.mode)}, {"S", st.streams}};
}

json spec_json(const ExperimentSpec& spec)
{
    json modes = json::array();
    for (Mode m : spec.modes) {
        modes.push_back(to_string(m));
    }
    json strategies = json::array();
    for (const Strategy& st : spec.strategies) {
        strategies.push_back(strategy_json(st));
    }
    return {
        {"kind", to_string(spec.kind)},
        {"K", spec.base.pairs},
        {"N", spec.base.relays},
        {"M", spec.base.antennas},
        {"S", spec.base.streams},
        {"snr_db", 10.0 * std::log10(spec.base.snr)},
        {"rsinr_db", spec.base.rsinr > 0.0 ? number(10.0 * std::log10(spec.base.rsinr)) : json(nullptr)},
        {"L", spec.base.slots},
        {"sweep", spec.sweep},
        {"modes", modes},
        {"strategies", strategies},
        {"snr_grid_db", spec.snr_grid_db},
        {"trials", spec.trials},
        {"seed", spec.seed},
        {"workers", spec.workers},
    };
}

}  // namespace

std::string summary_json(const SweepResult& result)
{
    json points = json::array();
    for (const SweepPoint& p : result.points) {
        points.push_back({
            {"sweep_param", p.sweep_param},
            {"value", p.value},
            {"mode", to_string(p.mode)},
            {"S", p.streams},
            {"mean_sum_rate", number(p.mean_sum_rate)},
            {"stderr", number(p.stderr_sum_rate)},
            {"mean_til_last", number(p.mean_til_last)},
            {"mean_til_selected", number(p.mean_til_selected)},
            {"discarded", p.discarded},
            {"trials", p.trials},
        });
    }
    json doc = {
        {"version", result.version},
        {"wall_seconds", result.wall_seconds},
        {"config", spec_json(result.spec)},
        {"points", points},
    };
    if (result.lookup) {
        json boundaries = json::array();
        for (const RegimeBoundary& b : result.lookup->boundaries) {
            boundaries.push_back({{"N", b.relays},
                                  {"from", strategy_json(b.from)},
                                  {"to", strategy_json(b.to)},
                                  {"snr_db", b.snr_db}});
        }
        json cells = json::array();
        for (const LookupCell& c : result.lookup->cells) {
            cells.push_back({{"N", c.relays}, {"snr_db", c.snr_db}, {"best", strategy_json(c.best)}, {"t_max", c.t_max}});
        }
        doc["lookup"] = {{"cells", cells}, {"boundaries", boundaries}, {"discarded", result.lookup->discarded}};
    }
    if (!result.dist.empty()) {
        json rows = json::array();
        for (const DistCheckRow& r : result.dist) {
            rows.push_back({{"stage", r.stage}, {"shape", r.shape}, {"samples", r.samples}, {"ks_distance", r.ks_distance}});
        }
        doc["dist_check"] = rows;
    }
    return doc.dump(2) + "\n";
}

namespace {

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    file << text;
    file.close();
    if (!file) {
        throw IoError("write to '" + path + "' failed");
    }
}

std::string json_path(const ExperimentSpec& spec)
{
    if (!spec.json.empty() || spec.out.empty()) {
        return spec.json;
    }
    const std::string& out = spec.out;
    if (out.size() > 4 && out.compare(out.size() - 4, 4, ".csv") == 0) {
        return out.substr(0, out.size() - 4) + ".json";
    }
    return out + ".json";
}

}  // namespace

void write_outputs(const SweepResult& result)
{
    const std::string csv = result_csv(result);
    if (result.spec.out.empty()) {
        std::cout << csv << std::flush;
    } else {
        write_file(result.spec.out, csv);
    }
    const std::string summary = json_path(result.spec);
    if (!summary.empty()) {
        write_file(summary, summary_json(result));
    }
}

}  // namespace msond
