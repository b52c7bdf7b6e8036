#include "msond/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <CLI11.hpp>

#include "msond/error.hpp"

namespace msond {

namespace {

constexpr std::size_t kFullScaleTrials = 100000;

struct RawOptions {
    std::optional<std::string> k, n, m, s, snr_db, rsinr_db, l_slots, trials, seed, workers;
    std::vector<std::string> modes, n_list, snr_db_list, rsinr_db_list, strategies;
    std::string out, json;
    bool full_scale = false;
};

std::string trimmed(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t");
    return std::string(text.substr(first, last - first + 1));
}

double parse_real(const std::string& key, const std::string& text)
{
    const std::string t = trimmed(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size() || !std::isfinite(value)) {
        throw ConfigError(key, "malformed number '" + text + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text)
{
    const std::string t = trimmed(text);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
        throw ConfigError(key, "malformed non-negative integer '" + text + "'");
    }
    return value;
}

std::vector<double> parse_reals(const std::string& key, const std::vector<std::string>& items)
{
    std::vector<double> out;
    for (const std::string& item : items) {
        out.push_back(parse_real(key, item));
    }
    return out;
}

std::vector<double> grid(double first, double last, double step)
{
    std::vector<double> out;
    for (double v = first; v <= last + 1e-9; v += step) {
        out.push_back(v);
    }
    return out;
}

Mode mode_for_key(const std::string& key, const std::string& text)
{
    try {
        return parse_mode(trimmed(text));
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

Strategy parse_strategy(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("strategy", "expected MODE:S, got '" + text + "'");
    }
    const Mode mode = mode_for_key("strategy", text.substr(0, colon));
    return {mode, static_cast<std::size_t>(parse_unsigned("strategy", text.substr(colon + 1)))};
}

void apply_defaults(ExperimentSpec& spec)
{
    const std::vector<double> relay_sweep{25, 50, 100, 200, 400, 800};
    switch (spec.kind) {
    case ExperimentKind::til_decay:
        spec.sweep = relay_sweep;
        spec.modes = {Mode::alternate};
        break;
    case ExperimentKind::rate_vs_snr:
        spec.sweep = grid(0.0, 40.0, 5.0);
        spec.modes = {Mode::alternate, Mode::non_alternate};
        break;
    case ExperimentKind::rate_vs_n:
        spec.sweep = relay_sweep;
        spec.modes = {Mode::alternate, Mode::non_alternate};
        break;
    case ExperimentKind::rate_vs_rsinr:
        spec.sweep = grid(0.0, 30.0, 5.0);
        spec.modes = {Mode::full_duplex, Mode::alternate};
        break;
    case ExperimentKind::lookup_table:
        spec.sweep = {50, 100, 200};
        spec.snr_grid_db = grid(0.0, 30.0, 2.0);
        spec.strategies = {{Mode::alternate, 3}, {Mode::alternate, 2}, {Mode::alternate, 1}, {Mode::non_alternate, 1}};
        spec.modes = {Mode::alternate, Mode::non_alternate};
        break;
    case ExperimentKind::dist_check:
        spec.modes = {Mode::alternate};
        break;
    }
}

void add_options(CLI::App& app, RawOptions& raw)
{
    app.add_option("--k", raw.k, "source-destination pairs K")->type_name("INT");
    app.add_option("--n", raw.n, "relays N")->type_name("INT");
    app.add_option("--m", raw.m, "antennas per terminal M")->type_name("INT");
    app.add_option("--s", raw.s, "streams per pair S")->type_name("INT");
    app.add_option("--snr-db", raw.snr_db, "transmit snr in dB")->type_name("DB");
    app.add_option("--rsinr-db", raw.rsinr_db, "residual self-interference (full-duplex) in dB")->type_name("DB");
    app.add_option("--l-slots", raw.l_slots, "slots per block L (odd)")->type_name("INT");
    app.add_option("--trials", raw.trials, "blocks per sweep point")->type_name("INT");
    app.add_option("--seed", raw.seed, "64-bit seed (falls back to MSOND_SEED)")->type_name("INT");
    app.add_option("--workers", raw.workers, "worker threads")->type_name("COUNT");
    app.add_option("--mode", raw.modes, "ar, nar or fd; repeatable or comma separated")->delimiter(',')->type_name("MODE");
    app.add_option("--n-list", raw.n_list, "relay counts to sweep")->delimiter(',')->type_name("INT,...");
    app.add_option("--snr-db-list", raw.snr_db_list, "snr grid in dB")->delimiter(',')->type_name("DB,...");
    app.add_option("--rsinr-db-list", raw.rsinr_db_list, "RSINR grid in dB")->delimiter(',')->type_name("DB,...");
    app.add_option("--strategy", raw.strategies, "lookup strategy MODE:S; repeatable")->delimiter(',')->type_name("MODE:S");
    app.add_option("--out", raw.out, "CSV output path (default stdout)")->type_name("PATH");
    app.add_option("--json", raw.json, "JSON summary path (default: next to --out)")->type_name("PATH");
    app.add_flag("--full-scale", raw.full_scale, "100000 trials per point unless --trials is given");
    app.set_config("--config", "", "key = value file; command-line flags take precedence")->type_name("FILE");
    app.allow_config_extras(false);
}

ExperimentSpec resolve(ExperimentKind kind, const RawOptions& raw, const std::optional<std::string>& env_seed)
{
    ExperimentSpec spec;
    spec.kind = kind;
    apply_defaults(spec);

    NetworkConfig& cfg = spec.base;
    if (raw.k) {
        cfg.pairs = parse_unsigned("k", *raw.k);
    }
    if (raw.n) {
        cfg.relays = parse_unsigned("n", *raw.n);
    }
    if (raw.m) {
        cfg.antennas = parse_unsigned("m", *raw.m);
    }
    if (raw.s) {
        cfg.streams = parse_unsigned("s", *raw.s);
    }
    if (raw.snr_db) {
        cfg.snr = db_to_linear(parse_real("snr-db", *raw.snr_db));
    }
    if (raw.rsinr_db) {
        cfg.rsinr = db_to_linear(parse_real("rsinr-db", *raw.rsinr_db));
    }
    if (raw.l_slots) {
        cfg.slots = parse_unsigned("l-slots", *raw.l_slots);
    }

    if (raw.full_scale) {
        spec.trials = kFullScaleTrials;
    }
    if (raw.trials) {
        spec.trials = parse_unsigned("trials", *raw.trials);
    }
    if (raw.seed) {
        spec.seed = parse_unsigned("seed", *raw.seed);
    } else if (env_seed && !env_seed->empty()) {
        spec.seed = parse_unsigned("MSOND_SEED", *env_seed);
    }
    if (raw.workers) {
        spec.workers = parse_unsigned("workers", *raw.workers);
    }

    if (!raw.modes.empty()) {
        spec.modes.clear();
        for (const std::string& m : raw.modes) {
            const Mode mode = mode_for_key("mode", m);
            if (std::find(spec.modes.begin(), spec.modes.end(), mode) == spec.modes.end()) {
                spec.modes.push_back(mode);
            }
        }
    }
    if (!raw.strategies.empty()) {
        spec.strategies.clear();
        for (const std::string& st : raw.strategies) {
            spec.strategies.push_back(parse_strategy(st));
        }
    }

    switch (kind) {
    case ExperimentKind::til_decay:
    case ExperimentKind::rate_vs_n:
    case ExperimentKind::lookup_table:
        if (!raw.n_list.empty()) {
            spec.sweep = parse_reals("n-list", raw.n_list);
        }
        if (kind == ExperimentKind::lookup_table && !raw.snr_db_list.empty()) {
            spec.snr_grid_db = parse_reals("snr-db-list", raw.snr_db_list);
        }
        break;
    case ExperimentKind::rate_vs_snr:
        if (!raw.snr_db_list.empty()) {
            spec.sweep = parse_reals("snr-db-list", raw.snr_db_list);
        }
        break;
    case ExperimentKind::rate_vs_rsinr:
        if (!raw.rsinr_db_list.empty()) {
            spec.sweep = parse_reals("rsinr-db-list", raw.rsinr_db_list);
        }
        break;
    case ExperimentKind::dist_check:
        break;
    }

    spec.out = raw.out;
    spec.json = raw.json;
    spec.validate();
    return spec;
}

}  // namespace

ExperimentSpec parse_config(const std::vector<std::string>& args, const std::optional<std::string>& env_seed)
{
    if (args.empty()) {
        throw ConfigError("kind", "missing subcommand");
    }
    const ExperimentKind kind = parse_kind(args[0]);

    CLI::App app{"msond " + std::string(to_string(kind))};
    RawOptions raw;
    add_options(app, raw);

    // CLI11 expects the arguments in reverse order when given a vector.
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        throw ConfigError("args", e.what());
    }
    return resolve(kind, raw, env_seed);
}

std::string describe(const ExperimentSpec& spec)
{
    const auto list = [](const std::vector<double>& values) {
        std::ostringstream out;
        for (std::size_t i = 0; i < values.size(); ++i) {
            out << (i ? "," : "") << values[i];
        }
        return out.str();
    };
    std::ostringstream out;
    out << "kind = " << to_string(spec.kind) << '\n'
        << "k = " << spec.base.pairs << '\n'
        << "n = " << spec.base.relays << '\n'
        << "m = " << spec.base.antennas << '\n'
        << "s = " << spec.base.streams << '\n'
        << "snr-db = " << 10.0 * std::log10(spec.base.snr) << '\n';
    if (spec.base.rsinr > 0.0) {
        out << "rsinr-db = " << 10.0 * std::log10(spec.base.rsinr) << '\n';
    }
    out << "l-slots = " << spec.base.slots << '\n' << "mode = ";
    for (std::size_t i = 0; i < spec.modes.size(); ++i) {
        out << (i ? "," : "") << to_string(spec.modes[i]);
    }
    out << '\n';
    if (!spec.sweep.empty()) {
        out << "sweep = " << list(spec.sweep) << '\n';
    }
    if (spec.kind == ExperimentKind::lookup_table) {
        out << "snr-db-list = " << list(spec.snr_grid_db) << '\n' << "strategy = ";
        for (std::size_t i = 0; i < spec.strategies.size(); ++i) {
            out << (i ? "," : "") << to_string(spec.strategies[i].mode) << ':' << spec.strategies[i].streams;
        }
        out << '\n';
    }
    out << "trials = " << spec.trials << '\n'
        << "seed = " << spec.seed << '\n'
        << "workers = " << spec.workers << '\n'
        << "out = " << (spec.out.empty() ? "-" : spec.out) << '\n';
    return out.str();
}

std::string usage()
{
    CLI::App app{"msond: multi-stream opportunistic relaying simulator"};
    RawOptions raw;
    add_options(app, raw);
    return "usage: msond {til-decay|rate-vs-snr|rate-vs-n|rate-vs-rsinr|lookup|dist-check} [flags]\n\n" + app.help();
}

}  // namespace msond
