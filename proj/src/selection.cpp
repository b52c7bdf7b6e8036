#include "msond/selection.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "msond/error.hpp"

namespace msond {

std::vector<BeamConfig> make_beam_configs(const NetworkConfig& cfg, Rng& rng)
{
    cfg.validate(Mode::non_alternate);
    std::vector<BeamConfig> out;
    out.reserve(cfg.pairs);
    for (std::size_t k = 0; k < cfg.pairs; ++k) {
        ComplexMatrix rbf = random_unitary(cfg.antennas, rng);
        SubspacePair spaces = split_spaces(cfg.antennas, cfg.streams, rng);
        out.push_back({std::move(rbf), std::move(spaces.interference), std::move(spaces.signal)});
    }
    return out;
}

MetricTable::MetricTable(std::size_t relays, std::size_t pairs, std::size_t streams)
    : relays_(relays), pairs_(pairs), streams_(streams), values_(relays * pairs * streams, 0.0)
{
}

RelaySet::RelaySet(std::size_t pairs, std::size_t streams)
    : pairs_(pairs), streams_(streams), relay_(pairs * streams, kUnassigned)
{
    order_.reserve(relay_.size());
}

void RelaySet::assign(std::size_t k, std::size_t s, std::size_t relay)
{
    if (k >= pairs_ || s >= streams_) {
        throw InvalidArgument("RelaySet::assign: slot (" + std::to_string(k) + "," + std::to_string(s) +
                              ") out of range");
    }
    if (assigned(k, s)) {
        throw InvalidArgument("RelaySet::assign: slot already reserved");
    }
    if (contains(relay)) {
        throw InvalidArgument("RelaySet::assign: relay " + std::to_string(relay) + " already selected");
    }
    relay_[k * streams_ + s] = relay;
    order_.push_back({k, s});
}

bool RelaySet::contains(std::size_t relay) const noexcept
{
    return std::find(relay_.begin(), relay_.end(), relay) != relay_.end();
}

std::vector<std::size_t> RelaySet::members() const
{
    std::vector<std::size_t> out;
    out.reserve(relay_.size());
    for (std::size_t r : relay_) {
        if (r != kUnassigned) {
            out.push_back(r);
        }
    }
    return out;
}

namespace {

void check_beams(const ChannelRealization& chan, std::span<const BeamConfig> beams)
{
    if (beams.size() != chan.pairs()) {
        throw InvalidArgument("beam configurations (" + std::to_string(beams.size()) + ") do not match K=" +
                              std::to_string(chan.pairs()));
    }
}

// Interference terms seen by one relay: |v_j^(t)T h_nj|^2 for the S data
// beams of every source, and ||U_j^H h_jn||^2 for every destination.
struct RelayTerms {
    std::vector<double> beam;  // [j * S + t]
    std::vector<double> leak;  // [j]
};

RelayTerms relay_terms(const ChannelRealization& chan, std::span<const BeamConfig> beams, std::size_t n)
{
    const std::size_t pairs = beams.size();
    const std::size_t streams = beams.front().streams();
    RelayTerms terms{std::vector<double>(pairs * streams), std::vector<double>(pairs)};
    for (std::size_t j = 0; j < pairs; ++j) {
        const auto h1 = chan.hop1(n, j);
        for (std::size_t t = 0; t < streams; ++t) {
            terms.beam[j * streams + t] = std::norm(dot_transpose(beams[j].rbf.col(t), h1));
        }
        terms.leak[j] = norm_sq(project_signal(beams[j].signal, chan.hop2(j, n)));
    }
    return terms;
}

double stage1_from_terms(const RelayTerms& terms, std::size_t pairs, std::size_t streams, std::size_t k,
                         std::size_t s)
{
    double own = 0.0;
    for (std::size_t t = 0; t < streams; ++t) {
        if (t != s) {
            own += terms.beam[k * streams + t];
        }
    }
    double other_sources = 0.0;
    double leakage = 0.0;
    for (std::size_t j = 0; j < pairs; ++j) {
        if (j == k) {
            continue;
        }
        for (std::size_t t = 0; t < streams; ++t) {
            other_sources += terms.beam[j * streams + t];
        }
        leakage += terms.leak[j];
    }
    return own + other_sources + leakage;
}

double inter_relay_power(const ChannelRealization& chan, std::size_t n, const RelaySet& from)
{
    double acc = 0.0;
    for (std::size_t k = 0; k < from.pairs(); ++k) {
        for (std::size_t t = 0; t < from.streams(); ++t) {
            acc += std::norm(chan.relay(n, from.relay(k, t)));
        }
    }
    return acc;
}

void check_indices(const ChannelRealization& chan, std::span<const BeamConfig> beams, std::size_t n,
                   std::size_t k, std::size_t s)
{
    check_beams(chan, beams);
    if (n >= chan.relays() || k >= chan.pairs() || s >= beams.front().streams()) {
        throw InvalidArgument("metric index out of range: n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                              ", s=" + std::to_string(s));
    }
}

}  // namespace

double metric_stage1(const ChannelRealization& chan, std::span<const BeamConfig> beams, std::size_t n,
                     std::size_t k, std::size_t s)
{
    check_indices(chan, beams, n, k, s);
    return stage1_from_terms(relay_terms(chan, beams, n), beams.size(), beams.front().streams(), k, s);
}

double metric_stage2(const ChannelRealization& chan, std::span<const BeamConfig> beams, const RelaySet& pi1,
                     std::size_t n, std::size_t k, std::size_t s)
{
    check_indices(chan, beams, n, k, s);
    if (!pi1.complete()) {
        throw InvalidArgument("metric_stage2: first relay set is incomplete");
    }
    if (pi1.contains(n)) {
        throw InvalidArgument("metric_stage2: relay " + std::to_string(n) + " already belongs to Pi1");
    }
    return metric_stage1(chan, beams, n, k, s) + inter_relay_power(chan, n, pi1);
}

MetricTable stage1_table(const ChannelRealization& chan, std::span<const BeamConfig> beams)
{
    check_beams(chan, beams);
    const std::size_t pairs = beams.size();
    const std::size_t streams = beams.front().streams();
    MetricTable table(chan.relays(), pairs, streams);
    for (std::size_t n = 0; n < chan.relays(); ++n) {
        const RelayTerms terms = relay_terms(chan, beams, n);
        for (std::size_t k = 0; k < pairs; ++k) {
            for (std::size_t s = 0; s < streams; ++s) {
                table(n, k, s) = stage1_from_terms(terms, pairs, streams, k, s);
            }
        }
    }
    return table;
}

MetricTable stage2_table(const ChannelRealization& chan, const MetricTable& stage1, const RelaySet& pi1)
{
    if (!pi1.complete()) {
        throw InvalidArgument("stage2_table: first relay set is incomplete");
    }
    MetricTable table = stage1;
    for (std::size_t n = 0; n < table.relays(); ++n) {
        const double ir = inter_relay_power(chan, n, pi1);
        for (std::size_t k = 0; k < table.pairs(); ++k) {
            for (std::size_t s = 0; s < table.streams(); ++s) {
                table(n, k, s) += ir;
            }
        }
    }
    return table;
}

RelaySet select_set(const MetricTable& metrics, std::span<const std::size_t> excluded, std::size_t pairs,
                    std::size_t streams)
{
    if (metrics.pairs() != pairs || metrics.streams() != streams) {
        throw InvalidArgument("select_set: metric table shape does not match K x S");
    }
    const std::size_t relays = metrics.relays();
    std::vector<char> blocked(relays, 0);
    std::size_t blocked_count = 0;
    for (std::size_t n : excluded) {
        if (n >= relays) {
            throw InvalidArgument("select_set: excluded relay " + std::to_string(n) + " out of range");
        }
        if (!blocked[n]) {
            blocked[n] = 1;
            ++blocked_count;
        }
    }
    const std::size_t slots = pairs * streams;
    if (relays - blocked_count < slots) {
        throw InfeasibleSelection("select_set: " + std::to_string(relays - blocked_count) +
                                  " candidates for " + std::to_string(slots) + " streams");
    }

    RelaySet out(pairs, streams);
    for (std::size_t round = 0; round < slots; ++round) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_n = RelaySet::kUnassigned;
        std::size_t best_k = 0;
        std::size_t best_s = 0;
        for (std::size_t n = 0; n < relays; ++n) {
            if (blocked[n]) {
                continue;
            }
            for (std::size_t k = 0; k < pairs; ++k) {
                for (std::size_t s = 0; s < streams; ++s) {
                    if (out.assigned(k, s)) {
                        continue;
                    }
                    const double v = metrics(n, k, s);
                    if (v < best || best_n == RelaySet::kUnassigned) {
                        best = v;
                        best_n = n;
                        best_k = k;
                        best_s = s;
                    }
                }
            }
        }
        out.assign(best_k, best_s, best_n);
        blocked[best_n] = 1;
    }
    return out;
}

namespace {

std::vector<std::size_t> idle_relays(std::size_t relays, const RelaySet& a, const RelaySet* b)
{
    std::vector<std::size_t> idle;
    for (std::size_t n = 0; n < relays; ++n) {
        if (!a.contains(n) && (b == nullptr || !b->contains(n))) {
            idle.push_back(n);
        }
    }
    return idle;
}

}  // namespace

SelectionTrace run_selection(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                             const NetworkConfig& cfg, Mode mode)
{
    const std::size_t needed = (mode == Mode::alternate ? 2 : 1) * cfg.stream_count();
    if (chan.relays() < needed) {
        throw InfeasibleSelection("need " + std::to_string(needed) + " relays, have " +
                                  std::to_string(chan.relays()));
    }
    cfg.validate(mode);
    check_beams(chan, beams);

    MetricTable first = stage1_table(chan, beams);
    RelaySet pi1 = select_set(first, {}, cfg.pairs, cfg.streams);
    if (mode != Mode::alternate) {
        std::vector<std::size_t> idle = idle_relays(chan.relays(), pi1, nullptr);
        return {RelayAssignment{std::move(pi1), std::nullopt, std::move(idle)}, std::move(first), std::nullopt};
    }
    MetricTable second = stage2_table(chan, first, pi1);
    const std::vector<std::size_t> excluded = pi1.members();
    RelaySet pi2 = select_set(second, excluded, cfg.pairs, cfg.streams);
    std::vector<std::size_t> idle = idle_relays(chan.relays(), pi1, &pi2);
    return {RelayAssignment{std::move(pi1), std::move(pi2), std::move(idle)}, std::move(first), std::move(second)};
}

RelayAssignment select_both_sets(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                                 const NetworkConfig& cfg)
{
    return run_selection(chan, beams, cfg, Mode::alternate).assignment;
}

RelayAssignment select_first_set(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                                 const NetworkConfig& cfg)
{
    return run_selection(chan, beams, cfg, Mode::non_alternate).assignment;
}

std::uint64_t signaling_overhead_bits(std::size_t pairs, std::size_t streams)
{
    const std::uint64_t sk = static_cast<std::uint64_t>(pairs) * streams;
    std::uint64_t bits = 0;
    while ((std::uint64_t{1} << bits) < sk) {
        ++bits;
    }
    return 2 * sk * bits;
}

}  // namespace msond
