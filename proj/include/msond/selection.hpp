#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "msond/channel.hpp"
#include "msond/linalg.hpp"

namespace msond {

/// Per-pair beams: the source's RBF unitary (first S columns carry data)
/// and the destination's interference/signal split.
struct BeamConfig {
    ComplexMatrix rbf;           // V_k, M x M
    ComplexMatrix interference;  // Q_k, M x (M - S)
    ComplexMatrix signal;        // U_k, M x S

    std::size_t streams() const noexcept { return signal.cols(); }
};

std::vector<BeamConfig> make_beam_configs(const NetworkConfig& cfg, Rng& rng);

/// Scheduling metric per (relay, pair, stream).
class MetricTable {
public:
    MetricTable(std::size_t relays, std::size_t pairs, std::size_t streams);

    std::size_t relays() const noexcept { return relays_; }
    std::size_t pairs() const noexcept { return pairs_; }
    std::size_t streams() const noexcept { return streams_; }

    double& operator()(std::size_t n, std::size_t k, std::size_t s) noexcept
    {
        return values_[(n * pairs_ + k) * streams_ + s];
    }
    double operator()(std::size_t n, std::size_t k, std::size_t s) const noexcept
    {
        return values_[(n * pairs_ + k) * streams_ + s];
    }

private:
    std::size_t relays_;
    std::size_t pairs_;
    std::size_t streams_;
    std::vector<double> values_;
};

/// Injective (pair, stream) -> relay map for one relay set. Also remembers
/// the order in which slots were filled (the order the timers expired).
class RelaySet {
public:
    struct Slot {
        std::size_t pair;
        std::size_t stream;
    };

    RelaySet(std::size_t pairs, std::size_t streams);

    std::size_t pairs() const noexcept { return pairs_; }
    std::size_t streams() const noexcept { return streams_; }
    std::size_t size() const noexcept { return relay_.size(); }

    std::size_t relay(std::size_t k, std::size_t s) const noexcept { return relay_[k * streams_ + s]; }
    bool assigned(std::size_t k, std::size_t s) const noexcept { return relay_[k * streams_ + s] != kUnassigned; }
    bool complete() const noexcept { return order_.size() == relay_.size(); }

    void assign(std::size_t k, std::size_t s, std::size_t relay);

    bool contains(std::size_t relay) const noexcept;
    /// Relay indices in slot order (k-major).
    std::vector<std::size_t> members() const;
    std::span<const Slot> fill_order() const noexcept { return order_; }

    friend bool operator==(const RelaySet& a, const RelaySet& b)
    {
        return a.pairs_ == b.pairs_ && a.streams_ == b.streams_ && a.relay_ == b.relay_;
    }

    static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

private:
    std::size_t pairs_;
    std::size_t streams_;
    std::vector<std::size_t> relay_;
    std::vector<Slot> order_;
};

struct RelayAssignment {
    RelaySet pi1;
    std::optional<RelaySet> pi2;  // alternate relaying only
    std::vector<std::size_t> idle;
};

/// Stage-1 metric: other beams of the own source, all beams of the other
/// sources, and leakage into the other destinations' signal spaces.
double metric_stage1(const ChannelRealization& chan, std::span<const BeamConfig> beams, std::size_t n,
                     std::size_t k, std::size_t s);

/// Total interference level: stage-1 metric plus the inter-relay power
/// received from the first relay set. n must not belong to pi1.
double metric_stage2(const ChannelRealization& chan, std::span<const BeamConfig> beams, const RelaySet& pi1,
                     std::size_t n, std::size_t k, std::size_t s);

MetricTable stage1_table(const ChannelRealization& chan, std::span<const BeamConfig> beams);

/// Stage-2 table built on a stage-1 table. Rows of pi1 members hold the
/// same formula but are never eligible.
MetricTable stage2_table(const ChannelRealization& chan, const MetricTable& stage1, const RelaySet& pi1);

/// Deterministic emulation of the distributed timer protocol: SK rounds,
/// each taking the smallest remaining (relay, slot) metric. Ties go to the
/// lower relay, then pair, then stream index.
RelaySet select_set(const MetricTable& metrics, std::span<const std::size_t> excluded, std::size_t pairs,
                    std::size_t streams);

/// Pi1 from stage-1 metrics; Pi2 from TILs over the remaining relays.
RelayAssignment select_both_sets(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                                 const NetworkConfig& cfg);

/// Pi1 only (non-alternate relaying and the full-duplex benchmark).
RelayAssignment select_first_set(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                                 const NetworkConfig& cfg);

/// Assignment plus the metric tables it was selected from.
struct SelectionTrace {
    RelayAssignment assignment;
    MetricTable stage1;
    std::optional<MetricTable> stage2;  // alternate relaying only
};

/// Selection for a mode: both sets for alternate relaying, Pi1 otherwise.
SelectionTrace run_selection(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                             const NetworkConfig& cfg, Mode mode);

/// RTS payload for both selection rounds: 2 SK ceil(log2 SK) bits.
std::uint64_t signaling_overhead_bits(std::size_t pairs, std::size_t streams);

}  // namespace msond
