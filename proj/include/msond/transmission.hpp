#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msond/channel.hpp"
#include "msond/linalg.hpp"
#include "msond/selection.hpp"

namespace msond {

/// Which relay set: 0 for Pi1, 1 for Pi2.
using SetIndex = std::size_t;

/// Unit-power (P = 1) received powers at a relay during its receive slot.
/// Interference terms are before scaling by snr.
struct Hop1Terms {
    double desired = 0.0;        // |v_k^(s)T h|^2
    double other_beams = 0.0;    // I_IB / P: other beams of the own source
    double other_sources = 0.0;  // I_IS / P
    double inter_relay = 0.0;    // I_IR / P
};

Hop1Terms hop1_terms(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                     const RelayAssignment& assignment, Mode mode, SetIndex b, std::size_t k, std::size_t s);

/// SINR at relay pi_b(k,s) with N0 = 1 and P = snr. In full-duplex mode the
/// noise floor is raised by the residual self-interference rsinr.
double sinr_hop1(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                 const RelayAssignment& assignment, Mode mode, SetIndex b, std::size_t k, std::size_t s,
                 double snr, double rsinr = 0.0);

/// F_k = ([U_k^H h_{k,pi_b(k,1)} ... U_k^H h_{k,pi_b(k,S)}]^{-1})^H.
ComplexMatrix zf_equalizer(const ComplexMatrix& signal_space, const ChannelRealization& chan,
                           const RelaySet& set, std::size_t k);

/// Effective SINR of stream s at destination k after projection and ZF.
double sinr_hop2(const ComplexMatrix& signal_space, const ComplexMatrix& equalizer,
                 const ChannelRealization& chan, const RelaySet& set, std::size_t k, std::size_t s, double snr);

/// Per-(set, pair, stream) SINRs of both hops.
struct HopSinrs {
    std::size_t sets = 0;
    std::size_t pairs = 0;
    std::size_t streams = 0;
    std::vector<double> hop1;
    std::vector<double> hop2;

    std::size_t index(SetIndex b, std::size_t k, std::size_t s) const noexcept
    {
        return (b * pairs + k) * streams + s;
    }
};

/// Everything about a block that does not depend on snr: hop-1 terms,
/// equalizers and the per-stream ZF noise gains. Evaluating many snr points
/// on one block reuses it.
class LinkBudget {
public:
    LinkBudget(const ChannelRealization& chan, std::span<const BeamConfig> beams,
               const RelayAssignment& assignment, Mode mode);

    Mode mode() const noexcept { return mode_; }
    std::size_t sets() const noexcept { return sets_; }
    std::size_t pairs() const noexcept { return pairs_; }
    std::size_t streams() const noexcept { return streams_; }

    const Hop1Terms& hop1(SetIndex b, std::size_t k, std::size_t s) const noexcept
    {
        return hop1_[index(b, k, s)];
    }
    /// ||f_{k,s}||^2
    double noise_gain(SetIndex b, std::size_t k, std::size_t s) const noexcept
    {
        return noise_gain_[index(b, k, s)];
    }
    /// sum_{j != k, t} |f_{k,s}^H U_k^H h_{k, pi_b(j,t)}|^2
    double leakage(SetIndex b, std::size_t k, std::size_t s) const noexcept
    {
        return leakage_[index(b, k, s)];
    }

    HopSinrs sinrs(double snr, double rsinr = 0.0) const;

private:
    std::size_t index(SetIndex b, std::size_t k, std::size_t s) const noexcept
    {
        return (b * pairs_ + k) * streams_ + s;
    }

    Mode mode_;
    std::size_t sets_;
    std::size_t pairs_;
    std::size_t streams_;
    std::vector<Hop1Terms> hop1_;
    std::vector<double> noise_gain_;
    std::vector<double> leakage_;
};

struct RateReport {
    Mode mode = Mode::alternate;
    std::size_t pairs = 0;
    std::size_t streams = 0;
    std::vector<double> per_stream;  // bits/slot, index k * S + s
    double sum_rate = 0.0;
    double snr = 0.0;
    std::size_t slots = 0;
};

/// Rates from min(hop-1, hop-2) SINRs:
///   alternate:      (L-1)/L * sum_b 1/2 log2(1 + sinr_min)
///   non-alternate:  1/2 log2(1 + sinr_min)
///   full-duplex:    log2(1 + sinr_min)
RateReport rate_report(const HopSinrs& sinrs, Mode mode, double snr, std::size_t slots);

RateReport sum_rate(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                    const RelayAssignment& assignment, const NetworkConfig& cfg, Mode mode);

/// Slot in which Pi1 receives from the sources (odd) or Pi2 does (even).
enum class SlotParity { odd, even };

struct SlotSymbols {
    std::vector<cplx> source;  // x^(1)_{k,s}, index k * S + s
    std::vector<cplx> relay;   // x^(2) of the transmitting set's relay pi(k,s), index k * S + s
};

struct SlotNoise {
    Rng* rng = nullptr;  // null: noiseless
    double variance = 1.0;
};

struct SlotOutput {
    std::vector<cplx> relay_rx;  // y^(1) at the receiving relay pi(k,s), index k * S + s
    std::vector<cplx> dest;      // r_{k,s} after U_k^H and F_k^H, index k * S + s
};

/// Symbol-level received signals for one slot. In alternate mode the set
/// that is not receiving transmits `symbols.relay`; the destinations see that
/// set. Non-alternate mode: odd slots are source->Pi1 only, even slots
/// Pi1->destinations only. Full-duplex: Pi1 receives and transmits at once.
/// Transmit amplitudes are unit (P = 1); scale symbols for other powers.
SlotOutput simulate_slot(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                         const RelayAssignment& assignment, Mode mode, const SlotSymbols& symbols,
                         SlotParity parity, const SlotNoise& noise = {});

}  // namespace msond
