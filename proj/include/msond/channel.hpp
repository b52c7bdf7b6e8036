#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msond/linalg.hpp"
#include "msond/random.hpp"

namespace msond {

/// Relaying variant. Alternate relaying toggles two relay sets every slot;
/// non-alternate uses one set and two slots per symbol; full-duplex is the
/// benchmark with one set of full-duplex relays.
enum class Mode { alternate, non_alternate, full_duplex };

std::string_view to_string(Mode mode) noexcept;
/// Accepts the CLI spellings ar / nar / fd and the long names.
Mode parse_mode(std::string_view text);

inline double db_to_linear(double db) noexcept
{
    return std::pow(10.0, db / 10.0);
}

struct NetworkConfig {
    std::size_t pairs = 2;         // K
    std::size_t relays = 200;      // N
    std::size_t antennas = 4;      // M
    std::size_t streams = 1;       // S
    double snr = 31.622776601683793;  // P / N0, linear
    double rsinr = 0.0;            // residual self-interference / N0, linear (full-duplex only)
    std::size_t slots = 1001;      // L, odd

    std::size_t stream_count() const noexcept { return pairs * streams; }

    /// Throws InvalidConfiguration naming the violated constraint.
    void validate(Mode mode) const;
};

/// One block-fading draw. Inter-relay coefficients are a keyed field: each
/// h_mn is a pure function of (block key, min(m,n), max(m,n)), so the N x N
/// matrix costs nothing until an entry is read. Writing any entry switches to
/// a dense copy.
class ChannelRealization {
public:
    ChannelRealization(std::size_t relays, std::size_t pairs, std::size_t antennas,
                       std::uint64_t relay_key);

    std::size_t relays() const noexcept { return relays_; }
    std::size_t pairs() const noexcept { return pairs_; }
    std::size_t antennas() const noexcept { return antennas_; }

    /// h^(1)_{nk}: source k -> relay n.
    std::span<const cplx> hop1(std::size_t relay, std::size_t pair) const noexcept
    {
        return {hop1_.data() + (relay * pairs_ + pair) * antennas_, antennas_};
    }
    std::span<cplx> hop1(std::size_t relay, std::size_t pair) noexcept
    {
        return {hop1_.data() + (relay * pairs_ + pair) * antennas_, antennas_};
    }

    /// h^(2)_{kn}: relay n -> destination k.
    std::span<const cplx> hop2(std::size_t pair, std::size_t relay) const noexcept
    {
        return {hop2_.data() + (pair * relays_ + relay) * antennas_, antennas_};
    }
    std::span<cplx> hop2(std::size_t pair, std::size_t relay) noexcept
    {
        return {hop2_.data() + (pair * relays_ + relay) * antennas_, antennas_};
    }

    /// h^(r)_{mn}; symmetric, zero on the diagonal.
    cplx relay(std::size_t m, std::size_t n) const noexcept;

    /// Sets h_mn and h_nm. Setting a diagonal entry is rejected.
    void set_relay(std::size_t m, std::size_t n, cplx value);
    void zero_relay();

    bool all_finite() const;

private:
    void materialize();

    std::size_t relays_;
    std::size_t pairs_;
    std::size_t antennas_;
    std::uint64_t relay_key_;
    std::vector<cplx> hop1_;
    std::vector<cplx> hop2_;
    std::vector<cplx> relay_dense_;  // empty while the keyed field is in use
};

/// Rayleigh block: every coefficient i.i.d. CN(0,1).
ChannelRealization draw_block(const NetworkConfig& cfg, Rng& rng);

/// Same, with every coefficient zero (hand-built test instances).
ChannelRealization zero_block(const NetworkConfig& cfg);

}  // namespace msond
