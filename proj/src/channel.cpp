#include "msond/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msond/error.hpp"

namespace msond {

std::string_view to_string(Mode mode) noexcept
{
    switch (mode) {
    case Mode::alternate:
        return "ar";
    case Mode::non_alternate:
        return "nar";
    case Mode::full_duplex:
        return "fd";
    }
    return "?";
}

Mode parse_mode(std::string_view text)
{
    if (text == "ar" || text == "alternate") {
        return Mode::alternate;
    }
    if (text == "nar" || text == "non-alternate") {
        return Mode::non_alternate;
    }
    if (text == "fd" || text == "full-duplex") {
        return Mode::full_duplex;
    }
    throw InvalidConfiguration("unknown mode '" + std::string(text) + "' (expected ar, nar or fd)");
}

void NetworkConfig::validate(Mode mode) const
{
    const auto fail = [](const std::string& what) { throw InvalidConfiguration(what); };
    if (pairs < 1) {
        fail("K must be >= 1");
    }
    if (antennas < 1 || antennas > 16) {
        fail("M must be in [1, 16], got " + std::to_string(antennas));
    }
    if (streams < 1 || streams > antennas) {
        fail("S must satisfy 1 <= S <= M, got S=" + std::to_string(streams) + ", M=" + std::to_string(antennas));
    }
    const std::size_t needed = (mode == Mode::alternate ? 2 : 1) * stream_count();
    if (relays < needed) {
        fail("N must be >= " + std::to_string(needed) + " for mode " + std::string(to_string(mode)) +
             ", got N=" + std::to_string(relays));
    }
    if (slots < 3 || slots % 2 == 0) {
        fail("L must be odd and >= 3, got " + std::to_string(slots));
    }
    if (!(snr > 0.0) || !std::isfinite(snr)) {
        fail("snr must be positive and finite");
    }
    if (!(rsinr >= 0.0) || !std::isfinite(rsinr)) {
        fail("rsinr must be non-negative and finite");
    }
}

ChannelRealization::ChannelRealization(std::size_t relays, std::size_t pairs, std::size_t antennas,
                                       std::uint64_t relay_key)
    : relays_(relays),
      pairs_(pairs),
      antennas_(antennas),
      relay_key_(relay_key),
      hop1_(relays * pairs * antennas),
      hop2_(pairs * relays * antennas)
{
}

cplx ChannelRealization::relay(std::size_t m, std::size_t n) const noexcept
{
    if (m == n) {
        return {0.0, 0.0};
    }
    if (!relay_dense_.empty()) {
        return relay_dense_[m * relays_ + n];
    }
    const std::size_t lo = std::min(m, n);
    const std::size_t hi = std::max(m, n);
    return keyed_gaussian(relay_key_, static_cast<std::uint64_t>(lo) * relays_ + hi);
}

void ChannelRealization::materialize()
{
    if (!relay_dense_.empty()) {
        return;
    }
    std::vector<cplx> dense(relays_ * relays_);
    for (std::size_t m = 0; m < relays_; ++m) {
        for (std::size_t n = 0; n < relays_; ++n) {
            dense[m * relays_ + n] = relay(m, n);
        }
    }
    relay_dense_ = std::move(dense);
}

void ChannelRealization::set_relay(std::size_t m, std::size_t n, cplx value)
{
    if (m >= relays_ || n >= relays_) {
        throw InvalidArgument("set_relay: index out of range");
    }
    if (m == n) {
        throw InvalidArgument("set_relay: diagonal inter-relay coefficients are fixed at zero");
    }
    materialize();
    relay_dense_[m * relays_ + n] = value;
    relay_dense_[n * relays_ + m] = value;
}

void ChannelRealization::zero_relay()
{
    relay_dense_.assign(relays_ * relays_, cplx{0.0, 0.0});
}

bool ChannelRealization::all_finite() const
{
    const auto finite = [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!std::all_of(hop1_.begin(), hop1_.end(), finite) || !std::all_of(hop2_.begin(), hop2_.end(), finite)) {
        return false;
    }
    for (std::size_t m = 0; m < relays_; ++m) {
        for (std::size_t n = m + 1; n < relays_; ++n) {
            if (!finite(relay(m, n))) {
                return false;
            }
        }
    }
    return true;
}

ChannelRealization draw_block(const NetworkConfig& cfg, Rng& rng)
{
    cfg.validate(Mode::non_alternate);
    ChannelRealization chan(cfg.relays, cfg.pairs, cfg.antennas, rng());
    for (std::size_t n = 0; n < cfg.relays; ++n) {
        for (std::size_t k = 0; k < cfg.pairs; ++k) {
            for (cplx& z : chan.hop1(n, k)) {
                z = complex_gaussian(rng);
            }
        }
    }
    for (std::size_t k = 0; k < cfg.pairs; ++k) {
        for (std::size_t n = 0; n < cfg.relays; ++n) {
            for (cplx& z : chan.hop2(k, n)) {
                z = complex_gaussian(rng);
            }
        }
    }
    return chan;
}

ChannelRealization zero_block(const NetworkConfig& cfg)
{
    ChannelRealization chan(cfg.relays, cfg.pairs, cfg.antennas, 0);
    chan.zero_relay();
    return chan;
}

}  // namespace msond
