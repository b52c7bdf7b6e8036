#include "msond/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msond/error.hpp"

namespace msond {

namespace {

void check_mode(const RelayAssignment& assignment, Mode mode)
{
    const bool alternate = mode == Mode::alternate;
    if (alternate != assignment.pi2.has_value()) {
        throw InvalidArgument(std::string("assignment does not match mode ") + std::string(to_string(mode)) +
                              (alternate ? ": Pi2 missing" : ": unexpected Pi2"));
    }
}

std::size_t set_count(Mode mode) noexcept
{
    return mode == Mode::alternate ? 2 : 1;
}

const RelaySet& pick_set(const RelayAssignment& assignment, Mode mode, SetIndex b)
{
    if (b >= set_count(mode)) {
        throw InvalidArgument("relay set index " + std::to_string(b) + " not available in mode " +
                              std::string(to_string(mode)));
    }
    return b == 0 ? assignment.pi1 : *assignment.pi2;
}

double power_from_set(const ChannelRealization& chan, std::size_t n, const RelaySet& set)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < set.pairs(); ++j) {
        for (std::size_t t = 0; t < set.streams(); ++t) {
            const std::size_t m = set.relay(j, t);
            if (m != n) {
                acc += std::norm(chan.relay(n, m));
            }
        }
    }
    return acc;
}

}  // namespace

Hop1Terms hop1_terms(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                     const RelayAssignment& assignment, Mode mode, SetIndex b, std::size_t k, std::size_t s)
{
    check_mode(assignment, mode);
    const RelaySet& set = pick_set(assignment, mode, b);
    if (k >= set.pairs() || s >= set.streams() || beams.size() != set.pairs()) {
        throw InvalidArgument("hop1_terms: index out of range");
    }
    const std::size_t n = set.relay(k, s);
    const std::size_t streams = set.streams();

    Hop1Terms terms;
    for (std::size_t j = 0; j < beams.size(); ++j) {
        const auto h = chan.hop1(n, j);
        for (std::size_t t = 0; t < streams; ++t) {
            const double g = std::norm(dot_transpose(beams[j].rbf.col(t), h));
            if (j != k) {
                terms.other_sources += g;
            } else if (t != s) {
                terms.other_beams += g;
            } else {
                terms.desired = g;
            }
        }
    }
    switch (mode) {
    case Mode::alternate:
        terms.inter_relay = power_from_set(chan, n, pick_set(assignment, mode, 1 - b));
        break;
    case Mode::non_alternate:
        break;
    case Mode::full_duplex:
        terms.inter_relay = power_from_set(chan, n, assignment.pi1);
        break;
    }
    return terms;
}

namespace {

double sinr_from_terms(const Hop1Terms& t, Mode mode, double snr, double rsinr)
{
    const double floor = 1.0 + (mode == Mode::full_duplex ? rsinr : 0.0);
    return snr * t.desired / (floor + snr * (t.other_beams + t.other_sources + t.inter_relay));
}

}  // namespace

double sinr_hop1(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                 const RelayAssignment& assignment, Mode mode, SetIndex b, std::size_t k, std::size_t s,
                 double snr, double rsinr)
{
    return sinr_from_terms(hop1_terms(chan, beams, assignment, mode, b, k, s), mode, snr, rsinr);
}

ComplexMatrix zf_equalizer(const ComplexMatrix& signal_space, const ChannelRealization& chan,
                           const RelaySet& set, std::size_t k)
{
    if (k >= set.pairs() || signal_space.cols() != set.streams()) {
        throw InvalidArgument("zf_equalizer: signal space or pair index inconsistent with relay set");
    }
    std::vector<CVector> columns;
    columns.reserve(set.streams());
    for (std::size_t s = 0; s < set.streams(); ++s) {
        columns.push_back(project_signal(signal_space, chan.hop2(k, set.relay(k, s))));
    }
    const ComplexMatrix effective = ComplexMatrix::from_columns(columns, set.streams());
    return invert_small(effective).adjoint();
}

namespace {

double zf_leakage(const ComplexMatrix& signal_space, std::span<const cplx> f, const ChannelRealization& chan,
                  const RelaySet& set, std::size_t k)
{
    double acc = 0.0;
    for (std::size_t j = 0; j < set.pairs(); ++j) {
        if (j == k) {
            continue;
        }
        for (std::size_t t = 0; t < set.streams(); ++t) {
            const CVector projected = project_signal(signal_space, chan.hop2(k, set.relay(j, t)));
            acc += std::norm(dot_adjoint(f, projected));
        }
    }
    return acc;
}

}  // namespace

double sinr_hop2(const ComplexMatrix& signal_space, const ComplexMatrix& equalizer,
                 const ChannelRealization& chan, const RelaySet& set, std::size_t k, std::size_t s, double snr)
{
    if (s >= equalizer.cols() || equalizer.rows() != signal_space.cols()) {
        throw InvalidArgument("sinr_hop2: equalizer shape inconsistent with signal space");
    }
    const auto f = equalizer.col(s);
    return snr / (norm_sq(f) + snr * zf_leakage(signal_space, f, chan, set, k));
}

LinkBudget::LinkBudget(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                       const RelayAssignment& assignment, Mode mode)
    : mode_(mode),
      sets_(set_count(mode)),
      pairs_(assignment.pi1.pairs()),
      streams_(assignment.pi1.streams())
{
    check_mode(assignment, mode);
    const std::size_t total = sets_ * pairs_ * streams_;
    hop1_.resize(total);
    noise_gain_.resize(total);
    leakage_.resize(total);
    for (SetIndex b = 0; b < sets_; ++b) {
        const RelaySet& set = pick_set(assignment, mode, b);
        for (std::size_t k = 0; k < pairs_; ++k) {
            const ComplexMatrix& u = beams[k].signal;
            const ComplexMatrix f = zf_equalizer(u, chan, set, k);
            for (std::size_t s = 0; s < streams_; ++s) {
                const std::size_t i = index(b, k, s);
                hop1_[i] = hop1_terms(chan, beams, assignment, mode, b, k, s);
                noise_gain_[i] = norm_sq(f.col(s));
                leakage_[i] = zf_leakage(u, f.col(s), chan, set, k);
            }
        }
    }
}

HopSinrs LinkBudget::sinrs(double snr, double rsinr) const
{
    HopSinrs out{sets_, pairs_, streams_, std::vector<double>(hop1_.size()), std::vector<double>(hop1_.size())};
    for (std::size_t i = 0; i < hop1_.size(); ++i) {
        out.hop1[i] = sinr_from_terms(hop1_[i], mode_, snr, rsinr);
        out.hop2[i] = snr / (noise_gain_[i] + snr * leakage_[i]);
    }
    return out;
}

RateReport rate_report(const HopSinrs& sinrs, Mode mode, double snr, std::size_t slots)
{
    if (sinrs.sets != set_count(mode)) {
        throw InvalidArgument("rate_report: SINR sets do not match mode");
    }
    RateReport report;
    report.mode = mode;
    report.pairs = sinrs.pairs;
    report.streams = sinrs.streams;
    report.snr = snr;
    report.slots = slots;
    report.per_stream.assign(sinrs.pairs * sinrs.streams, 0.0);

    const double prelog = mode == Mode::alternate ? static_cast<double>(slots - 1) / static_cast<double>(slots) : 1.0;
    const double per_hop_share = mode == Mode::full_duplex ? 1.0 : 0.5;
    for (std::size_t k = 0; k < sinrs.pairs; ++k) {
        for (std::size_t s = 0; s < sinrs.streams; ++s) {
            double acc = 0.0;
            for (SetIndex b = 0; b < sinrs.sets; ++b) {
                const std::size_t i = sinrs.index(b, k, s);
                const double weakest = std::min(sinrs.hop1[i], sinrs.hop2[i]);
                acc += per_hop_share * std::log2(1.0 + weakest);
            }
            report.per_stream[k * sinrs.streams + s] = prelog * acc;
            report.sum_rate += prelog * acc;
        }
    }
    return report;
}

RateReport sum_rate(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                    const RelayAssignment& assignment, const NetworkConfig& cfg, Mode mode)
{
    const LinkBudget budget(chan, beams, assignment, mode);
    return rate_report(budget.sinrs(cfg.snr, cfg.rsinr), mode, cfg.snr, cfg.slots);
}

SlotOutput simulate_slot(const ChannelRealization& chan, std::span<const BeamConfig> beams,
                         const RelayAssignment& assignment, Mode mode, const SlotSymbols& symbols,
                         SlotParity parity, const SlotNoise& noise)
{
    check_mode(assignment, mode);
    const std::size_t pairs = assignment.pi1.pairs();
    const std::size_t streams = assignment.pi1.streams();
    const std::size_t count = pairs * streams;

    const RelaySet* receiving = nullptr;
    const RelaySet* transmitting = nullptr;
    switch (mode) {
    case Mode::alternate:
        receiving = parity == SlotParity::odd ? &assignment.pi1 : &*assignment.pi2;
        transmitting = parity == SlotParity::odd ? &*assignment.pi2 : &assignment.pi1;
        break;
    case Mode::non_alternate:
        (parity == SlotParity::odd ? receiving : transmitting) = &assignment.pi1;
        break;
    case Mode::full_duplex:
        receiving = &assignment.pi1;
        transmitting = &assignment.pi1;
        break;
    }
    if (receiving != nullptr && symbols.source.size() != count) {
        throw InvalidArgument("simulate_slot: expected " + std::to_string(count) + " source symbols");
    }
    if (transmitting != nullptr && symbols.relay.size() != count) {
        throw InvalidArgument("simulate_slot: expected " + std::to_string(count) + " relay symbols");
    }

    const auto draw_noise = [&]() -> cplx {
        if (noise.rng == nullptr) {
            return {0.0, 0.0};
        }
        return std::sqrt(noise.variance) * complex_gaussian(*noise.rng);
    };

    SlotOutput out;
    if (receiving != nullptr) {
        out.relay_rx.resize(count);
        for (std::size_t k = 0; k < pairs; ++k) {
            for (std::size_t s = 0; s < streams; ++s) {
                const std::size_t n = receiving->relay(k, s);
                cplx y{0.0, 0.0};
                for (std::size_t j = 0; j < pairs; ++j) {
                    const auto h = chan.hop1(n, j);
                    for (std::size_t t = 0; t < streams; ++t) {
                        y += dot_transpose(beams[j].rbf.col(t), h) * symbols.source[j * streams + t];
                    }
                }
                if (transmitting != nullptr) {
                    for (std::size_t j = 0; j < pairs; ++j) {
                        for (std::size_t t = 0; t < streams; ++t) {
                            const std::size_t m = transmitting->relay(j, t);
                            if (m != n) {
                                y += chan.relay(n, m) * symbols.relay[j * streams + t];
                            }
                        }
                    }
                }
                out.relay_rx[k * streams + s] = y + draw_noise();
            }
        }
    }
    if (transmitting != nullptr) {
        out.dest.resize(count);
        const std::size_t antennas = chan.antennas();
        for (std::size_t k = 0; k < pairs; ++k) {
            CVector y(antennas, cplx{0.0, 0.0});
            for (std::size_t j = 0; j < pairs; ++j) {
                for (std::size_t t = 0; t < streams; ++t) {
                    const auto h = chan.hop2(k, transmitting->relay(j, t));
                    const cplx x = symbols.relay[j * streams + t];
                    for (std::size_t a = 0; a < antennas; ++a) {
                        y[a] += h[a] * x;
                    }
                }
            }
            for (cplx& z : y) {
                z += draw_noise();
            }
            const ComplexMatrix& u = beams[k].signal;
            const ComplexMatrix f = zf_equalizer(u, chan, *transmitting, k);
            const CVector projected = project_signal(u, y);
            for (std::size_t s = 0; s < streams; ++s) {
                out.dest[k * streams + s] = dot_adjoint(f.col(s), projected);
            }
        }
    }
    return out;
}

}  // namespace msond
