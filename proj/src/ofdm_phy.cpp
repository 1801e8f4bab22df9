#include "impdet/ofdm_phy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "impdet/fft.hpp"

namespace impdet {

OfdmConfig OfdmConfig::standard(std::size_t cp_len) {
    OfdmConfig cfg;
    cfg.fft_size = 1024;
    cfg.cp_len = cp_len;
    for (std::size_t k = 0; k < cfg.fft_size; ++k) {
        if (k % 4 == 0)
            cfg.pilots.push_back(k);
        else if (k >= 448 && k < 576)
            cfg.nulls.push_back(k);
        else
            cfg.data.push_back(k);
    }
    Rng rng(kPilotSeed);
    cfg.pilot_symbols.resize(cfg.pilots.size());
    for (auto& p : cfg.pilot_symbols) {
        const auto r = rng();
        p = Complex((r & 1) ? -kInvSqrt2 : kInvSqrt2, (r & 2) ? -kInvSqrt2 : kInvSqrt2);
    }
    return cfg;
}

void OfdmConfig::set_constant_pilots(Complex value) { pilot_symbols.assign(pilots.size(), value); }

void OfdmConfig::validate() const {
    if (fft_size == 0) throw std::invalid_argument("OFDM: fft_size must be > 0");
    std::vector<int> seen(fft_size, 0);
    for (const auto* set : {&data, &pilots, &nulls}) {
        for (auto k : *set) {
            if (k >= fft_size) throw std::invalid_argument("OFDM: subcarrier index out of range");
            if (seen[k]++) throw std::invalid_argument("OFDM: subcarrier sets overlap");
        }
        if (!std::is_sorted(set->begin(), set->end())) throw std::invalid_argument("OFDM: subcarrier sets must be ascending");
    }
    if (std::count(seen.begin(), seen.end(), 0) != 0) throw std::invalid_argument("OFDM: subcarrier sets do not cover 0..N-1");
    if (data.empty()) throw std::invalid_argument("OFDM: no data subcarriers");
    if (pilot_symbols.size() != pilots.size()) throw std::invalid_argument("OFDM: need one pilot symbol per pilot carrier");
    for (const auto& p : pilot_symbols)
        if (std::abs(p) == 0.0) throw std::invalid_argument("OFDM: pilot symbols must be nonzero");
}

std::vector<std::size_t> OfdmConfig::active() const {
    std::vector<std::size_t> a;
    a.reserve(data.size() + pilots.size());
    std::merge(data.begin(), data.end(), pilots.begin(), pilots.end(), std::back_inserter(a));
    return a;
}

ComplexVec qpsk_map(std::span<const std::uint8_t> bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: bit count must be even");
    ComplexVec out(bits.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double re = bits[2 * i] ? -1.0 : 1.0;
        const double im = bits[2 * i + 1] ? -1.0 : 1.0;
        out[i] = Complex(re, im) * kInvSqrt2;
    }
    return out;
}

std::vector<double> qpsk_llr(std::span<const Complex> symbols, double noise_var) {
    if (!(noise_var > 0.0)) throw std::invalid_argument("qpsk_llr: noise_var must be > 0");
    std::vector<double> llr(2 * symbols.size());
    // Per-dimension variance noise_var/2, constellation offset 1/sqrt(2).
    const double k = 2.0 * std::numbers::sqrt2 / noise_var;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        llr[2 * i] = k * symbols[i].real();
        llr[2 * i + 1] = k * symbols[i].imag();
    }
    return llr;
}

std::vector<double> qpsk_llr(std::span<const Complex> symbols, std::span<const double> noise_var) {
    if (symbols.size() != noise_var.size()) throw std::invalid_argument("qpsk_llr: size mismatch");
    std::vector<double> llr(2 * symbols.size(), 0.0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double v = noise_var[i];
        if (!(v > 0.0) || !std::isfinite(v)) continue;
        const double k = 2.0 * std::numbers::sqrt2 / v;
        llr[2 * i] = k * symbols[i].real();
        llr[2 * i + 1] = k * symbols[i].imag();
    }
    return llr;
}

ComplexVec assemble_active(const OfdmConfig& cfg, std::span<const Complex> data_symbols) {
    if (data_symbols.size() != cfg.data.size()) throw std::invalid_argument("assemble_active: wrong number of data symbols");
    ComplexVec grid(cfg.fft_size);
    for (std::size_t i = 0; i < cfg.data.size(); ++i) grid[cfg.data[i]] = data_symbols[i];
    if (cfg.pilot_symbols.size() != cfg.pilots.size()) throw std::invalid_argument("assemble_active: pilot symbols missing");
    for (std::size_t i = 0; i < cfg.pilots.size(); ++i) grid[cfg.pilots[i]] = cfg.pilot_symbols[i];
    return gather(grid, cfg.active());
}

ComplexVec ofdm_modulate(const OfdmConfig& cfg, std::span<const Complex> active_symbols) {
    const auto active = cfg.active();
    if (active_symbols.size() != active.size())
        throw std::invalid_argument("ofdm_modulate: expected one value per active subcarrier");
    ComplexVec grid(cfg.fft_size);
    for (std::size_t i = 0; i < active.size(); ++i) grid[active[i]] = active_symbols[i];
    const ComplexVec body = idft(grid);
    ComplexVec out;
    out.reserve(cfg.symbol_len());
    out.insert(out.end(), body.end() - static_cast<std::ptrdiff_t>(cfg.cp_len), body.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

ComplexVec ofdm_demodulate(const OfdmConfig& cfg, std::span<const Complex> samples) {
    if (samples.size() != cfg.symbol_len()) throw std::invalid_argument("ofdm_demodulate: expected N + cp_len samples");
    return dft(samples.subspan(cfg.cp_len));
}

std::vector<Complex> gather(std::span<const Complex> grid, std::span<const std::size_t> carriers) {
    ComplexVec out(carriers.size());
    for (std::size_t i = 0; i < carriers.size(); ++i) out[i] = grid[carriers[i]];
    return out;
}

std::size_t ChannelRealization::max_delay() const {
    std::size_t d = 0;
    for (const auto& t : taps) d = std::max(d, t.delay);
    return d;
}

ComplexVec ChannelRealization::frequency_response(std::size_t fft_size) const {
    ComplexVec H(fft_size);
    for (std::size_t k = 0; k < fft_size; ++k) {
        Complex acc;
        for (const auto& t : taps) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * t.delay) % fft_size) / fft_size;
            acc += t.gain * std::polar(1.0, phase);
        }
        H[k] = acc;
    }
    return H;
}

std::vector<double> power_profile(std::span<const std::size_t> delays, double decay) {
    std::vector<double> w(delays.size());
    double total = 0.0;
    for (std::size_t p = 0; p < delays.size(); ++p) {
        w[p] = std::exp(-static_cast<double>(delays[p]) / decay);
        total += w[p];
    }
    for (auto& v : w) v /= total;
    return w;
}

ChannelRealization channel_generate(const ChannelProfile& profile, Rng& rng) {
    if (profile.taps < 1) throw std::invalid_argument("channel_generate: need at least one tap");
    if (!(profile.mean_arrival > 0.0) || !(profile.decay > 0.0))
        throw std::invalid_argument("channel_generate: mean_arrival and decay must be > 0");

    std::vector<std::size_t> delays(profile.taps);
    bool ok = false;
    for (int attempt = 0; attempt <= profile.max_retries && !ok; ++attempt) {
        delays[0] = 0;
        for (std::size_t p = 1; p < profile.taps; ++p) {
            const double gap = -profile.mean_arrival * std::log(1.0 - uniform01(rng));
            delays[p] = delays[p - 1] + std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(gap)));
        }
        ok = delays.back() <= profile.max_delay;
    }
    if (!ok) throw std::runtime_error("channel_generate: delay spread exceeds the cyclic prefix after retries");

    const auto w = power_profile(delays, profile.decay);
    ChannelRealization ch;
    ch.taps.resize(profile.taps);
    for (std::size_t p = 0; p < profile.taps; ++p) ch.taps[p] = {complex_normal(rng, w[p]), delays[p]};
    return ch;
}

ComplexVec channel_apply(std::span<const Complex> signal, const ChannelRealization& ch) {
    ComplexVec out(signal.size());
    for (const auto& t : ch.taps) {
        for (std::size_t k = t.delay; k < signal.size(); ++k) out[k] += t.gain * signal[k - t.delay];
    }
    return out;
}

ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid, Complex pilot_value) {
    const ComplexVec pilots(cfg.pilots.size(), pilot_value);
    return estimate_channel(cfg, rx_grid, pilots);
}

ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid) {
    return estimate_channel(cfg, rx_grid, cfg.pilot_symbols);
}

ComplexVec estimate_channel(const OfdmConfig& cfg, std::span<const Complex> rx_grid,
                            std::span<const Complex> pilot_symbols) {
    if (rx_grid.size() != cfg.fft_size) throw std::invalid_argument("estimate_channel: expected N carriers");
    const auto& P = cfg.pilots;
    if (P.empty()) throw std::invalid_argument("estimate_channel: no pilots");
    if (pilot_symbols.size() != P.size()) throw std::invalid_argument("estimate_channel: one pilot symbol per pilot carrier");
    for (const auto& p : pilot_symbols)
        if (std::abs(p) == 0.0) throw std::invalid_argument("estimate_channel: pilot value must be nonzero");

    ComplexVec Hp(P.size());
    for (std::size_t i = 0; i < P.size(); ++i) Hp[i] = rx_grid[P[i]] / pilot_symbols[i];

    ComplexVec H(cfg.fft_size);
    if (P.size() == 1) {
        std::fill(H.begin(), H.end(), Hp[0]);
        return H;
    }
    std::size_t seg = 0;
    for (std::size_t k = 0; k < cfg.fft_size; ++k) {
        // Segment [P[seg], P[seg+1]] used for interpolation; clamped at the ends
        // so the outermost segments extrapolate.
        while (seg + 2 < P.size() && k > P[seg + 1]) ++seg;
        const double x0 = static_cast<double>(P[seg]);
        const double x1 = static_cast<double>(P[seg + 1]);
        const double t = (static_cast<double>(k) - x0) / (x1 - x0);
        H[k] = Hp[seg] + t * (Hp[seg + 1] - Hp[seg]);
    }
    return H;
}

Equalized equalize(std::span<const Complex> symbols, std::span<const Complex> H) {
    if (symbols.size() != H.size()) throw std::invalid_argument("equalize: size mismatch");
    Equalized eq;
    eq.symbols.resize(symbols.size());
    eq.noise_scale.resize(symbols.size());
    eq.erased.assign(symbols.size(), 0);
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (std::abs(H[i]) < kChannelFloor) {
            eq.erased[i] = 1;
            eq.symbols[i] = 0.0;
            eq.noise_scale[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        eq.symbols[i] = symbols[i] / H[i];
        eq.noise_scale[i] = 1.0 / std::norm(H[i]);
    }
    return eq;
}

}  // namespace impdet
