#include "impdet/link.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace impdet {

LinkSimulator::LinkSimulator(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      ofdm_(cfg_.ofdm()),
      profile_(cfg_.channel_profile()),
      bit_il_(cfg_.bit_il_rows, cfg_.bit_il_cols),
      time_il_(cfg_.time_il_rows, cfg_.time_il_cols) {
    cfg_.validate();
    ofdm_.validate();
    coded_bits_ = 2 * ofdm_.data.size();
    if (coded_bits_ <= 2 * ConvCode::kTailBits) throw std::invalid_argument("link: too few data carriers");
    info_bits_ = coded_bits_ / 2 - ConvCode::kTailBits;
    signal_power_ = static_cast<double>(ofdm_.active().size()) / static_cast<double>(ofdm_.fft_size);
}

double LinkSimulator::background_variance(double ebn0_db) const {
    if (std::isinf(ebn0_db) && ebn0_db > 0) return 0.0;
    const double energy_per_bit = static_cast<double>(ofdm_.active().size()) / static_cast<double>(info_bits_);
    return energy_per_bit / db_to_linear(ebn0_db);
}

OperatingPoint LinkSimulator::operating_point(double ebn0_db) const {
    return {ebn0_db, cfg_.noise, cfg_.epsilon, cfg_.sir_db};
}

NoiseSpec LinkSimulator::noise_spec(const OperatingPoint& op) const {
    const double sw2 = background_variance(op.ebn0_db);
    switch (op.noise) {
        case NoiseKind::Awgn:
            return BgParams{0.0, sw2, 1.0};
        case NoiseKind::Bg:
        case NoiseKind::Bursty: {
            // With epsilon = 0 the impulse variance is irrelevant; keep it finite.
            const double si2 = op.epsilon > 0.0 ? signal_power_ / (op.epsilon * db_to_linear(op.sir_db)) : 1.0;
            return BgParams{op.epsilon, sw2, si2};
        }
        case NoiseKind::Mca: {
            // Gamma = sigma_w^2 / sigma_i^2 with the background fixed by Eb/N0.
            const double sn2 = sw2 * (1.0 + cfg_.mca_Gamma) / cfg_.mca_Gamma;
            return McaParams{cfg_.mca_A, cfg_.mca_Gamma, sn2, cfg_.mca_terms};
        }
        case NoiseKind::Sas: {
            const double scale = std::sqrt(signal_power_ / (4.0 * db_to_linear(cfg_.sas_sir_db)));
            return SasParams{cfg_.sas_alpha, cfg_.sas_beta, cfg_.sas_gamma * scale, cfg_.sas_mu * scale};
        }
    }
    throw std::logic_error("unhandled noise kind");
}

LabeledNoiseBlock LinkSimulator::draw_noise(const OperatingPoint& op, std::uint64_t seed) const {
    const std::size_t len = ofdm_.symbol_len();
    const double sw2 = background_variance(op.ebn0_db);
    Rng rng(seed);
    LabeledNoiseBlock nb;
    if (sw2 == 0.0 && (op.noise == NoiseKind::Awgn || op.epsilon == 0.0) && op.noise != NoiseKind::Mca &&
        op.noise != NoiseKind::Sas) {
        // Noiseless link.
        nb.samples.assign(len, Complex{});
        nb.impulsive.assign(len, Complex{});
        nb.labels = Mask(len, 0);
        nb.spec = BgParams{0.0, 0.0, 1.0};
        nb.seed = seed;
        return nb;
    }
    switch (op.noise) {
        case NoiseKind::Awgn:
        case NoiseKind::Bg:
            nb = sample_bg(std::get<BgParams>(noise_spec(op)), len, rng);
            break;
        case NoiseKind::Bursty:
            nb = sample_bursty(std::get<BgParams>(noise_spec(op)), cfg_.burst_len, len, rng);
            break;
        case NoiseKind::Mca:
            nb = sample_mca(std::get<McaParams>(noise_spec(op)), len, rng);
            break;
        case NoiseKind::Sas: {
            nb = sample_sas(std::get<SasParams>(noise_spec(op)), len, rng);
            // Alpha-stable impulses ride on the thermal background.
            nb.impulsive = nb.samples;
            Rng bg(derive_seed(seed, {1}));
            for (auto& s : nb.samples) s += complex_normal(bg, sw2);
            break;
        }
    }
    nb.seed = seed;
    return nb;
}

ReceivedBlock LinkSimulator::transmit(const OperatingPoint& op, std::uint64_t trial_seed) const {
    Rng bit_rng(derive_seed(trial_seed, {1}));
    Rng channel_rng(derive_seed(trial_seed, {2}));

    ReceivedBlock block;
    block.sigma_w2 = background_variance(op.ebn0_db);
    block.tx_bits.resize(info_bits_);
    for (auto& b : block.tx_bits) b = static_cast<std::uint8_t>(bit_rng() >> 63);

    Bits coded = conv_encode(block.tx_bits);
    if (cfg_.bit_interleave) coded = bit_il_.interleave(coded);
    const ComplexVec tx = ofdm_modulate(ofdm_, assemble_active(ofdm_, qpsk_map(coded)));

    block.channel = channel_generate(profile_, channel_rng);
    block.clean = channel_apply(tx, block.channel);

    LabeledNoiseBlock noise = draw_noise(op, derive_seed(trial_seed, {3}));
    if (cfg_.time_interleave) {
        // Noise arrives in transmission order; the receiver's deinterleaver
        // maps it back to symbol order.
        noise.samples = time_il_.deinterleave(noise.samples);
        if (!noise.impulsive.empty()) noise.impulsive = time_il_.deinterleave(noise.impulsive);
        if (noise.labels) noise.labels = time_il_.deinterleave(*noise.labels);
    }
    block.rx.resize(block.clean.size());
    for (std::size_t k = 0; k < block.rx.size(); ++k) block.rx[k] = block.clean[k] + noise.samples[k];
    block.impulsive = std::move(noise.impulsive);
    if (noise.labels) block.labels = std::move(*noise.labels);
    return block;
}

Bits LinkSimulator::receive(const ReceivedBlock& block, const MitigationPolicy& policy) const {
    const Mitigated m = mitigate(block.rx, policy);
    const ComplexVec grid = ofdm_demodulate(ofdm_, m.samples);
    const ComplexVec H = cfg_.perfect_csi ? block.channel.frequency_response(ofdm_.fft_size)
                                          : estimate_channel(ofdm_, grid);
    const Equalized eq = equalize(gather(grid, ofdm_.data), gather(H, ofdm_.data));

    // Only the relative per-carrier weighting matters to the decoder.
    const double nv = block.sigma_w2 > 0.0 ? block.sigma_w2 : 1.0;
    std::vector<double> var(eq.noise_scale.size());
    for (std::size_t i = 0; i < var.size(); ++i) var[i] = nv * eq.noise_scale[i];
    std::vector<double> llr = qpsk_llr(eq.symbols, var);
    if (cfg_.bit_interleave) llr = bit_il_.deinterleave(llr);
    return viterbi_decode(llr);
}

std::pair<Bits, Bits> run_link_once(const ExperimentConfig& cfg, const MitigationPolicy& policy, Rng& rng) {
    const LinkSimulator link(cfg);
    const ReceivedBlock block = link.transmit(link.operating_point(cfg.ebn0_db.front()), rng());
    return {block.tx_bits, link.receive(block, policy)};
}

std::uint64_t count_bit_errors(const Bits& a, const Bits& b) {
    if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]);
    return e;
}

}  // namespace impdet
