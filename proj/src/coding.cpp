#include "impdet/coding.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <limits>

namespace impdet {

namespace {

// Register layout: bit 6 = current input, bit 0 = input six steps ago; the
// octal generators' MSB taps the current input.
constexpr std::array<std::array<std::uint8_t, 2>, 128> make_outputs() {
    std::array<std::array<std::uint8_t, 2>, 128> out{};
    for (unsigned reg = 0; reg < 128; ++reg) {
        for (int g = 0; g < 2; ++g) out[reg][g] = std::popcount(reg & ConvCode::kGenerators[g]) & 1u;
    }
    return out;
}

constexpr auto kOutputs = make_outputs();

}  // namespace

Bits conv_encode(std::span<const std::uint8_t> bits) {
    Bits out;
    out.reserve(ConvCode::coded_length(bits.size()));
    unsigned state = 0;
    auto push = [&](unsigned u) {
        const unsigned reg = (u << 6) | state;
        out.push_back(kOutputs[reg][0]);
        out.push_back(kOutputs[reg][1]);
        state = reg >> 1;
    };
    for (auto b : bits) push(b ? 1u : 0u);
    for (std::size_t i = 0; i < ConvCode::kTailBits; ++i) push(0);
    return out;
}

double correlation_metric(std::span<const std::uint8_t> coded, std::span<const double> llrs) {
    if (coded.size() != llrs.size()) throw std::invalid_argument("correlation_metric: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < coded.size(); ++i) m += coded[i] ? -llrs[i] : llrs[i];
    return m;
}

Bits viterbi_decode(std::span<const double> llrs) {
    if (llrs.size() % 2 != 0 || llrs.size() < 2 * ConvCode::kTailBits)
        throw std::invalid_argument("viterbi_decode: llr length must be 2 * (message + 6)");
    constexpr int S = ConvCode::kStates;
    const std::size_t steps = llrs.size() / 2;
    constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

    std::array<double, S> metric;
    metric.fill(kUnreachable);
    metric[0] = 0.0;
    std::array<double, S> next{};
    // decisions[t] bit s = oldest register bit of the survivor entering s.
    std::vector<std::uint64_t> decisions(steps, 0);

    for (std::size_t t = 0; t < steps; ++t) {
        const double l0 = llrs[2 * t];
        const double l1 = llrs[2 * t + 1];
        // Branch metric for each of the four output pairs.
        const double bm[4] = {l0 + l1, l0 - l1, -l0 + l1, -l0 - l1};
        std::uint64_t dec = 0;
        for (int s = 0; s < S; ++s) {
            const unsigned u = static_cast<unsigned>(s) >> 5;
            const unsigned base = (static_cast<unsigned>(s) & 31u) << 1;
            double best = kUnreachable;
            unsigned pick = 0;
            for (unsigned d = 0; d < 2; ++d) {
                const unsigned prev = base | d;
                if (metric[prev] == kUnreachable) continue;
                const unsigned reg = (u << 6) | prev;
                const double m = metric[prev] + bm[(kOutputs[reg][0] << 1) | kOutputs[reg][1]];
                if (m > best) {  // strict: ties keep d = 0
                    best = m;
                    pick = d;
                }
            }
            next[s] = best;
            dec |= static_cast<std::uint64_t>(pick) << s;
        }
        decisions[t] = dec;
        metric = next;
    }

    Bits decoded(steps);
    unsigned state = 0;
    for (std::size_t t = steps; t-- > 0;) {
        decoded[t] = static_cast<std::uint8_t>(state >> 5);
        const unsigned d = (decisions[t] >> state) & 1u;
        state = ((state & 31u) << 1) | d;
    }
    decoded.resize(steps - ConvCode::kTailBits);
    return decoded;
}

BlockInterleaver::BlockInterleaver(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("BlockInterleaver: rows and cols must be >= 1");
}

std::vector<std::size_t> BlockInterleaver::permutation(std::size_t n) const {
    if (n > capacity()) throw std::invalid_argument("BlockInterleaver: sequence longer than rows*cols");
    std::vector<std::size_t> perm;
    perm.reserve(n);
    for (std::size_t c = 0; c < cols_; ++c) {
        for (std::size_t r = 0; r < rows_; ++r) {
            const std::size_t idx = r * cols_ + c;
            if (idx < n) perm.push_back(idx);
        }
    }
    return perm;
}

}  // namespace impdet
