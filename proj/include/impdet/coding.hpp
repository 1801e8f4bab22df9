#pragma once

// Rate-1/2, K=7 convolutional code (generators 171/133 octal) with
// zero-tail termination, soft-decision Viterbi decoding and a block
// interleaver.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "impdet/types.hpp"

namespace impdet {

struct ConvCode {
    static constexpr int kConstraintLength = 7;
    static constexpr int kMemory = kConstraintLength - 1;
    static constexpr int kStates = 1 << kMemory;
    static constexpr unsigned kGenerators[2] = {0171, 0133};
    static constexpr std::size_t kTailBits = kMemory;

    static constexpr std::size_t coded_length(std::size_t message_bits) { return 2 * (message_bits + kTailBits); }
};

/// Feed-forward encoding followed by 6 zero tail bits. Output 2 * (n + 6) bits,
/// interleaved as (g171, g133) per input bit.
Bits conv_encode(std::span<const std::uint8_t> bits);

/// Maximum-likelihood decoding over the 64-state trellis with correlation
/// metrics sum((1 - 2c) * llr). Start and end in state 0. Ties keep the
/// predecessor whose oldest register bit is 0.
/// Throws std::invalid_argument unless llrs.size() is even and >= 12.
Bits viterbi_decode(std::span<const double> llrs);

/// Path metric of a coded sequence against the LLRs (same metric the decoder maximizes).
double correlation_metric(std::span<const std::uint8_t> coded, std::span<const double> llrs);

/// Rows x cols block interleaver: written row-wise, read column-wise. A
/// sequence shorter than rows*cols is handled by skipping the unused cells,
/// so the map stays a bijection on [0, n).
class BlockInterleaver {
public:
    BlockInterleaver(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t capacity() const { return rows_ * cols_; }

    /// perm[i] = input index emitted at output position i, for length n.
    std::vector<std::size_t> permutation(std::size_t n) const;

    template <class T>
    std::vector<T> interleave(std::span<const T> in) const {
        const auto perm = permutation(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[perm[i]];
        return out;
    }

    template <class T>
    std::vector<T> deinterleave(std::span<const T> in) const {
        const auto perm = permutation(in.size());
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < in.size(); ++i) out[perm[i]] = in[i];
        return out;
    }

    template <class T>
    std::vector<T> interleave(const std::vector<T>& in) const { return interleave(std::span<const T>(in)); }
    template <class T>
    std::vector<T> deinterleave(const std::vector<T>& in) const { return deinterleave(std::span<const T>(in)); }

private:
    std::size_t rows_;
    std::size_t cols_;
};

}  // namespace impdet
