#include "impdet/rng.hpp"

#include <cmath>

namespace impdet {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master);
    for (auto p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
    return s;
}

Complex complex_normal(Rng& rng, double variance) {
    // Marsaglia polar method; yields two independent standard normals.
    double u = 0.0, v = 0.0, s = 0.0;
    do {
        u = 2.0 * uniform01(rng) - 1.0;
        v = 2.0 * uniform01(rng) - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s) * std::sqrt(variance / 2.0);
    return {u * scale, v * scale};
}

double uniform01(Rng& rng) {
    // 53 random mantissa bits
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace impdet
