#include "impdet/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace impdet {

namespace {

// Planning is not thread-safe in FFTW; execution with the new-array interface is.
fftw_plan plan_for(int n, int sign) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard lock(mu);
    auto key = std::make_pair(n, sign);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    ComplexVec a(n), b(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
}

ComplexVec transform(std::span<const Complex> in, int sign) {
    const int n = static_cast<int>(in.size());
    ComplexVec src(in.begin(), in.end());
    ComplexVec out(in.size());
    if (n == 0) return out;
    fftw_execute_dft(plan_for(n, sign), reinterpret_cast<fftw_complex*>(src.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace

ComplexVec dft(std::span<const Complex> in) { return transform(in, FFTW_FORWARD); }
ComplexVec idft(std::span<const Complex> in) { return transform(in, FFTW_BACKWARD); }

}  // namespace impdet
