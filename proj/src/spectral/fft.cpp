#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace qg::detail {

const Fft& Fft::get(int N) {
    static std::mutex mtx;
    static std::map<int, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(N);
    if (it != cache.end()) return *it->second;

    std::vector<std::complex<double>> a(static_cast<std::size_t>(N) * N), b(a.size());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan fwd = fftw_plan_dft_2d(N, N, pa, pb, FFTW_FORWARD, flags);
    fftw_plan bwd = fftw_plan_dft_2d(N, N, pa, pb, FFTW_BACKWARD, flags);
    auto res = cache.emplace(N, std::make_unique<Fft>(N, fwd, bwd));
    return *res.first->second;
}

void Fft::to_physical(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void Fft::to_spectral(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
    const double s = 1.0 / (static_cast<double>(N_) * N_);
    const std::size_t n = static_cast<std::size_t>(N_) * N_;
    for (std::size_t i = 0; i < n; ++i) out[i] *= s;
}

}  // namespace qg::detail
