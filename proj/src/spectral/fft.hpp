#pragma once

#include <complex>

namespace qg::detail {

// Shared 2D complex transform of size N x N. Plans are built once per N under a
// lock; execution on caller buffers is thread-safe (in and out must differ).
class Fft {
 public:
    static const Fft& get(int N);
    // out = sum_k in_k exp(+i k.x)
    void to_physical(const std::complex<double>* in, std::complex<double>* out) const;
    // out = N^-2 sum_x in_x exp(-i k.x)
    void to_spectral(const std::complex<double>* in, std::complex<double>* out) const;

    Fft(int N, void* fwd, void* bwd) : N_(N), fwd_(fwd), bwd_(bwd) {}

 private:
    int N_;
    void* fwd_;
    void* bwd_;
};

}  // namespace qg::detail
