#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace qg::kernels {

using cplx = std::complex<double>;

// Inner loops of the spectral solver. Elementwise kernels must agree bit-for-bit
// across variants; the two reductions only up to summation order.
struct KernelTable {
    const char* name;

    // out = i*kx*a + i*(i*ky*a): real part of the inverse transform is a_x,
    // imaginary part is a_y. kx/ky carry the dealiasing mask (zero outside).
    void (*gradient_pack)(const cplx* a, const double* kx, const double* ky,
                          cplx* out, std::size_t n);

    // Given z = (a_x + i a_y) and w = (b_x + i b_y) on the physical grid for two
    // layers, out = J(a1,b1) + i J(a2,b2) with J = a_x b_y - a_y b_x.
    void (*jacobian_pack)(const cplx* z1, const cplx* w1, const cplx* z2,
                          const cplx* w2, cplx* out, std::size_t n);

    // Per-mode 2x2 complex mat-vec: (o1,o2) = [[m11,m12],[m21,m22]] (b1,b2).
    void (*mode_matvec)(const cplx* m11, const cplx* m12, const cplx* m21,
                        const cplx* m22, const cplx* b1, const cplx* b2,
                        cplx* o1, cplx* o2, std::size_t n);

    // sum_i w[i] |c[i]|^2
    double (*weighted_sq)(const cplx* c, const double* w, std::size_t n);

    // sum_i w[i] Re(a[i] conj(b[i]))
    double (*weighted_dot)(const cplx* a, const cplx* b, const double* w,
                           std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the binary or the CPU lacks AVX2.
const KernelTable* avx2_table();

// Selected once: QG2_KERNELS=scalar|avx2 forces a variant, otherwise the best
// supported one.
const KernelTable& active();
std::string active_name();

}  // namespace qg::kernels
