#include "qg/kernels.hpp"

namespace qg::kernels {
namespace {

void gradient_pack(const cplx* a, const double* kx, const double* ky, cplx* out,
                   std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        out[i] = cplx(-kx[i] * ai - ky[i] * ar, kx[i] * ar - ky[i] * ai);
    }
}

void jacobian_pack(const cplx* z1, const cplx* w1, const cplx* z2, const cplx* w2,
                   cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double j1 = z1[i].real() * w1[i].imag() - z1[i].imag() * w1[i].real();
        const double j2 = z2[i].real() * w2[i].imag() - z2[i].imag() * w2[i].real();
        out[i] = cplx(j1, j2);
    }
}

inline cplx cmul(cplx a, cplx b) {
    return cplx(a.real() * b.real() - a.imag() * b.imag(),
                a.real() * b.imag() + a.imag() * b.real());
}

void mode_matvec(const cplx* m11, const cplx* m12, const cplx* m21, const cplx* m22,
                 const cplx* b1, const cplx* b2, cplx* o1, cplx* o2, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const cplx x = b1[i], y = b2[i];
        const cplx p = cmul(m11[i], x), q = cmul(m12[i], y);
        const cplx r = cmul(m21[i], x), s = cmul(m22[i], y);
        o1[i] = cplx(p.real() + q.real(), p.imag() + q.imag());
        o2[i] = cplx(r.real() + s.real(), r.imag() + s.imag());
    }
}

double weighted_sq(const cplx* c, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += w[i] * (c[i].real() * c[i].real() + c[i].imag() * c[i].imag());
    return s;
}

double weighted_dot(const cplx* a, const cplx* b, const double* w, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return s;
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{"scalar", gradient_pack, jacobian_pack, mode_matvec,
                               weighted_sq, weighted_dot};
    return t;
}

}  // namespace qg::kernels
