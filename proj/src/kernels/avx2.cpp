#include "qg/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#define QG_AVX2 __attribute__((target("avx2")))

namespace qg::kernels {
namespace {

// (w[0], w[0], w[1], w[1]) so each complex lane pair sees its own weight.
QG_AVX2 inline __m256d load_pair_broadcast(const double* w) {
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w)), 0x50);
}

QG_AVX2 inline __m256d cmul(__m256d a, __m256d b) {
    const __m256d re = _mm256_movedup_pd(a);
    const __m256d im = _mm256_permute_pd(a, 0xF);
    const __m256d bs = _mm256_permute_pd(b, 0x5);
    return _mm256_addsub_pd(_mm256_mul_pd(re, b), _mm256_mul_pd(im, bs));
}

QG_AVX2 inline __m256d ld(const cplx* p, std::size_t i) {
    return _mm256_loadu_pd(reinterpret_cast<const double*>(p + i));
}

QG_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

QG_AVX2 void gradient_pack(const cplx* a, const double* kx, const double* ky,
                           cplx* out, std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    double* op = reinterpret_cast<double*>(out);
    const __m256d sign = _mm256_set_pd(0.0, -0.0, 0.0, -0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(ap + 2 * i);
        const __m256d vs = _mm256_permute_pd(v, 0x5);
        const __m256d t1 = _mm256_xor_pd(_mm256_mul_pd(load_pair_broadcast(kx + i), vs), sign);
        const __m256d t2 = _mm256_mul_pd(load_pair_broadcast(ky + i), v);
        _mm256_storeu_pd(op + 2 * i, _mm256_sub_pd(t1, t2));
    }
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        out[i] = cplx(-kx[i] * ai - ky[i] * ar, kx[i] * ar - ky[i] * ai);
    }
}

QG_AVX2 void jacobian_pack(const cplx* z1, const cplx* w1, const cplx* z2,
                           const cplx* w2, cplx* out, std::size_t n) {
    const double* a = reinterpret_cast<const double*>(z1);
    const double* b = reinterpret_cast<const double*>(w1);
    const double* c = reinterpret_cast<const double*>(z2);
    const double* d = reinterpret_cast<const double*>(w2);
    double* op = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + 2 * i),
                                         _mm256_permute_pd(_mm256_loadu_pd(b + 2 * i), 0x5));
        const __m256d p2 = _mm256_mul_pd(_mm256_loadu_pd(c + 2 * i),
                                         _mm256_permute_pd(_mm256_loadu_pd(d + 2 * i), 0x5));
        _mm256_storeu_pd(op + 2 * i, _mm256_hsub_pd(p1, p2));
    }
    for (; i < n; ++i) {
        const double j1 = z1[i].real() * w1[i].imag() - z1[i].imag() * w1[i].real();
        const double j2 = z2[i].real() * w2[i].imag() - z2[i].imag() * w2[i].real();
        out[i] = cplx(j1, j2);
    }
}

QG_AVX2 void mode_matvec(const cplx* m11, const cplx* m12, const cplx* m21,
                         const cplx* m22, const cplx* b1, const cplx* b2, cplx* o1,
                         cplx* o2, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d x = ld(b1, i), y = ld(b2, i);
        const __m256d r1 = _mm256_add_pd(cmul(ld(m11, i), x), cmul(ld(m12, i), y));
        const __m256d r2 = _mm256_add_pd(cmul(ld(m21, i), x), cmul(ld(m22, i), y));
        _mm256_storeu_pd(reinterpret_cast<double*>(o1 + i), r1);
        _mm256_storeu_pd(reinterpret_cast<double*>(o2 + i), r2);
    }
    if (i < n) scalar_table().mode_matvec(m11 + i, m12 + i, m21 + i, m22 + i, b1 + i,
                                          b2 + i, o1 + i, o2 + i, n - i);
}

QG_AVX2 double weighted_sq(const cplx* c, const double* w, std::size_t n) {
    const double* cp = reinterpret_cast<const double*>(c);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(cp + 2 * i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(load_pair_broadcast(w + i), _mm256_mul_pd(v, v)));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += w[i] * (c[i].real() * c[i].real() + c[i].imag() * c[i].imag());
    return s;
}

QG_AVX2 double weighted_dot(const cplx* a, const cplx* b, const double* w,
                            std::size_t n) {
    const double* ap = reinterpret_cast<const double*>(a);
    const double* bp = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_mul_pd(_mm256_loadu_pd(ap + 2 * i), _mm256_loadu_pd(bp + 2 * i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(load_pair_broadcast(w + i), v));
    }
    double s = hsum(acc);
    for (; i < n; ++i)
        s += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    return s;
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable t{"avx2", gradient_pack, jacobian_pack, mode_matvec,
                               weighted_sq, weighted_dot};
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") ? &t : nullptr;
}

}  // namespace qg::kernels

#else

namespace qg::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace qg::kernels

#endif
