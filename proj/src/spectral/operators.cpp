#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "qg/kernels.hpp"
#include "qg/rng.hpp"
#include "qg/spectral.hpp"

namespace qg {

SpectralField2L streamfunction_from_vorticity(const SpectralField2L& q, const LayerWeights& w) {
    const Grid& g = *q.grid;
    SpectralField2L psi = SpectralField2L::zeros(q.grid);
    for (std::size_t f = 1; f < g.size(); ++f) {
        const double lam = g.k2(f);
        // (-lam I + M)^-1 with M = [[-F1, F1], [F2, -F2]]
        const double det = lam * (lam + w.F1 + w.F2);
        const cplx a = q.layer[0][f], b = q.layer[1][f];
        psi.layer[0][f] = (-(lam + w.F2) * a - w.F1 * b) / det;
        psi.layer[1][f] = (-w.F2 * a - (lam + w.F1) * b) / det;
    }
    return psi;
}

SpectralField2L vorticity_from_streamfunction(const SpectralField2L& psi, const LayerWeights& w) {
    const Grid& g = *psi.grid;
    SpectralField2L q = SpectralField2L::zeros(psi.grid);
    for (std::size_t f = 1; f < g.size(); ++f) {
        const double lam = g.k2(f);
        const cplx a = psi.layer[0][f], b = psi.layer[1][f];
        q.layer[0][f] = -lam * a + w.F1 * (b - a);
        q.layer[1][f] = -lam * b + w.F2 * (a - b);
    }
    return q;
}

std::array<ScalarField, 2> jacobian_pair(const ScalarField& a1, const ScalarField& b1,
                                         const ScalarField& a2, const ScalarField& b2) {
    for (const ScalarField* s : {&b1, &a2, &b2}) require_same_grid(*a1.grid, *s->grid);
    const Grid& g = *a1.grid;
    const auto& K = kernels::active();
    const auto& fft = detail::Fft::get(g.N());
    const std::size_t n = g.size();
    const double* kx = g.kx_active().data();
    const double* ky = g.ky_active().data();

    std::vector<cplx> spec(n), z1(n), w1(n), z2(n), w2(n);
    const std::pair<const ScalarField*, std::vector<cplx>*> jobs[] = {
        {&a1, &z1}, {&b1, &w1}, {&a2, &z2}, {&b2, &w2}};
    for (const auto& [src, dst] : jobs) {
        K.gradient_pack(src->c.data(), kx, ky, spec.data(), n);
        fft.to_physical(spec.data(), dst->data());
    }
    K.jacobian_pack(z1.data(), w1.data(), z2.data(), w2.data(), spec.data(), n);
    std::vector<cplx> W(n);
    fft.to_spectral(spec.data(), W.data());

    std::array<ScalarField, 2> out{ScalarField::zeros(a1.grid), ScalarField::zeros(a1.grid)};
    for (std::size_t f = 0; f < n; ++f) {
        if (!g.active(f)) continue;
        const cplx wc = std::conj(W[g.conjugate(f)]);
        out[0].c[f] = 0.5 * (W[f] + wc);
        const cplx d = W[f] - wc;
        out[1].c[f] = cplx(0.5 * d.imag(), -0.5 * d.real());
    }
    return out;
}

ScalarField jacobian(const ScalarField& a, const ScalarField& b) {
    require_same_grid(*a.grid, *b.grid);
    const ScalarField zero = ScalarField::zeros(a.grid);
    return jacobian_pair(a, b, zero, zero)[0];
}

SpectralField2L bilinear_B(const SpectralField2L& psi, const SpectralField2L& xi,
                           const LayerWeights& w) {
    require_same_grid(*psi.grid, *xi.grid);
    const Grid& g = *psi.grid;
    ScalarField r1 = ScalarField::zeros(psi.grid), r2 = ScalarField::zeros(psi.grid);
    for (std::size_t f = 0; f < g.size(); ++f) {
        r1.c[f] = -g.k2(f) * xi.layer[0][f] + w.F1 * xi.layer[1][f];
        r2.c[f] = -g.k2(f) * xi.layer[1][f] + w.F2 * xi.layer[0][f];
    }
    auto j = jacobian_pair(psi.get(0), r1, psi.get(1), r2);
    return SpectralField2L::from_layers(j[0], j[1]);
}

SpectralField2L laplacian(const SpectralField2L& x) {
    SpectralField2L y = x;
    for (auto& v : y.layer)
        for (std::size_t f = 0; f < v.size(); ++f) v[f] *= -x.grid->k2(f);
    return y;
}

SpectralField2L d_dx(const SpectralField2L& x) {
    SpectralField2L y = x;
    for (auto& v : y.layer)
        for (std::size_t f = 0; f < v.size(); ++f) v[f] *= cplx(0.0, x.grid->kx(f));
    return y;
}

namespace {

void check_n(const Grid& g, std::size_t n) {
    if (n < 1 || n > g.num_modes())
        throw std::out_of_range("project_low: n must lie in [1, " +
                                std::to_string(g.num_modes()) + "]");
}

void project_vec(const std::vector<cplx>& in, std::vector<cplx>& out, const Grid& g,
                 std::size_t n) {
    std::fill(out.begin(), out.end(), cplx(0.0));
    for (std::size_t m = 1; m <= n; ++m) {
        const RealMode& md = g.mode(m);
        const cplx c = in[md.flat];
        const cplx keep = md.sine ? cplx(0.0, c.imag()) : cplx(c.real(), 0.0);
        out[md.flat] += keep;
        out[g.conjugate(md.flat)] += std::conj(keep);
    }
}

}  // namespace

SpectralField2L project_low(const SpectralField2L& x, std::size_t n) {
    check_n(*x.grid, n);
    SpectralField2L y = SpectralField2L::zeros(x.grid);
    for (int l = 0; l < 2; ++l) project_vec(x.layer[l], y.layer[l], *x.grid, n);
    return y;
}

SpectralField2L project_high(const SpectralField2L& x, std::size_t n) {
    return x - project_low(x, n);
}

ScalarField project_low(const ScalarField& x, std::size_t n) {
    check_n(*x.grid, n);
    ScalarField y = ScalarField::zeros(x.grid);
    project_vec(x.c, y.c, *x.grid, n);
    return y;
}

BilinearConstantEstimate measure_bilinear_constant(GridPtr g, const LayerWeights& w,
                                                   std::size_t trials, std::uint64_t seed) {
    // For each psi the worst xi is Lap^-2 B(psi,psi), attaining |Lap^-1 B|.
    // A random xi is tried as well so the estimate does not rest on that identity alone.
    Rng rng(seed, stream_id(StreamRole::measurement, 0));
    double best = 0.0;
    const double slopes[] = {0.0, 1.0, 2.0, 3.0, 4.0};
    for (std::size_t t = 0; t < trials; ++t) {
        const double s = slopes[t % 5] + rng.uniform();
        SpectralField2L psi = random_field(g, rng, s);
        const SpectralField2L b = bilinear_B(psi, psi, w);
        const double denom_psi = std::sqrt(norm_Hk_sq(psi, 1, w) * norm_Hk_sq(psi, 2, w));
        if (denom_psi == 0.0) continue;

        SpectralField2L xi_opt = b;
        for (auto& v : xi_opt.layer)
            for (std::size_t f = 0; f < v.size(); ++f) v[f] *= g->k2_power(-2)[f];
        SpectralField2L xi_rnd = random_field(g, rng, rng.uniform() * 4.0);
        for (const SpectralField2L* xi : {&xi_opt, &xi_rnd}) {
            const double dxi = std::sqrt(norm_Hk_sq(*xi, 2, w));
            if (dxi == 0.0) continue;
            best = std::max(best, std::abs(inner_L2(b, *xi, w)) / (denom_psi * dxi));
        }
    }
    return {best, trials};
}

}  // namespace qg
