#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "qg/rng.hpp"
#include "qg/spectral.hpp"

namespace qg {

ScalarField ScalarField::zeros(GridPtr g) {
    const std::size_t n = g->size();
    return {std::move(g), std::vector<cplx>(n)};
}

ScalarField ScalarField::from_physical(GridPtr g, const std::vector<double>& u) {
    if (u.size() != g->size()) throw std::invalid_argument("from_physical: size mismatch");
    std::vector<cplx> in(u.begin(), u.end()), out(u.size());
    detail::Fft::get(g->N()).to_spectral(in.data(), out.data());
    out[0] = 0.0;
    for (std::size_t f = 1; f < out.size(); ++f) {
        const std::size_t c = g->conjugate(f);
        if (c < f) continue;
        const cplx v = 0.5 * (out[f] + std::conj(out[c]));
        out[f] = v;
        out[c] = std::conj(v);
    }
    return {std::move(g), std::move(out)};
}

std::vector<double> ScalarField::to_physical() const {
    std::vector<cplx> out(c.size());
    detail::Fft::get(grid->N()).to_physical(c.data(), out.data());
    std::vector<double> u(c.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = out[i].real();
    return u;
}

SpectralField2L SpectralField2L::zeros(GridPtr g) {
    const std::size_t n = g->size();
    return {std::move(g), {std::vector<cplx>(n), std::vector<cplx>(n)}};
}

SpectralField2L SpectralField2L::from_layers(const ScalarField& a, const ScalarField& b) {
    require_same_grid(*a.grid, *b.grid);
    return {a.grid, {a.c, b.c}};
}

SpectralField2L& SpectralField2L::operator+=(const SpectralField2L& o) {
    require_same_grid(*grid, *o.grid);
    for (int l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < layer[l].size(); ++i) layer[l][i] += o.layer[l][i];
    return *this;
}

SpectralField2L& SpectralField2L::operator-=(const SpectralField2L& o) {
    require_same_grid(*grid, *o.grid);
    for (int l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < layer[l].size(); ++i) layer[l][i] -= o.layer[l][i];
    return *this;
}

SpectralField2L& SpectralField2L::operator*=(double s) {
    for (auto& v : layer)
        for (auto& x : v) x *= s;
    return *this;
}

void SpectralField2L::axpy(double a, const SpectralField2L& x) {
    require_same_grid(*grid, *x.grid);
    for (int l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < layer[l].size(); ++i) layer[l][i] += a * x.layer[l][i];
}

bool SpectralField2L::all_finite() const {
    for (const auto& v : layer)
        for (const auto& x : v)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

double SpectralField2L::hermitian_defect() const {
    double d = 0.0;
    for (const auto& v : layer) {
        d = std::max(d, std::abs(v[0]));
        for (std::size_t f = 1; f < v.size(); ++f)
            d = std::max(d, std::abs(v[f] - std::conj(v[grid->conjugate(f)])));
    }
    return d;
}

void SpectralField2L::enforce_hermitian() {
    for (auto& v : layer) {
        v[0] = 0.0;
        for (std::size_t f = 1; f < v.size(); ++f) {
            const std::size_t c = grid->conjugate(f);
            if (c == f)
                v[f] = v[f].real();
            else if (c > f)
                v[c] = std::conj(v[f]);
        }
    }
}

SpectralField2L operator+(SpectralField2L a, const SpectralField2L& b) { return a += b; }
SpectralField2L operator-(SpectralField2L a, const SpectralField2L& b) { return a -= b; }
SpectralField2L operator*(double s, SpectralField2L a) { return a *= s; }

LayerWeights::LayerWeights(double h1_, double h2_, double F1_, double F2_)
    : h1(h1_), h2(h2_), F1(F1_), F2(F2_) {
    for (double v : {h1, h2, F1, F2})
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("layer weights: h1, h2, F1, F2 must be positive");
    const double p1 = h1 * F1, p2 = h2 * F2;
    if (std::abs(p1 - p2) > 1e-12 * std::max(p1, p2))
        throw std::invalid_argument("layer weights: h1*F1 must equal h2*F2");
}

double LayerWeights::a0(const Grid& g) const {
    return 1.0 + 2.0 * std::max(F1, F2) / g.lambda1();
}

double real_coefficient(const std::vector<cplx>& c, const Grid& g, std::size_t m) {
    const RealMode& md = g.mode(m);
    const double s = std::numbers::sqrt2 * g.L();
    return md.sine ? -s * c[md.flat].imag() : s * c[md.flat].real();
}

void add_real_mode(std::vector<cplx>& c, const Grid& g, std::size_t m, double a) {
    const RealMode& md = g.mode(m);
    const double s = a / (std::numbers::sqrt2 * g.L());
    const cplx d = md.sine ? cplx(0.0, -s) : cplx(s, 0.0);
    c[md.flat] += d;
    c[g.conjugate(md.flat)] += std::conj(d);
}

SpectralField2L random_field(GridPtr g, Rng& rng, double slope) {
    SpectralField2L x = SpectralField2L::zeros(g);
    for (int l = 0; l < 2; ++l)
        for (std::size_t m = 1; m <= g->num_modes(); ++m)
            add_real_mode(x.layer[l], *g, m,
                          std::pow(g->lambda_n(m), -0.5 * slope) * rng.normal());
    return x;
}

}  // namespace qg
