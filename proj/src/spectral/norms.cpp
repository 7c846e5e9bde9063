#include "qg/kernels.hpp"
#include "qg/spectral.hpp"

namespace qg {

namespace {

double wsq(const std::vector<cplx>& c, const std::vector<double>& w) {
    return kernels::active().weighted_sq(c.data(), w.data(), c.size());
}

double wdot(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<double>& w) {
    return kernels::active().weighted_dot(a.data(), b.data(), w.data(), a.size());
}

double parseval(const Grid& g) { return g.L() * g.L(); }

}  // namespace

double norm_Hk_sq(const ScalarField& u, int k) {
    const Grid& g = *u.grid;
    return parseval(g) * wsq(u.c, g.k2_power(k));
}

double norm_Hk_sq(const SpectralField2L& psi, int k, const LayerWeights& w) {
    const Grid& g = *psi.grid;
    const auto& wk = g.k2_power(k);
    return parseval(g) * (w.h1 * wsq(psi.layer[0], wk) + w.h2 * wsq(psi.layer[1], wk));
}

double inner_L2(const ScalarField& a, const ScalarField& b) {
    require_same_grid(*a.grid, *b.grid);
    const Grid& g = *a.grid;
    return parseval(g) * wdot(a.c, b.c, g.k2_power(0));
}

double inner_L2(const SpectralField2L& a, const SpectralField2L& b, const LayerWeights& w) {
    require_same_grid(*a.grid, *b.grid);
    const Grid& g = *a.grid;
    const auto& one = g.k2_power(0);
    return parseval(g) * (w.h1 * wdot(a.layer[0], b.layer[0], one) +
                          w.h2 * wdot(a.layer[1], b.layer[1], one));
}

double triple_norm_minus1_sq_psi(const SpectralField2L& psi, const LayerWeights& w) {
    const Grid& g = *psi.grid;
    std::vector<cplx> d(psi.layer[0].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = psi.layer[0][i] - psi.layer[1][i];
    return norm_Hk_sq(psi, 1, w) + w.p() * parseval(g) * wsq(d, g.k2_power(0));
}

double triple_norm_minus1_sq(const SpectralField2L& q, const LayerWeights& w) {
    return triple_norm_minus1_sq_psi(streamfunction_from_vorticity(q, w), w);
}

double triple_norm_0_sq(const SpectralField2L& q, const LayerWeights& w) {
    const SpectralField2L psi = streamfunction_from_vorticity(q, w);
    const Grid& g = *q.grid;
    std::vector<cplx> d(psi.layer[0].size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = psi.layer[0][i] - psi.layer[1][i];
    return norm_Hk_sq(psi, 2, w) + w.p() * parseval(g) * wsq(d, g.k2_power(1));
}

}  // namespace qg
