#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qg/spectral.hpp"

namespace qg {

Grid::Grid(double L, int N) : L_(L), N_(N) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("grid: domain length L must be positive and finite");
    if (N < 8 || N % 2 != 0)
        throw std::invalid_argument("grid: N must be even and >= 8, got " + std::to_string(N));
    k0_ = 2.0 * std::numbers::pi / L;
    cutoff_ = (N - 1) / 3;

    const std::size_t n = size();
    conj_.resize(n);
    active_.assign(n, 0);
    kx_.resize(n);
    ky_.resize(n);
    k2_.resize(n);
    kx_act_.assign(n, 0.0);
    ky_act_.assign(n, 0.0);
    for (auto& v : k2pow_) v.assign(n, 0.0);

    for (int iy = 0; iy < N; ++iy) {
        for (int ix = 0; ix < N; ++ix) {
            const std::size_t f = static_cast<std::size_t>(iy) * N + ix;
            const int j1 = wavenumber(ix), j2 = wavenumber(iy);
            conj_[f] = static_cast<std::size_t>((N - iy) % N) * N + (N - ix) % N;
            kx_[f] = k0_ * j1;
            ky_[f] = k0_ * j2;
            k2_[f] = kx_[f] * kx_[f] + ky_[f] * ky_[f];
            const bool act = (j1 != 0 || j2 != 0) && std::abs(j1) <= cutoff_ &&
                             std::abs(j2) <= cutoff_;
            active_[f] = act ? 1 : 0;
            if (act) {
                kx_act_[f] = kx_[f];
                ky_act_[f] = ky_[f];
            }
            if (f != 0)
                for (int p = -2; p <= 4; ++p) k2pow_[p + 2][f] = std::pow(k2_[f], p);
            if (act && (j1 > 0 || (j1 == 0 && j2 > 0))) {
                modes_.push_back({f, false, k2_[f], j1, j2});
                modes_.push_back({f, true, k2_[f], j1, j2});
            }
        }
    }
    std::stable_sort(modes_.begin(), modes_.end(), [](const RealMode& a, const RealMode& b) {
        const long la = static_cast<long>(a.j1) * a.j1 + static_cast<long>(a.j2) * a.j2;
        const long lb = static_cast<long>(b.j1) * b.j1 + static_cast<long>(b.j2) * b.j2;
        if (la != lb) return la < lb;
        if (a.j1 != b.j1) return a.j1 < b.j1;
        if (a.j2 != b.j2) return a.j2 < b.j2;
        return !a.sine && b.sine;
    });
}

std::size_t Grid::flat(int j1, int j2) const {
    if (std::abs(j1) > N_ / 2 || std::abs(j2) > N_ / 2)
        throw std::out_of_range("grid: wavenumber outside the grid");
    const int ix = (j1 % N_ + N_) % N_, iy = (j2 % N_ + N_) % N_;
    return static_cast<std::size_t>(iy) * N_ + ix;
}

const std::vector<double>& Grid::k2_power(int p) const {
    if (p < -2 || p > 4) throw std::out_of_range("grid: Sobolev index must lie in [-2, 4]");
    return k2pow_[p + 2];
}

GridPtr make_grid(double L, int N) { return std::make_shared<const Grid>(L, N); }

void require_same_grid(const Grid& a, const Grid& b) {
    if (!a.same_as(b))
        throw std::invalid_argument("grid mismatch: fields live on different grids");
}

}  // namespace qg
