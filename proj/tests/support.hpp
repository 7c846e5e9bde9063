#pragma once

#include <cmath>
#include <vector>

#include "qg/rng.hpp"
#include "qg/spectral.hpp"

namespace qg::test {

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Samples f on the periodic grid, x = i L/N (fast index), y = j L/N.
template <class F>
std::vector<double> sample(const Grid& g, F f) {
    const int N = g.N();
    const double h = g.L() / N;
    std::vector<double> u(g.size());
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) u[static_cast<std::size_t>(j) * N + i] = f(i * h, j * h);
    return u;
}

// Trapezoid rule on a periodic grid: exact for the band-limited products used here.
inline double quadrature(const Grid& g, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    const double h = g.L() / g.N();
    return s * h * h;
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace qg::test
