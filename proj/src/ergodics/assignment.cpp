#include <cmath>
#include <limits>
#include <numeric>

#include "qg/ergodics.hpp"

namespace qg {

// Shortest augmenting path with row/column potentials (Kuhn-Munkres), O(n^3).
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
    if (cost.size() != n * n) throw std::invalid_argument("assignment: cost matrix must be n x n");
    for (double c : cost)
        if (!std::isfinite(c)) throw std::invalid_argument("assignment: non-finite cost");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based internally; column 0 is the virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

double empirical_wasserstein(const std::vector<SpectralField2L>& a,
                             const std::vector<SpectralField2L>& b,
                             const std::function<double(const SpectralField2L&, const SpectralField2L&)>& dist,
                             std::uint64_t subsample_seed) {
    if (a.size() != b.size()) throw std::invalid_argument("empirical_wasserstein: sample sizes differ");
    if (a.empty()) throw std::invalid_argument("empirical_wasserstein: empty samples");
    std::vector<std::size_t> ia(a.size()), ib(b.size());
    std::iota(ia.begin(), ia.end(), 0);
    std::iota(ib.begin(), ib.end(), 0);
    const std::size_t n = std::min(a.size(), kMaxAssignmentSamples);
    if (n < a.size()) {
        Rng rng(subsample_seed, stream_id(StreamRole::measurement, std::uint64_t{1} << 40));
        for (auto* idx : {&ia, &ib})
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.uniform() * (idx->size() - i));
                std::swap((*idx)[i], (*idx)[std::min(j, idx->size() - 1)]);
            }
    }
    std::vector<double> c(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[i * n + j] = dist(a[ia[i]], b[ib[j]]);
    const auto m = solve_assignment(c, n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += c[i * n + m[i]];
    return s / static_cast<double>(n);
}

}  // namespace qg
