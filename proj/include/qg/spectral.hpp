#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace qg {

using cplx = std::complex<double>;
class Rng;

// Coefficient layout: flat index iy*N + ix, with wavenumber j = i for i < N/2
// and i - N otherwise. A field is u(x) = sum_k c_k exp(i k.x), k = (2pi/L) j.
struct RealMode {
    std::size_t flat;  // canonical member of the conjugate pair
    bool sine;         // cos part first, then sin
    double lambda;     // |k|^2
    int j1, j2;
};

class Grid {
 public:
    Grid(double L, int N);

    double L() const { return L_; }
    int N() const { return N_; }
    std::size_t size() const { return static_cast<std::size_t>(N_) * N_; }
    double lambda1() const { return k0_ * k0_; }
    double k0() const { return k0_; }
    // Largest |j1|, |j2| kept by the 2/3 rule.
    int cutoff() const { return cutoff_; }

    int wavenumber(int i) const { return i < N_ / 2 ? i : i - N_; }
    std::size_t flat(int j1, int j2) const;
    std::size_t conjugate(std::size_t f) const { return conj_[f]; }
    bool active(std::size_t f) const { return active_[f] != 0; }
    double k2(std::size_t f) const { return k2_[f]; }
    double kx(std::size_t f) const { return kx_[f]; }
    double ky(std::size_t f) const { return ky_[f]; }

    const std::vector<double>& kx_active() const { return kx_act_; }
    const std::vector<double>& ky_active() const { return ky_act_; }
    const std::vector<double>& k2_all() const { return k2_; }
    // |k|^(2p) for p in [-2, 4], zero at the mean mode.
    const std::vector<double>& k2_power(int p) const;

    // Real Laplacian eigenfunctions inside the dealiased set, ascending |k|^2,
    // ties broken lexicographically on (j1, j2).
    std::size_t num_modes() const { return modes_.size(); }
    const RealMode& mode(std::size_t n) const { return modes_.at(n - 1); }
    double lambda_n(std::size_t n) const { return mode(n).lambda; }
    const std::vector<RealMode>& modes() const { return modes_; }

    bool same_as(const Grid& o) const { return L_ == o.L_ && N_ == o.N_; }

 private:
    double L_;
    int N_;
    double k0_;
    int cutoff_;
    std::vector<std::size_t> conj_;
    std::vector<unsigned char> active_;
    std::vector<double> kx_, ky_, k2_, kx_act_, ky_act_;
    std::array<std::vector<double>, 7> k2pow_;
    std::vector<RealMode> modes_;
};

using GridPtr = std::shared_ptr<const Grid>;
GridPtr make_grid(double L, int N);

struct ScalarField {
    GridPtr grid;
    std::vector<cplx> c;

    static ScalarField zeros(GridPtr g);
    static ScalarField from_physical(GridPtr g, const std::vector<double>& u);
    std::vector<double> to_physical() const;
};

struct SpectralField2L {
    GridPtr grid;
    std::array<std::vector<cplx>, 2> layer;

    static SpectralField2L zeros(GridPtr g);
    static SpectralField2L from_layers(const ScalarField& a, const ScalarField& b);
    ScalarField get(int i) const { return {grid, layer[i]}; }

    SpectralField2L& operator+=(const SpectralField2L& o);
    SpectralField2L& operator-=(const SpectralField2L& o);
    SpectralField2L& operator*=(double s);
    void axpy(double a, const SpectralField2L& x);

    bool all_finite() const;
    // max |c_k - conj(c_{-k})| and |c_0| over both layers.
    double hermitian_defect() const;
    // Copies conj(c_k) onto c_{-k} from the canonical half and zeroes the mean.
    void enforce_hermitian();
};

SpectralField2L operator+(SpectralField2L a, const SpectralField2L& b);
SpectralField2L operator-(SpectralField2L a, const SpectralField2L& b);
SpectralField2L operator*(double s, SpectralField2L a);

void require_same_grid(const Grid& a, const Grid& b);

class LayerWeights {
 public:
    LayerWeights(double h1, double h2, double F1, double F2);

    double h1, h2, F1, F2;
    double h(int i) const { return i == 0 ? h1 : h2; }
    double p() const { return h1 * F1; }
    // Equivalence constant of |||.|||_{-1} against ||.||: 1 + 2 max(F)/lambda_1.
    double a0(const Grid& g) const;
};

// Per-mode maps between vorticity and streamfunction.
SpectralField2L streamfunction_from_vorticity(const SpectralField2L& q, const LayerWeights& w);
SpectralField2L vorticity_from_streamfunction(const SpectralField2L& psi, const LayerWeights& w);

// Dealiased J(a,b) = -a_y b_x + a_x b_y. Output lives in the 2/3-rule set.
ScalarField jacobian(const ScalarField& a, const ScalarField& b);
// Two Jacobians sharing one forward transform.
std::array<ScalarField, 2> jacobian_pair(const ScalarField& a1, const ScalarField& b1,
                                         const ScalarField& a2, const ScalarField& b2);

// B(psi, xi) = (J(psi1, Lap xi1 + F1 xi2), J(psi2, Lap xi2 + F2 xi1)).
SpectralField2L bilinear_B(const SpectralField2L& psi, const SpectralField2L& xi,
                           const LayerWeights& w);

SpectralField2L laplacian(const SpectralField2L& x);
SpectralField2L d_dx(const SpectralField2L& x);

// All norms below are squared and weighted by layer depth.
double norm_Hk_sq(const SpectralField2L& psi, int k, const LayerWeights& w);
double norm_Hk_sq(const ScalarField& u, int k);
double inner_L2(const SpectralField2L& a, const SpectralField2L& b, const LayerWeights& w);
double inner_L2(const ScalarField& a, const ScalarField& b);
// |||q|||_{-1}^2 = ||psi||^2 + p |psi1 - psi2|^2
double triple_norm_minus1_sq(const SpectralField2L& q, const LayerWeights& w);
double triple_norm_minus1_sq_psi(const SpectralField2L& psi, const LayerWeights& w);
// |||q|||_0^2 = |Lap psi|^2 + p ||psi1 - psi2||^2
double triple_norm_0_sq(const SpectralField2L& q, const LayerWeights& w);

// Keeps the first n real eigenmodes (1 <= n <= grid.num_modes()).
SpectralField2L project_low(const SpectralField2L& x, std::size_t n);
SpectralField2L project_high(const SpectralField2L& x, std::size_t n);
ScalarField project_low(const ScalarField& x, std::size_t n);

// Coefficient of u on real eigenmode m (1-based) in the unweighted L2 basis.
double real_coefficient(const std::vector<cplx>& c, const Grid& g, std::size_t m);
// Adds a * e_m to c, keeping Hermitian symmetry.
void add_real_mode(std::vector<cplx>& c, const Grid& g, std::size_t m, double a);

// Random field in the dealiased set with mode amplitudes ~ lambda^(-slope/2),
// layers drawn independently.
SpectralField2L random_field(GridPtr g, Rng& rng, double slope);

// Empirical constant for |(B(psi,psi),xi)| <= k0 ||psi|| |Lap psi| |Lap xi|.
struct BilinearConstantEstimate {
    double k0;
    std::size_t trials;
};
BilinearConstantEstimate measure_bilinear_constant(GridPtr g, const LayerWeights& w,
                                                   std::size_t trials, std::uint64_t seed);

}  // namespace qg
