#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qg/rng.hpp"
#include "qg/spectral.hpp"

namespace qg {

struct PhysicalParams {
    double f0, g, rho1, rho2, h1, h2;

    double reduced_gravity() const;  // g (rho2 - rho1) / rho0
    LayerWeights weights() const;    // F_i = f0^2 / (g' h_i)
    void validate() const;
};

// Noise variances sigma_m on the real eigenmodes m = 1..n_active of layer 1.
class NoiseSpec {
 public:
    NoiseSpec() = default;
    static NoiseSpec power_law(const Grid& g, double c, double s, std::size_t k_max);
    static NoiseSpec from_list(std::vector<double> sigma);

    std::size_t n_active() const { return sigma_.size(); }
    // 1-based; zero beyond n_active
    double sigma(std::size_t m) const { return m >= 1 && m <= sigma_.size() ? sigma_[m - 1] : 0.0; }
    const std::vector<double>& values() const { return sigma_; }
    double trace() const;
    void validate(const Grid& g) const;

 private:
    std::vector<double> sigma_;
};

struct ModelParams {
    GridPtr grid;
    LayerWeights weights{1, 1, 1, 1};
    double nu = 0.0;
    double r = 0.0;
    double beta = 0.0;
    ScalarField forcing;  // layer-1 forcing; empty grid pointer means none
    double dt = 0.0;
    bool nonlinear = true;

    void validate() const;
    ScalarField forcing_or_zero() const;
};

class BlowUp : public std::runtime_error {
 public:
    BlowUp(double t, std::size_t step)
        : std::runtime_error("non-finite state at t=" + std::to_string(t)), time(t), step(step) {}
    double time;
    std::size_t step;
};

struct NoiseIncrement {
    SpectralField2L field;      // (dW, 0)
    std::vector<double> coeff;  // dW on e_1..e_{n_active}
};

// Per-eigenmode Gaussian increments with variance sigma_m dt on layer 1.
NoiseIncrement noise_increment(GridPtr g, const NoiseSpec& spec, double dt, Rng& rng);

// dq/dt without noise: -B(psi,psi) - beta psi_x + nu Lap^2 psi + (f, -r Lap psi2).
SpectralField2L tendency(const SpectralField2L& q, const ModelParams& p);

// [(-lam I + M)^-1]_11: the layer-1 self-response of the vorticity inversion.
double inversion_a11(double lambda, const LayerWeights& w);
// Quadratic variation rate of |||q|||_{-1}^2 under the noise: h1 sum sigma_m a11(lambda_m).
double noise_trace_TQ(const Grid& g, const LayerWeights& w, const NoiseSpec& spec);

// Energy bookkeeping for one step, evaluated at the post-implicit state psi*.
struct StepLedger {
    double dissipation = 0.0;  // |Lap psi*|^2 (depth weighted)
    double dX = 0.0;           // martingale increment
    double dQV = 0.0;          // its conditional variance
};

// Semi-implicit Euler-Maruyama: linear terms implicit per mode, B explicit,
// noise added after the deterministic substep.
class Stepper {
 public:
    Stepper(ModelParams p, NoiseSpec spec);

    const ModelParams& params() const { return p_; }
    const NoiseSpec& noise() const { return spec_; }
    double TQ() const { return TQ_; }

    // q* = (I - dt L)^-1 (q + dt(-B(psi,psi) + (f + extra, 0)))
    SpectralField2L deterministic(const SpectralField2L& q, const ScalarField* extra = nullptr) const;
    SpectralField2L psi_of(const SpectralField2L& q) const;

    // q <- q* + dW. Fills the ledger when requested.
    void step(SpectralField2L& q, const NoiseIncrement& dW, const ScalarField* extra = nullptr,
              StepLedger* ledger = nullptr) const;
    NoiseIncrement draw(Rng& rng) const;

    // Ledger contribution of a given noise draw at post-implicit psi*.
    StepLedger ledger_for(const SpectralField2L& psi_star, const NoiseIncrement& dW) const;

 private:
    ModelParams p_;
    NoiseSpec spec_;
    ScalarField f_;
    std::vector<cplx> R11_, R12_, R21_, R22_;
    std::vector<cplx> S11_, S12_, S21_, S22_;
    std::vector<double> a11_;  // per noise mode
    double TQ_ = 0.0;
};

SpectralField2L step(const SpectralField2L& q, const Stepper& s, const NoiseIncrement& dW);

struct TrajectoryRecord {
    // sampled every sample_every steps, including t = 0
    std::vector<double> times;
    std::vector<double> V;            // |||q|||_{-1}^2
    std::vector<double> dissipation;  // |Lap psi|^2 at the sample
    std::vector<double> energy1, energy2;  // h_i ||psi_i||^2
    std::vector<SpectralField2L> snapshots;

    // per step, index k is after step k+1
    std::vector<double> step_V;
    std::vector<double> diss_integral;  // sum dt |Lap psi*|^2
    std::vector<double> X, QV;

    double V0 = 0.0;
    SpectralField2L final_state;
    double final_time = 0.0;
    bool blew_up = false;
    double blowup_time = 0.0;

    // sup_k (X_k - gamma QV_k), including the empty sum at t = 0
    double xi_sup(double gamma) const;
};

struct IntegrateOptions {
    std::size_t sample_every = 1;
    bool keep_snapshots = false;
};

std::size_t step_count(double T, double dt);

TrajectoryRecord integrate(const SpectralField2L& q0, const Stepper& s, double T, Rng& rng,
                           const IntegrateOptions& opt = {});

// Runs f(i) for i in [0, n) on up to `threads` workers; results never depend on
// the thread count because every task owns its RNG stream.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);
unsigned default_threads();

// Binary snapshot: "QG2L", u32 version, f64 L, u32 N, u32 layers, f64 time, then
// per layer N*N (re, im) f64 pairs in row-major order, all little-endian.
void write_checkpoint(const std::string& path, const SpectralField2L& q, double t);
struct Checkpoint {
    SpectralField2L q;
    double t;
};
Checkpoint read_checkpoint(const std::string& path);
std::vector<unsigned char> encode_checkpoint(const SpectralField2L& q, double t);
Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes);

}  // namespace qg
