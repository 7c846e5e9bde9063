#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "qg/kernels.hpp"
#include "qg/model.hpp"

namespace qg {

SpectralField2L tendency(const SpectralField2L& q, const ModelParams& p) {
    const LayerWeights& w = p.weights;
    const SpectralField2L psi = streamfunction_from_vorticity(q, w);
    SpectralField2L out = SpectralField2L::zeros(q.grid);
    if (p.nonlinear) out -= bilinear_B(psi, psi, w);
    out.axpy(-p.beta, d_dx(psi));
    out.axpy(p.nu, laplacian(laplacian(psi)));
    const ScalarField f = p.forcing_or_zero();
    const SpectralField2L lap = laplacian(psi);
    for (std::size_t i = 0; i < out.layer[0].size(); ++i) {
        out.layer[0][i] += f.c[i];
        out.layer[1][i] -= p.r * lap.layer[1][i];
    }
    return out;
}

Stepper::Stepper(ModelParams p, NoiseSpec spec) : p_(std::move(p)), spec_(std::move(spec)) {
    p_.validate();
    const Grid& g = *p_.grid;
    spec_.validate(g);
    f_ = p_.forcing_or_zero();
    const std::size_t n = g.size();
    for (auto* v : {&R11_, &R12_, &R21_, &R22_, &S11_, &S12_, &S21_, &S22_}) v->assign(n, 0.0);

    const LayerWeights& w = p_.weights;
    const double dt = p_.dt;
    for (std::size_t f = 0; f < n; ++f) {
        const std::size_t c = g.conjugate(f);
        if (c < f) continue;
        const double lam = g.k2(f);
        if (lam > 0.0) {
            const double det = lam * (lam + w.F1 + w.F2);
            S11_[f] = -(lam + w.F2) / det;
            S12_[f] = -w.F1 / det;
            S21_[f] = -w.F2 / det;
            S22_[f] = -(lam + w.F1) / det;
        }
        if (!g.active(f)) continue;
        const cplx l1(p_.nu * lam * lam, -p_.beta * g.kx(f));
        const cplx l2 = l1 + p_.r * lam;
        const cplx a11 = 1.0 - dt * l1 * S11_[f].real(), a12 = -dt * l1 * S12_[f].real();
        const cplx a21 = -dt * l2 * S21_[f].real(), a22 = 1.0 - dt * l2 * S22_[f].real();
        const cplx D = a11 * a22 - a12 * a21;
        R11_[f] = a22 / D;
        R12_[f] = -a12 / D;
        R21_[f] = -a21 / D;
        R22_[f] = a11 / D;
        if (c != f) {
            R11_[c] = std::conj(R11_[f]);
            R12_[c] = std::conj(R12_[f]);
            R21_[c] = std::conj(R21_[f]);
            R22_[c] = std::conj(R22_[f]);
        }
    }
    for (std::size_t f = 0; f < n; ++f) {
        const std::size_t c = g.conjugate(f);
        if (c < f) {
            S11_[f] = S11_[c];
            S12_[f] = S12_[c];
            S21_[f] = S21_[c];
            S22_[f] = S22_[c];
        }
    }
    a11_.resize(spec_.n_active());
    for (std::size_t m = 1; m <= spec_.n_active(); ++m) a11_[m - 1] = inversion_a11(g.lambda_n(m), w);
    TQ_ = noise_trace_TQ(g, w, spec_);
}

SpectralField2L Stepper::psi_of(const SpectralField2L& q) const {
    SpectralField2L psi = SpectralField2L::zeros(q.grid);
    kernels::active().mode_matvec(S11_.data(), S12_.data(), S21_.data(), S22_.data(),
                                  q.layer[0].data(), q.layer[1].data(), psi.layer[0].data(),
                                  psi.layer[1].data(), q.layer[0].size());
    return psi;
}

SpectralField2L Stepper::deterministic(const SpectralField2L& q, const ScalarField* extra) const {
    require_same_grid(*p_.grid, *q.grid);
    const double dt = p_.dt;
    SpectralField2L rhs = q;
    if (p_.nonlinear) {
        const SpectralField2L psi = psi_of(q);
        rhs.axpy(-dt, bilinear_B(psi, psi, p_.weights));
    }
    auto& r0 = rhs.layer[0];
    for (std::size_t i = 0; i < r0.size(); ++i) r0[i] += dt * f_.c[i];
    if (extra)
        for (std::size_t i = 0; i < r0.size(); ++i) r0[i] += dt * extra->c[i];
    SpectralField2L out = SpectralField2L::zeros(q.grid);
    kernels::active().mode_matvec(R11_.data(), R12_.data(), R21_.data(), R22_.data(),
                                  rhs.layer[0].data(), rhs.layer[1].data(), out.layer[0].data(),
                                  out.layer[1].data(), r0.size());
    return out;
}

NoiseIncrement Stepper::draw(Rng& rng) const {
    return noise_increment(p_.grid, spec_, p_.dt, rng);
}

StepLedger Stepper::ledger_for(const SpectralField2L& psi_star, const NoiseIncrement& dW) const {
    const Grid& g = *p_.grid;
    const double dt = p_.dt;
    StepLedger l;
    l.dissipation = norm_Hk_sq(psi_star, 2, p_.weights);
    // |||q* + dW|||^2 = |||q*|||^2 - 2 h1 (psi*_1, dW) + |||dW|||^2; the last term is
    // centred on its mean TQ dt and folded into the martingale.
    double lin = 0.0, quad = 0.0, qv_lin = 0.0, qv_quad = 0.0;
    for (std::size_t m = 1; m <= spec_.n_active(); ++m) {
        const double c = real_coefficient(psi_star.layer[0], g, m);
        const double w = dW.coeff[m - 1];
        const double s = spec_.sigma(m), a = a11_[m - 1];
        lin += c * w;
        quad += w * w * a;
        qv_lin += s * c * c;
        qv_quad += s * s * a * a;
    }
    const double mean_quad = TQ_ / p_.weights.h1 * dt;
    l.dX = -lin + 0.5 * (quad - mean_quad);
    l.dQV = dt * qv_lin + 0.5 * dt * dt * qv_quad;
    return l;
}

void Stepper::step(SpectralField2L& q, const NoiseIncrement& dW, const ScalarField* extra,
                   StepLedger* ledger) const {
    SpectralField2L qs = deterministic(q, extra);
    if (ledger) *ledger = ledger_for(psi_of(qs), dW);
    qs += dW.field;
    q = std::move(qs);
}

SpectralField2L step(const SpectralField2L& q, const Stepper& s, const NoiseIncrement& dW) {
    SpectralField2L out = q;
    s.step(out, dW);
    if (!out.all_finite()) throw BlowUp(0.0, 1);
    return out;
}

double TrajectoryRecord::xi_sup(double gamma) const {
    double best = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) best = std::max(best, QV[k] == 0.0 ? X[k] : X[k] - gamma * QV[k]);
    return best;
}

std::size_t step_count(double T, double dt) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be >= 0");
    const double r = T / dt;
    const auto n = static_cast<std::size_t>(std::llround(r));
    if (std::abs(static_cast<double>(n) - r) > 1e-9 * std::max(1.0, r))
        throw std::invalid_argument("horizon T must be a whole number of steps dt");
    return n;
}

namespace {

void push_sample(TrajectoryRecord& rec, const Stepper& s, const SpectralField2L& q, double t,
                 bool keep) {
    const LayerWeights& w = s.params().weights;
    const SpectralField2L psi = s.psi_of(q);
    rec.times.push_back(t);
    rec.V.push_back(triple_norm_minus1_sq_psi(psi, w));
    rec.dissipation.push_back(norm_Hk_sq(psi, 2, w));
    rec.energy1.push_back(w.h1 * norm_Hk_sq(psi.get(0), 1));
    rec.energy2.push_back(w.h2 * norm_Hk_sq(psi.get(1), 1));
    if (keep) rec.snapshots.push_back(q);
}

}  // namespace

TrajectoryRecord integrate(const SpectralField2L& q0, const Stepper& s, double T, Rng& rng,
                           const IntegrateOptions& opt) {
    if (opt.sample_every == 0) throw std::invalid_argument("sample_every must be >= 1");
    const double dt = s.params().dt;
    const std::size_t n = step_count(T, dt);
    const LayerWeights& w = s.params().weights;

    TrajectoryRecord rec;
    push_sample(rec, s, q0, 0.0, opt.keep_snapshots);
    rec.V0 = rec.V.front();
    rec.step_V.reserve(n);
    rec.diss_integral.reserve(n);
    rec.X.reserve(n);
    rec.QV.reserve(n);

    SpectralField2L q = q0;
    double D = 0.0, X = 0.0, QV = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const NoiseIncrement dW = s.draw(rng);
        StepLedger l;
        SpectralField2L next = q;
        s.step(next, dW, nullptr, &l);
        if (!next.all_finite()) {
            rec.blew_up = true;
            rec.blowup_time = k * dt;
            break;
        }
        q = std::move(next);
        D += dt * l.dissipation;
        X += l.dX;
        QV += l.dQV;
        rec.step_V.push_back(triple_norm_minus1_sq_psi(s.psi_of(q), w));
        rec.diss_integral.push_back(D);
        rec.X.push_back(X);
        rec.QV.push_back(QV);
        if (k % opt.sample_every == 0) push_sample(rec, s, q, k * dt, opt.keep_snapshots);
    }
    rec.final_state = q;
    rec.final_time = rec.blew_up ? (rec.X.size()) * dt : n * dt;
    return rec;
}

unsigned default_threads() {
    const unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : h;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mtx;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!err) err = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned k = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace qg
