#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "qg/harness.hpp"

namespace qg::harness {

namespace {

using Cfg = ExperimentConfig;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw ValidationError(key + ": " + why);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) bad(key, "expected a number, got '" + v + "'");
    if (!std::isfinite(x)) bad(key, "must be finite");
    return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        bad(key, "expected a non-negative integer, got '" + v + "'");
    return x;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) bad(key, "empty list");
    return out;
}

std::string from_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

struct Key {
    std::string name;
    std::function<void(Cfg&, const std::string&)> set;
    std::function<std::optional<std::string>(const Cfg&)> get;
    bool hashed = true;
};

template <class T>
Key num(const char* name, T Cfg::*m) {
    return {name,
            [=](Cfg& c, const std::string& v) {
                if constexpr (std::is_same_v<T, double>) {
                    c.*m = to_double(name, v);
                } else {
                    const auto x = to_u64(name, v);
                    if (x > std::numeric_limits<T>::max()) bad(name, "out of range");
                    c.*m = static_cast<T>(x);
                }
            },
            [=](const Cfg& c) -> std::optional<std::string> {
                if constexpr (std::is_same_v<T, double>) return format_double(c.*m);
                else return std::to_string(c.*m);
            }};
}

template <class T>
Key opt(const char* name, std::optional<T> Cfg::*m) {
    return {name,
            [=](Cfg& c, const std::string& v) {
                if constexpr (std::is_same_v<T, double>) c.*m = to_double(name, v);
                else c.*m = static_cast<T>(to_u64(name, v));
            },
            [=](const Cfg& c) -> std::optional<std::string> {
                if (!(c.*m)) return std::nullopt;
                if constexpr (std::is_same_v<T, double>) return format_double(*(c.*m));
                else return std::to_string(*(c.*m));
            }};
}

Key str(const char* name, std::string Cfg::*m, std::initializer_list<const char*> allowed = {}) {
    std::vector<const char*> keep(allowed);
    return {name,
            [=](Cfg& c, const std::string& v) {
                if (keep.empty()) {
                    if (v.empty()) bad(name, "empty value");
                    c.*m = v;
                    return;
                }
                for (const char* a : keep)
                    if (v == a) {
                        c.*m = v;
                        return;
                    }
                std::string list;
                for (const char* a : keep) list += std::string(list.empty() ? "" : "|") + a;
                bad(name, "expected one of " + list + ", got '" + v + "'");
            },
            [=](const Cfg& c) -> std::optional<std::string> {
                if (keep.empty() && (c.*m).empty()) return std::nullopt;
                return c.*m;
            }};
}

Key list(const char* name, std::vector<double> Cfg::*m) {
    return {name, [=](Cfg& c, const std::string& v) { c.*m = to_list(name, v); },
            [=](const Cfg& c) -> std::optional<std::string> {
                if ((c.*m).empty()) return std::nullopt;
                return from_list(c.*m);
            }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = [] {
        std::vector<Key> v{
            num("grid.L", &Cfg::L),
            num("grid.N", &Cfg::N),
            num("model.nu", &Cfg::nu),
            num("model.r", &Cfg::r),
            num("model.beta", &Cfg::beta),
            str("model.layers", &Cfg::layers, {"direct", "physical"}),
            num("model.F1", &Cfg::F1),
            num("model.F2", &Cfg::F2),
            num("model.h1", &Cfg::h1),
            num("model.h2", &Cfg::h2),
            num("model.f0", &Cfg::f0),
            num("model.g", &Cfg::g),
            num("model.rho1", &Cfg::rho1),
            num("model.rho2", &Cfg::rho2),
            str("forcing.pattern", &Cfg::forcing, {"none", "kolmogorov", "modes"}),
            num("forcing.amplitude", &Cfg::forcing_amplitude),
            num("forcing.k", &Cfg::forcing_k),
            list("forcing.modes", &Cfg::forcing_modes),
            str("noise.law", &Cfg::noise_law, {"power", "list", "none"}),
            num("noise.c", &Cfg::noise_c),
            num("noise.s", &Cfg::noise_s),
            opt("noise.k_max", &Cfg::noise_k_max),
            list("noise.sigma", &Cfg::noise_sigma),
            opt("control.a", &Cfg::control_a),
            opt("control.n", &Cfg::control_n),
            opt("semimetric.alpha", &Cfg::alpha),
            opt("semimetric.upsilon", &Cfg::upsilon),
            opt("semimetric.gamma", &Cfg::gamma),
            num("semimetric.N", &Cfg::N_scale),
            opt("constants.k0", &Cfg::k0),
            num("constants.k0_trials", &Cfg::k0_trials),
            num("constants.k0_seed", &Cfg::k0_seed),
            num("run.dt", &Cfg::dt),
            num("run.T", &Cfg::T),
            num("run.sample_every", &Cfg::sample_every),
            num("run.ensemble", &Cfg::ensemble),
            num("run.seed", &Cfg::seed),
            num("run.threads", &Cfg::threads),
            str("init.mode", &Cfg::init_mode, {"random", "zero", "checkpoint"}),
            num("init.energy", &Cfg::init_energy),
            num("init.slope", &Cfg::init_slope),
            opt("init.seed", &Cfg::init_seed),
            str("init.path", &Cfg::init_path),
            str("init.y_mode", &Cfg::y_mode, {"random", "coincident", "checkpoint"}),
            opt("init.y_energy", &Cfg::y_energy),
            str("init.y_path", &Cfg::y_path),
            num("verify.runs", &Cfg::verify_runs),
            opt("verify.T", &Cfg::verify_T),
            num("verify.tail_runs", &Cfg::tail_runs),
            num("verify.tail_T", &Cfg::tail_T),
            list("verify.contraction_times", &Cfg::contraction_times),
            num("verify.contraction_samples", &Cfg::contraction_samples),
            str("output.dir", &Cfg::out_dir),
        };
        for (auto& key : v)
            if (key.name == "output.dir" || key.name == "run.threads") key.hashed = false;
        return v;
    }();
    return k;
}

std::string serialize_impl(const Cfg& c, bool hashed_only) {
    std::string out;
    for (const auto& k : keys()) {
        if (hashed_only && !k.hashed) continue;
        if (auto v = k.get(c)) out += k.name + " = " + *v + "\n";
    }
    return out;
}

void positive(const std::string& key, double v) {
    if (!(v > 0.0)) bad(key, "must be positive");
}

// Re-raise a module precondition failure under the config section it came from.
template <class F>
auto guarded(const std::string& section, F&& f) {
    try {
        return f();
    } catch (const ValidationError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        if (msg.find("range-Q") != std::string::npos || msg.find("condition_n") != std::string::npos)
            throw ConditionError(section + ": " + msg);
        throw ValidationError(section + ": " + msg);
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    Cfg c;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    for (int no = 1; std::getline(ss, line); ++no) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const Key* k = nullptr;
        for (const auto& cand : keys())
            if (cand.name == key) k = &cand;
        if (!k) throw ValidationError("line " + std::to_string(no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ValidationError("line " + std::to_string(no) + ": duplicate key '" + key + "'");
        k->set(c, value);
    }
    return c;
}

Setup build_setup(const ExperimentConfig& c) {
    Setup s;
    if (c.N < 4 || c.N > 4096) bad("grid.N", "must lie in [4, 4096]");
    positive("grid.L", c.L);
    s.grid = make_grid(c.L, static_cast<int>(c.N));
    const Grid& g = *s.grid;

    ModelParams& p = s.model;
    p.grid = s.grid;
    positive("model.nu", c.nu);
    if (!(c.r >= 0.0)) bad("model.r", "must be non-negative");
    if (c.layers == "physical") {
        const PhysicalParams pp{c.f0, c.g, c.rho1, c.rho2, c.h1, c.h2};
        p.weights = guarded("model", [&] { return pp.weights(); });
    } else {
        p.weights = guarded("model", [&] { return LayerWeights(c.h1, c.h2, c.F1, c.F2); });
    }
    p.nu = c.nu;
    p.r = c.r;
    p.beta = c.beta;
    positive("run.dt", c.dt);
    p.dt = c.dt;

    if (c.forcing == "kolmogorov") {
        if (c.forcing_k < 1 || static_cast<int>(c.forcing_k) > g.cutoff())
            bad("forcing.k", "must lie in [1, " + std::to_string(g.cutoff()) + "]");
        std::vector<double> u(g.size());
        const double k = 2.0 * std::numbers::pi * static_cast<double>(c.forcing_k) / c.L;
        for (std::size_t iy = 0; iy < c.N; ++iy)
            for (std::size_t ix = 0; ix < c.N; ++ix)
                u[iy * c.N + ix] = c.forcing_amplitude * std::sin(k * c.L * static_cast<double>(iy) / c.N);
        p.forcing = ScalarField::from_physical(s.grid, u);
        // drop transform roundoff outside the band and restore exact Hermitian symmetry
        auto& fc = p.forcing.c;
        fc[0] = 0.0;
        for (std::size_t f = 1; f < g.size(); ++f)
            if (!g.active(f)) fc[f] = 0.0;
        for (std::size_t f = 1; f < g.size(); ++f) {
            const std::size_t h = g.conjugate(f);
            if (h < f) continue;
            const auto avg = 0.5 * (fc[f] + std::conj(fc[h]));
            fc[f] = avg;
            fc[h] = std::conj(avg);
        }
    } else if (c.forcing == "modes") {
        if (c.forcing_modes.empty()) bad("forcing.modes", "required when forcing.pattern = modes");
        if (c.forcing_modes.size() > g.num_modes())
            bad("forcing.modes", "more amplitudes than resolved modes (" + std::to_string(g.num_modes()) + ")");
        p.forcing = ScalarField::zeros(s.grid);
        for (std::size_t m = 0; m < c.forcing_modes.size(); ++m)
            add_real_mode(p.forcing.c, g, m + 1, c.forcing_modes[m]);
    }
    guarded("forcing", [&] {
        p.validate();
        return 0;
    });

    if (c.noise_law == "power") {
        const std::size_t kmax = c.noise_k_max.value_or(g.num_modes());
        s.noise = guarded("noise", [&] { return NoiseSpec::power_law(g, c.noise_c, c.noise_s, kmax); });
    } else if (c.noise_law == "list") {
        if (c.noise_sigma.empty()) bad("noise.sigma", "required when noise.law = list");
        s.noise = guarded("noise", [&] { return NoiseSpec::from_list(c.noise_sigma); });
    }
    guarded("noise", [&] {
        s.noise.validate(g);
        return 0;
    });

    // run and verify plumbing
    guarded("run.T", [&] { return step_count(c.T, c.dt); });
    if (c.sample_every < 1) bad("run.sample_every", "must be >= 1");
    if (c.ensemble < 1) bad("run.ensemble", "must be >= 1");
    if (c.init_mode == "checkpoint" && c.init_path.empty()) bad("init.path", "required when init.mode = checkpoint");
    if (c.y_mode == "checkpoint" && c.y_path.empty()) bad("init.y_path", "required when init.y_mode = checkpoint");
    if (!(c.init_energy >= 0.0)) bad("init.energy", "must be non-negative");
    if (c.y_energy && !(*c.y_energy >= 0.0)) bad("init.y_energy", "must be non-negative");
    if (c.verify_runs < 16) bad("verify.runs", "must be >= 16");
    if (c.tail_runs < 1) bad("verify.tail_runs", "must be >= 1");
    if (c.verify_T) guarded("verify.T", [&] { return step_count(*c.verify_T, c.dt); });
    guarded("verify.tail_T", [&] { return step_count(c.tail_T, c.dt); });
    for (double t : c.contraction_times) guarded("verify.contraction_times", [&] { return step_count(t, c.dt); });
    if (c.contraction_samples < 2) bad("verify.contraction_samples", "must be >= 2");
    if (c.k0 && !(*c.k0 >= 0.0)) bad("constants.k0", "must be non-negative");
    if (c.k0_trials < 1) bad("constants.k0_trials", "must be >= 1");
    if (c.N_scale < 1.0) bad("semimetric.N", "must be >= 1");
    if (c.alpha && !(*c.alpha > 0.0)) bad("semimetric.alpha", "must be positive");
    if (c.upsilon && !(*c.upsilon > 0.0)) bad("semimetric.upsilon", "must be positive");
    if (c.gamma && !(*c.gamma > 0.0)) bad("semimetric.gamma", "must be positive");
    if (c.control_a && !(*c.control_a > 0.0)) bad("control.a", "must be positive");
    return s;
}

ControlSpec resolve_control_unchecked(const ExperimentConfig& c, const Setup& s) {
    ControlSpec cs;
    cs.a = c.control_a.value_or(c.r);
    if (!(cs.a > 0.0)) bad("control.a", "required when model.r = 0");
    const Grid& g = *s.grid;
    if (c.control_n) {
        cs.n = *c.control_n;
    } else {
        cs.n = 1;
        while (cs.n < g.num_modes() && !(c.nu - 2.0 * cs.a / g.lambda_n(cs.n) > 0.0)) ++cs.n;
    }
    if (cs.n < 1 || cs.n > g.num_modes())
        bad("control.n", "must lie in [1, " + std::to_string(g.num_modes()) + "]");
    return cs;
}

ControlSpec resolve_control(const ExperimentConfig& c, const Setup& s) {
    const ControlSpec cs = resolve_control_unchecked(c, s);
    guarded("control", [&] {
        cs.validate(s.model, s.noise);
        return 0;
    });
    return cs;
}

double resolve_k0(const ExperimentConfig& c, const Setup& s) {
    if (c.k0) return *c.k0;
    return measure_bilinear_constant(s.grid, s.model.weights, c.k0_trials, c.k0_seed).k0;
}

SpectralField2L initial_state(const ExperimentConfig& c, const Setup& s, int which) {
    const LayerWeights& w = s.model.weights;
    const std::string& mode = which == 0 ? c.init_mode : c.y_mode;
    if (which != 0 && mode == "coincident") return initial_state(c, s, 0);
    if (mode == "zero") return SpectralField2L::zeros(s.grid);
    if (mode == "checkpoint") {
        const std::string& path = which == 0 ? c.init_path : c.y_path;
        auto ck = read_checkpoint(path);
        if (!ck.q.grid->same_as(*s.grid))
            bad(which == 0 ? "init.path" : "init.y_path", "checkpoint grid differs from grid.L/grid.N");
        return ck.q;
    }
    const double V = which == 0 ? c.init_energy : c.y_energy.value_or(c.init_energy);
    Rng rng(c.initial_seed(), stream_id(StreamRole::initial_state, static_cast<std::uint64_t>(which)));
    SpectralField2L q = vorticity_from_streamfunction(random_field(s.grid, rng, c.init_slope), w);
    const double v0 = triple_norm_minus1_sq(q, w);
    q *= v0 > 0.0 ? std::sqrt(V / v0) : 0.0;
    return q;
}

ExperimentConfig load_config_string(const std::string& text) {
    ExperimentConfig c = parse_config(text);
    const Setup s = build_setup(c);
    if (c.control_a || c.control_n) resolve_control(c, s);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return load_config_string(text);
}

std::string serialize(const ExperimentConfig& c) { return serialize_impl(c, false); }

std::string config_hash(const ExperimentConfig& c) { return sha256_hex(serialize_impl(c, true)); }

}  // namespace qg::harness
