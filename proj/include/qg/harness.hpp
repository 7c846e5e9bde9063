#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qg/ergodics.hpp"

namespace qg::harness {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kReportSchema = 1;

enum ExitCode : int { kOk = 0, kFailure = 1, kValidation = 2, kBlowUp = 3, kCondition = 4 };

// Bad or inconsistent configuration (exit 2).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
// A coupling or ergodicity condition does not hold (exit 4).
struct ConditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    // grid
    double L = 6.283185307179586;
    std::size_t N = 32;
    // model; layers = direct | physical
    double nu = 0.01, r = 0.5, beta = 0.0;
    std::string layers = "direct";
    double F1 = 1.0, F2 = 1.0, h1 = 1.0, h2 = 1.0;
    double f0 = 1.0, g = 1.0, rho1 = 1.0, rho2 = 3.0;
    // forcing; pattern = none | kolmogorov | modes
    std::string forcing = "none";
    double forcing_amplitude = 0.0;
    std::size_t forcing_k = 1;
    std::vector<double> forcing_modes;
    // noise; law = power | list | none
    std::string noise_law = "power";
    double noise_c = 1e-4, noise_s = 1.0;
    std::optional<std::size_t> noise_k_max;
    std::vector<double> noise_sigma;
    // control; a defaults to r, n to the smallest satisfying condition_n
    std::optional<double> control_a;
    std::optional<std::size_t> control_n;
    // semimetric; alpha defaults to alpha0 / 2, upsilon to kappa1 / kappa2
    std::optional<double> alpha, upsilon, gamma;
    double N_scale = 1.0;
    // constants; k0 measured when absent
    std::optional<double> k0;
    std::size_t k0_trials = 1000;
    std::uint64_t k0_seed = 1;
    // run; threads = 0 means all cores
    double dt = 0.01, T = 1.0;
    std::size_t sample_every = 1, ensemble = 1;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    // initial states; init_mode = random | zero | checkpoint,
    // y_mode = random | coincident | checkpoint
    std::string init_mode = "random";
    double init_energy = 1e-2, init_slope = 3.0;
    std::optional<std::uint64_t> init_seed;
    std::string init_path;
    std::string y_mode = "random";
    std::optional<double> y_energy;
    std::string y_path;
    // verify
    std::size_t verify_runs = 32;
    std::optional<double> verify_T;
    std::size_t tail_runs = 1000;
    double tail_T = 1.0;
    std::vector<double> contraction_times;
    std::size_t contraction_samples = 64;
    // output
    std::string out_dir = "out";

    std::uint64_t initial_seed() const { return init_seed.value_or(seed); }
};

// Parsing only; unknown or repeated keys and malformed values are rejected.
ExperimentConfig parse_config(const std::string& text);
// Parse and validate against every module precondition.
ExperimentConfig load_config_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Normalised key = value form with 17 significant digits.
std::string serialize(const ExperimentConfig& c);
// SHA-256 of the normalised form without output.dir and run.threads, which do
// not affect results.
std::string config_hash(const ExperimentConfig& c);

struct Setup {
    GridPtr grid;
    ModelParams model;
    NoiseSpec noise;
};
Setup build_setup(const ExperimentConfig& c);
// Throws ConditionError naming "range-Q" or "condition_n".
ControlSpec resolve_control(const ExperimentConfig& c, const Setup& s);
// Defaults applied, coupling conditions left for the caller to report.
ControlSpec resolve_control_unchecked(const ExperimentConfig& c, const Setup& s);
double resolve_k0(const ExperimentConfig& c, const Setup& s);
SpectralField2L initial_state(const ExperimentConfig& c, const Setup& s, int which);

// io
std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& p);
std::string format_double(double v);

struct RunContext {
    std::filesystem::path out;
    unsigned threads = 1;
    bool quiet = false;
    std::ostream* log = nullptr;
};

struct Artifact {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
};

struct Outcome {
    int code = kOk;
    std::string message;
    std::vector<Artifact> artifacts;
};

// simulate | couple | verify | constants. Writes artifacts and manifest.json into ctx.out.
Outcome run_command(const std::string& command, const ExperimentConfig& c, const RunContext& ctx);

struct ReplayOverrides {
    std::optional<ExperimentConfig> config;
    std::optional<std::uint64_t> seed;
};
// Re-runs a manifest into ctx.out and compares artifact checksums.
Outcome replay(const std::filesystem::path& manifest, const ReplayOverrides& ov, const RunContext& ctx);

}  // namespace qg::harness
