#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfpc/io.hpp"

namespace wfpc {

// Raised with the offending key path, e.g. "model.env_cutoffs[0]: expected non-negative integer".
struct SchemaError : Error {
    SchemaError(const std::string& key_path, const std::string& what)
        : Error(key_path + ": " + what), key(key_path) {}
    std::string key;
};

struct UnknownBuilder : Error {
    UnknownBuilder(const std::string& key_path, const std::string& name)
        : Error(key_path + ": unknown builder '" + name + "'"), key(key_path) {}
    std::string key;
};

struct ModelSpec {
    std::string builder = "commuting";  // commuting | noncommuting | manifold
    double omega_s = 1.0;
    std::vector<double> omega_env{0.8};
    double g = 0.1;
    std::size_t system_cutoff = 2;      // oscillator builders
    std::vector<std::size_t> env_cutoffs{4};
    std::vector<double> ground_energies;   // manifold builder
    std::vector<double> excited_energies;
    bool operator==(const ModelSpec&) const = default;
};

struct StateSpec {
    std::string builder = "gibbs";  // gibbs | diagonal_product | witness | matrix_file
    double beta = 1.0;
    std::vector<double> system_weights;
    std::vector<double> env_weights;
    bool offdiag_in_rho = false;
    bool offdiag_in_chi = false;
    // Evolve the built state backwards by this time so that it is reached at t = ready_at.
    std::optional<double> ready_at;
    std::string path;
    bool operator==(const StateSpec&) const = default;
};

struct FamilyGroup {
    std::string kind = "constant";  // constant | linear | chirp | random
    std::vector<double> values;
    std::size_t count = 0;
    bool operator==(const FamilyGroup&) const = default;
};

struct PulseSpec {
    std::string shape = "gaussian";  // gaussian | zero
    double omega0 = 1.0;
    double sigma = 0.2;
    std::size_t bins = 128;
    double span_sigmas = 5.0;
    double weak_scale = 1e-3;
    double delay = 40.0;
    std::optional<double> chirp_center;  // defaults to omega0
    std::vector<FamilyGroup> family{
        {"constant", {0.0, std::numbers::pi / 2, std::numbers::pi, 3 * std::numbers::pi / 2}, 0}};
    bool operator==(const PulseSpec&) const = default;
};

struct GridSpec {
    double t0 = 0.0;
    double t1 = 80.0;
    std::size_t steps = 800;
    bool operator==(const GridSpec&) const = default;
};

struct ProtocolSpec {
    std::string kind = "simulate";  // simulate | witness | qrf | nogo
    std::string method = "exact";
    std::string scheme = "split";
    double wfpc_threshold = 1e-7;
    double profile_threshold = 1e-7;
    double qrf_threshold = 1e-8;
    std::vector<double> t1_grid{0.0, 1.0, 2.0};
    std::vector<double> delta_grid{0.5, 1.0};
    std::string operator_a = "dipole";  // dipole | projector
    std::string operator_b = "dipole";
    std::optional<double> intermediate_t1;
    bool verify_grid = false;
    bool operator==(const ProtocolSpec&) const = default;
};

struct OutputSpec {
    std::string dir = "out";
    bool export_states = false;
    bool export_fields = false;
    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    ModelSpec model;
    StateSpec state;
    PulseSpec pulse;
    GridSpec grid;
    ProtocolSpec protocol;
    OutputSpec output;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 0;
    bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scenario& s);

// FNV-1a over the canonical (sorted-key, compact) JSON form, excluding the
// output section and worker count.
std::string config_hash(const Scenario& s);

SpaceLayout build_layout(const Scenario& s);
SystemModel build_model(const Scenario& s);
CorrelatedState build_state(const Scenario& s, const SystemModel& model);
SpectralPulse build_base_pulse(const Scenario& s);
std::vector<SpectralPulse> build_family(const Scenario& s);
TimeGrid build_grid(const Scenario& s);
ComplexMatrix build_operator(const std::string& name, const SystemModel& model);

} // namespace wfpc
