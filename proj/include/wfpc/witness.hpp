#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfpc/dynamics.hpp"

namespace wfpc {

// --- Preparations -----------------------------------------------------------

// ρ0 ⊗ tr_S(R)
CorrelatedState prep_throw_replace(const CorrelatedState& state, const ComplexMatrix& rho0);

// ρ ⊗ τ from the state's own marginals.
CorrelatedState prep_marginal_preserving(const CorrelatedState& state);

// Same map realised on two copies: build R ⊗ R on S⊗E⊗S'⊗E', swap S and S',
// discard the second copy.
CorrelatedState prep_two_copy_swap(const CorrelatedState& state);

// |ψ⟩⟨ψ| ⊗ τ^{E|ψ}. Throws ZeroProbability when ⟨ψ|ρ|ψ⟩ ≤ 1e-12.
CorrelatedState prep_projective(const CorrelatedState& state, const ComplexVector& psi);

// Conditional environment state τ^{E|ψ} and the outcome probability.
std::pair<ComplexMatrix, double> conditional_environment(const CorrelatedState& state,
                                                         const ComplexVector& psi);

// (L ⊗ 1) R (L† ⊗ 1). Throws InvalidArgument for non-unitary L.
CorrelatedState prep_rotate(const CorrelatedState& state, const ComplexMatrix& rotation);

// --- Phase-control detection ------------------------------------------------

struct DetectOptions {
    double threshold = 1e-7;
    Method method = Method::Exact;
    StepScheme scheme = StepScheme::Split;
    std::size_t workers = 0;  // 0 = available parallelism
    bool check_scaling = true;
};

struct ScalingCheck {
    std::optional<double> ratio;  // Δp(λ)/Δp(λ/2) on the reference mask
    bool ok = true;
};

struct PhaseControlReport {
    std::vector<std::pair<std::size_t, double>> yields;  // (mask_id, p(T))
    std::vector<double> profile;                         // p(T) in mask order
    std::vector<Trajectory> trajectories;
    double contrast = 0.0;
    double threshold = 0.0;
    bool detected = false;
    ScalingCheck scaling;
};

PhaseControlReport detect_wfpc(const SystemModel& model, const CorrelatedState& state,
                               const std::vector<SpectralPulse>& family, const TimeGrid& grid,
                               const DetectOptions& options = {});

// Dominant-order homogeneity of the yield change under λ → λ/2 (and λ/4
// when the ratio falls between the pure first- and second-order windows).
ScalingCheck weak_field_scaling(const SystemModel& model, const CorrelatedState& state,
                                const SpectralPulse& pulse, const TimeGrid& grid, Method method,
                                StepScheme scheme = StepScheme::Split);

struct ConditionReport {
    double condition2_norm = 0.0;  // ‖[P⊗1, H0]‖_max
    double condition3_norm = 0.0;  // ‖[H0, R(0)]‖_max
    bool condition2_pass = false;
    bool condition3_pass = false;
    ScalingCheck condition1;
    bool all_pass() const { return condition1.ok && condition2_pass && condition3_pass; }
};

inline constexpr double kConditionTol = 1e-8;

ConditionReport check_nogo_conditions(const SystemModel& model, const CorrelatedState& state,
                                      const SpectralPulse& pulse, const TimeGrid& grid);

// --- Two-copy protocol --------------------------------------------------------

enum class Quadrant { NoOffdiag, ChiOnly, RhoOnly, Both };
std::string_view to_string(Quadrant q);
Quadrant parse_quadrant(std::string_view name);

struct WitnessThresholds {
    double wfpc = 1e-7;     // contrast above which phase control is declared
    double profile = 1e-7;  // max-norm between yield profiles
};

struct WitnessVerdict {
    Quadrant quadrant = Quadrant::NoOffdiag;
    PhaseControlReport report_before;
    PhaseControlReport report_after;
    double profile_distance = 0.0;  // max_i |(p_i - p_0) before - (p_i - p_0) after|
    ConditionReport conditions;
    // Condition 2 failed: control from ρ coherence cannot be told apart from
    // control induced by the bare coupling. The χ witness is unaffected.
    bool condition2_caveat = false;
    bool correlations_witnessed = false;
    std::string summary;
};

Quadrant classify(bool detected_before, bool detected_after, double profile_distance,
                  double profile_tol);

WitnessVerdict run_witness_protocol(const SystemModel& model, const CorrelatedState& state,
                                    const std::vector<SpectralPulse>& family, const TimeGrid& grid,
                                    const WitnessThresholds& thresholds = {},
                                    const DetectOptions& options = {});

struct RotatedBranch {
    ComplexVector psi;
    double probability = 0.0;
    ComplexMatrix environment;
    PhaseControlReport report;
};

struct RotatedWitnessReport {
    std::vector<RotatedBranch> branches;
    double max_environment_distance = 0.0;  // pairwise trace distance
    double max_contrast_difference = 0.0;
    bool environments_differ = false;
    bool correlations_witnessed = false;
};

RotatedWitnessReport rotated_marginal_witness(const SystemModel& model, const CorrelatedState& state,
                                              const std::vector<ComplexVector>& psi_list,
                                              const ComplexMatrix& rotation,
                                              const std::vector<SpectralPulse>& family,
                                              const TimeGrid& grid, const DetectOptions& options = {});

} // namespace wfpc
