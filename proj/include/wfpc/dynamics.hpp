#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "wfpc/models.hpp"
#include "wfpc/pulses.hpp"

namespace wfpc {

struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t steps = 1;

    double dt() const { return (t1 - t0) / static_cast<double>(steps); }
    double at(std::size_t k) const { return t0 + static_cast<double>(k) * dt(); }
    double midpoint(std::size_t k) const { return t0 + (static_cast<double>(k) + 0.5) * dt(); }
    std::vector<double> nodes() const;      // t_0..t_steps
    std::vector<double> midpoints() const;  // step midpoints
    TimeGrid refined() const { return {t0, t1, 2 * steps}; }
    void validate() const;
};

enum class Method { Exact, Perturbative2 };
Method parse_method(std::string_view name);
std::string_view to_string(Method m);

// Step scheme of the exact propagator.
//   Split:    u = e^{-iH0Δt/2} (e^{-iV(t_mid)Δt} ⊗ 1) e^{-iH0Δt/2}
//   Midpoint: u = exp(-i(H0 + V(t_mid)⊗1)Δt)
// Both are unitary and second order per step.
enum class StepScheme { Split, Midpoint };

struct Trajectory {
    std::vector<double> times;
    std::vector<double> populations;
    std::optional<DensityMatrix> final_state;
    Method method = Method::Exact;

    double final_population() const { return populations.back(); }
};

// Field sampled on the step midpoints of `grid`, which is what every
// propagator in this module consumes.
TimeField sample_midpoints(const SpectralPulse& pulse, const TimeGrid& grid);

// System-space control operator ε P μ (1-P) + ε* (1-P) μ P.
ComplexMatrix control_operator(const SystemModel& model, Complex epsilon);

// Spectral decomposition of H0 reused by every propagator.
class FreeEvolution {
public:
    explicit FreeEvolution(const SystemModel& model);

    // e^{-i H0 t}
    ComplexMatrix propagator(double t) const;
    // Q† X Q
    ComplexMatrix to_eigenbasis(const ComplexMatrix& x) const;
    ComplexMatrix from_eigenbasis(const ComplexMatrix& x) const;
    // Elementwise factor e^{i(E_a - E_b) t} that maps an eigenbasis operator
    // to the interaction picture.
    ComplexMatrix phase_factors(double t) const;

    const Eigen::VectorXd& energies() const { return energies_; }

private:
    Eigen::VectorXd energies_;
    ComplexMatrix vectors_;
};

// V_I(t) = U0†(t) (V(t)⊗1) U0(t), U0(t) = e^{-i H0 t}.
ComplexMatrix interaction_v(const SystemModel& model, Complex epsilon, double t);
ComplexMatrix interaction_v(const SystemModel& model, const SpectralPulse& pulse, double t);

// ‖[P⊗1, H0]‖_max
double condition2_defect(const SystemModel& model);

struct ExactOptions {
    StepScheme scheme = StepScheme::Split;
    bool keep_final_state = true;
};

Trajectory exact_propagate(const SystemModel& model, const CorrelatedState& state,
                           const TimeField& field, const TimeGrid& grid,
                           const ExactOptions& options = {});

// Full propagator U(t1, t0) of the stepping scheme.
ComplexMatrix exact_unitary(const SystemModel& model, const TimeField& field, const TimeGrid& grid,
                            StepScheme scheme = StepScheme::Split);

// Second-order population from the interaction-picture evolution equation
// with R_I(0) inside both integrands. Throws ConditionViolated when
// ‖[P⊗1, H0]‖ exceeds 1e-8.
Trajectory perturbative_p(const SystemModel& model, const CorrelatedState& state,
                          const TimeField& field, const TimeGrid& grid);

// Splits a perturbative run into its first- and second-order parts of p(T)-p(0).
struct PerturbativeParts {
    double first_order = 0.0;
    double second_order = 0.0;
};
PerturbativeParts perturbative_parts(const SystemModel& model, const CorrelatedState& state,
                                     const TimeField& field, const TimeGrid& grid);

// Closed-form first-order rate from the ground-excited coefficients of R(0)
// and the interaction-picture dipole elements.
double first_order_rate_analytic(const SystemModel& model, const CorrelatedState& state,
                                 Complex epsilon, double t);

Trajectory propagate(Method method, const SystemModel& model, const CorrelatedState& state,
                     const SpectralPulse& pulse, const TimeGrid& grid,
                     StepScheme scheme = StepScheme::Split);

// |p_N(T) - p_2N(T)| for the chosen method.
double grid_convergence(Method method, const SystemModel& model, const CorrelatedState& state,
                        const SpectralPulse& pulse, const TimeGrid& grid,
                        StepScheme scheme = StepScheme::Split);

struct AutocorrelationCheck {
    std::vector<double> final_populations;
    double relative_spread = 0.0;
    bool phase_independent = true;
};

// Second-order p(T) across a family for a state without ground-excited
// coherence. Throws InvalidArgument if the state has coherence above 1e-10.
AutocorrelationCheck second_order_autocorrelation_check(const SystemModel& model,
                                                        const CorrelatedState& diag_state,
                                                        const std::vector<SpectralPulse>& family,
                                                        const TimeGrid& grid);

} // namespace wfpc
