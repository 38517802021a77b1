#pragma once

#include <cstdint>
#include <vector>

#include "wfpc/tensor_core.hpp"

namespace wfpc {

// Joint bare Hamiltonian, excited-manifold projector and dipole (ħ = 1).
// proj_excited and dipole act on the system factor only.
struct SystemModel {
    SpaceLayout layout;
    ComplexMatrix h0;
    ComplexMatrix proj_excited;
    ComplexMatrix dipole;
    double coupling = 0.0;

    ComplexMatrix joint_projector() const { return embed_system(proj_excited, layout); }
    // Throws InvalidArgument naming the broken invariant.
    void check_invariants() const;
};

// Truncated harmonic-oscillator operators on `levels` Fock states.
ComplexMatrix annihilation(std::size_t levels);
ComplexMatrix number_operator(std::size_t levels);
// x = (a + a†)/√2 built from the truncated ladder operators.
ComplexMatrix position(std::size_t levels);

// Oscillator system with ground manifold {|0⟩} and excited manifold {|1⟩..},
// coupled to harmonic modes through g·n_S·Σ x_k. Commutes with P⊗1.
SystemModel build_h0_commuting(double omega_s, const std::vector<double>& omega_env, double g,
                               const SpaceLayout& layout);

// Same bath, coupled through g·x_S·Σ x_k; breaks [H0, P⊗1] = 0 for g ≠ 0.
SystemModel build_h0_noncommuting(double omega_s, const std::vector<double>& omega_env, double g,
                                  const SpaceLayout& layout);

// General two-manifold system with given level energies. The bath couples
// through g·P⊗Σ x_k, so the model always satisfies [H0, P⊗1] = 0. Every
// ground-excited dipole element is 1.
SystemModel build_h0_manifold(const std::vector<double>& ground_energies,
                              const std::vector<double>& excited_energies,
                              const std::vector<double>& omega_env, double g,
                              const SpaceLayout& layout);

struct CorrelatedState {
    DensityMatrix joint;
    ComplexMatrix rho;
    ComplexMatrix tau;
    ComplexMatrix chi;

    const SpaceLayout& layout() const { return joint.layout(); }
};

CorrelatedState split_correlations(const DensityMatrix& joint);
// Validates first; throws DensityError if m is not a state.
CorrelatedState make_state(ComplexMatrix m, const SpaceLayout& layout);

CorrelatedState gibbs_state(const SystemModel& model, double beta);

CorrelatedState product_state(const ComplexMatrix& rho, const ComplexMatrix& tau,
                              const SpaceLayout& layout);

// diag(system_weights) ⊗ diag(env_weights), each normalised to unit sum.
CorrelatedState diagonal_product_state(const std::vector<double>& system_weights,
                                       const std::vector<double>& env_weights,
                                       const SpaceLayout& layout);

struct WitnessPlacement {
    bool offdiag_in_rho = false;
    bool offdiag_in_chi = false;
};

// Joint state whose ground-excited coherences sit in ρ, χ, both or neither.
// Throws ConstructionFailed after 1000 rejected draws.
CorrelatedState build_witness_state(const SpaceLayout& layout, WitnessPlacement placement,
                                    std::uint64_t seed);

struct BlockReport {
    double norm_ge_rho = 0.0;
    double norm_ge_chi = 0.0;
    double norm_gg_chi = 0.0;
    double norm_ee_chi = 0.0;
};

enum class Manifold { Ground, Excited };

// Sector of a joint operator with system row index in `row` manifold and
// system column index in `col` manifold (other entries zeroed).
ComplexMatrix joint_sector(const ComplexMatrix& op, const SpaceLayout& layout, Manifold row,
                           Manifold col);
ComplexMatrix system_sector(const ComplexMatrix& op, const SpaceLayout& layout, Manifold row,
                            Manifold col);

BlockReport block_report(const CorrelatedState& state);

} // namespace wfpc
