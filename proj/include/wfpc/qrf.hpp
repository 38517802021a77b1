#pragma once

#include <vector>

#include "wfpc/witness.hpp"

namespace wfpc {

// Two-time correlation functions under the bare evolution U0(t) = e^{-iH0 t}
// (system and bath coupled, no control field). A and B are system operators.

// tr(U0†(t2) B U0(t2) U0†(t1) A U0(t1) R(0))
Complex exact_two_time(const SystemModel& model, const CorrelatedState& r0, const ComplexMatrix& a,
                       const ComplexMatrix& b, double t1, double t2);

// Same correlator with R(t1) replaced by ρ(t1)⊗τ(t1) before the second leg:
// tr_S(B tr_E(U0(t2-t1) (A⊗1)(ρ(t1)⊗τ(t1)) U0†(t2-t1))).
Complex regression_two_time(const SystemModel& model, const CorrelatedState& r0,
                            const ComplexMatrix& a, const ComplexMatrix& b, double t1, double t2);

// Matrix of the induced system map Φ[X] = tr_E(U0(Δ)(X⊗τ)U0†(Δ)) acting on
// column-stacked d_S×d_S operators. Used to cross-check the regression branch.
ComplexMatrix induced_map_matrix(const SystemModel& model, const ComplexMatrix& tau, double delta);
ComplexMatrix apply_map(const ComplexMatrix& map, const ComplexMatrix& x);

// Joint state after free evolution for time t.
CorrelatedState free_evolve(const SystemModel& model, const CorrelatedState& r0, double t);

struct QrfReport {
    double t1 = 0.0;
    double t2 = 0.0;
    Complex exact_value;
    Complex regression_value;
    double deviation = 0.0;
    double chi_norm = 0.0;     // ‖χ(t1)‖_max
    double chi_ge_norm = 0.0;  // ground-excited sector of χ(t1)
    bool violated = false;
};

// One report per (t1, t1 + Δ) pair, ordered by t1 then Δ.
std::vector<QrfReport> qrf_scan(const SystemModel& model, const CorrelatedState& r0,
                                const ComplexMatrix& a, const ComplexMatrix& b,
                                const std::vector<double>& t1_grid, const std::vector<double>& delta_grid,
                                double threshold = 1e-8, std::size_t workers = 0);

// Runs the two-copy protocol on R(t1) with the field acting on [t1, t1 + T].
// Because H0 is time independent, the protocol grid is used relative to t1.
WitnessVerdict intermediate_wfpc_witness(const SystemModel& model, const CorrelatedState& r0,
                                         double t1, const std::vector<SpectralPulse>& family,
                                         const TimeGrid& grid, const WitnessThresholds& thresholds = {},
                                         const DetectOptions& options = {});

} // namespace wfpc
