#include "wfpc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wfpc {

namespace {

constexpr double kCondition2Tol = 1e-8;

// (K ⊗ 1_E) X for a system operator K.
ComplexMatrix apply_system_left(const ComplexMatrix& k, const ComplexMatrix& x, std::size_t de) {
    const auto ds = k.rows();
    const auto e = static_cast<Eigen::Index>(de);
    ComplexMatrix y = ComplexMatrix::Zero(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < ds; ++i)
        for (Eigen::Index l = 0; l < ds; ++l) {
            if (k(i, l) == Complex{0.0, 0.0}) continue;
            y.middleRows(i * e, e).noalias() += k(i, l) * x.middleRows(l * e, e);
        }
    return y;
}

ComplexMatrix conjugate_system(const ComplexMatrix& k, const ComplexMatrix& x, std::size_t de) {
    return apply_system_left(k, apply_system_left(k, x, de).adjoint(), de).adjoint();
}

void check_field(const TimeField& field, const TimeGrid& grid) {
    grid.validate();
    if (field.values.size() != grid.steps || field.times.size() != grid.steps)
        throw DimensionMismatch("field has " + std::to_string(field.values.size()) +
                                " samples, grid needs one per step (" + std::to_string(grid.steps) + ")");
    const double tol = 1e-9 * std::max(1.0, std::abs(grid.t1) + std::abs(grid.t0));
    for (std::size_t k = 0; k < grid.steps; ++k)
        if (std::abs(field.times[k] - grid.midpoint(k)) > tol)
            throw DimensionMismatch("field is not sampled on the grid midpoints");
}

void check_state(const SystemModel& model, const CorrelatedState& state) {
    if (!(state.layout() == model.layout))
        throw DimensionMismatch("state layout does not match model layout");
}

double population(const ComplexMatrix& proj, const ComplexMatrix& r) {
    // tr(P R) without forming the product.
    return (proj.transpose().cwiseProduct(r)).sum().real();
}

DensityMatrix propagated_state(ComplexMatrix r, const SpaceLayout& layout) {
    Tolerances tol;
    tol.psd_floor = -1e-9;
    r = 0.5 * (r + r.adjoint());
    return validate_density(std::move(r), layout, tol);
}

struct PerturbativeRun {
    Trajectory trajectory;
    PerturbativeParts parts;
};

PerturbativeRun run_perturbative(const SystemModel& model, const CorrelatedState& state,
                                 const TimeField& field, const TimeGrid& grid) {
    check_field(field, grid);
    check_state(model, state);
    const double defect = condition2_defect(model);
    if (defect > kCondition2Tol)
        throw ConditionViolated("perturbative_p: [P⊗1, H0] = " + std::to_string(defect) +
                                " exceeds 1e-8; the second-order observable needs it to vanish");

    const FreeEvolution free(model);
    const auto& layout = model.layout;
    const ComplexMatrix proj = free.to_eigenbasis(model.joint_projector());
    const ComplexMatrix r0 = free.to_eigenbasis(state.joint.mat());
    const ComplexMatrix& p_ds = model.proj_excited;
    const ComplexMatrix up = p_ds * model.dipole * (identity(layout.system_dim()) - p_ds);
    const ComplexMatrix v_up = free.to_eigenbasis(embed_system(up, layout));
    const ComplexMatrix v_down = v_up.adjoint();
    const ComplexMatrix first_kernel = commutator(r0, proj);  // tr(P[A,R]) = tr(A[R,P])

    const double dt = grid.dt();
    const double p0 = population(model.joint_projector(), state.joint.mat());
    // Under Condition 2 the Schrödinger and interaction-picture populations agree.
    if (std::abs(population(proj, r0) - p0) > 1e-10)
        throw NumericalError("perturbative_p: picture consistency check failed at t0");

    PerturbativeRun run;
    auto& traj = run.trajectory;
    traj.method = Method::Perturbative2;
    traj.times = grid.nodes();
    traj.populations.reserve(grid.steps + 1);
    traj.populations.push_back(p0);

    // Product midpoint rule on the step midpoints: the inner integral collects
    // all earlier nodes with full weight and the current node with half weight,
    // so both time orderings tile the square exactly.
    ComplexMatrix inner = ComplexMatrix::Zero(r0.rows(), r0.cols());
    double first = 0.0, second = 0.0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double s = grid.midpoint(k) - grid.t0;
        const Complex eps = field.values[k];
        const ComplexMatrix a =
            (eps * v_up + std::conj(eps) * v_down).cwiseProduct(free.phase_factors(s));
        const ComplexMatrix w = inner + 0.5 * dt * a;
        const double f1 = (Complex{0.0, -1.0} * (a.transpose().cwiseProduct(first_kernel)).sum()).real();
        const ComplexMatrix nested = commutator(commutator(w, r0), proj);
        const double f2 = -(a.transpose().cwiseProduct(nested)).sum().real();
        first += dt * f1;
        second += dt * f2;
        traj.populations.push_back(p0 + first + second);
        inner += dt * a;
    }
    run.parts = {first, second};
    return run;
}

} // namespace

std::vector<double> TimeGrid::nodes() const {
    std::vector<double> out(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) out[k] = at(k);
    return out;
}

std::vector<double> TimeGrid::midpoints() const {
    std::vector<double> out(steps);
    for (std::size_t k = 0; k < steps; ++k) out[k] = midpoint(k);
    return out;
}

void TimeGrid::validate() const {
    if (!(t1 > t0)) throw InvalidArgument("time grid: t1 must exceed t0");
    if (steps == 0) throw InvalidArgument("time grid: steps must be positive");
}

Method parse_method(std::string_view name) {
    if (name == "exact") return Method::Exact;
    if (name == "pert2" || name == "perturbative2") return Method::Perturbative2;
    throw InvalidArgument("unknown method '" + std::string(name) + "' (expected exact|pert2)");
}

std::string_view to_string(Method m) {
    return m == Method::Exact ? "exact" : "pert2";
}

TimeField sample_midpoints(const SpectralPulse& pulse, const TimeGrid& grid) {
    grid.validate();
    const auto mids = grid.midpoints();
    return to_time_domain(pulse, mids);
}

ComplexMatrix control_operator(const SystemModel& model, Complex epsilon) {
    const auto ds = model.layout.system_dim();
    const ComplexMatrix& p = model.proj_excited;
    const ComplexMatrix q = identity(ds) - p;
    const ComplexMatrix up = p * model.dipole * q;
    return epsilon * up + std::conj(epsilon) * up.adjoint();
}

FreeEvolution::FreeEvolution(const SystemModel& model) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(model.h0);
    if (es.info() != Eigen::Success) throw NumericalError("FreeEvolution: eigendecomposition failed");
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

ComplexMatrix FreeEvolution::propagator(double t) const {
    const ComplexVector ph = (Complex{0.0, -t} * energies_.cast<Complex>().array()).exp().matrix();
    return vectors_ * ph.asDiagonal() * vectors_.adjoint();
}

ComplexMatrix FreeEvolution::to_eigenbasis(const ComplexMatrix& x) const {
    return vectors_.adjoint() * x * vectors_;
}

ComplexMatrix FreeEvolution::from_eigenbasis(const ComplexMatrix& x) const {
    return vectors_ * x * vectors_.adjoint();
}

ComplexMatrix FreeEvolution::phase_factors(double t) const {
    const ComplexVector ph = (Complex{0.0, t} * energies_.cast<Complex>().array()).exp().matrix();
    return ph * ph.adjoint();
}

ComplexMatrix interaction_v(const SystemModel& model, Complex epsilon, double t) {
    const ComplexMatrix u0 = herm_exp(model.h0, Complex{0.0, -t});
    return u0.adjoint() * embed_system(control_operator(model, epsilon), model.layout) * u0;
}

ComplexMatrix interaction_v(const SystemModel& model, const SpectralPulse& pulse, double t) {
    return interaction_v(model, field_at(pulse, t), t);
}

double condition2_defect(const SystemModel& model) {
    return max_norm(commutator(model.joint_projector(), model.h0));
}

Trajectory exact_propagate(const SystemModel& model, const CorrelatedState& state,
                           const TimeField& field, const TimeGrid& grid,
                           const ExactOptions& options) {
    check_field(field, grid);
    check_state(model, state);
    const auto& layout = model.layout;
    const auto de = layout.env_dim();
    const double dt = grid.dt();
    const ComplexMatrix proj = model.joint_projector();

    Trajectory traj;
    traj.method = Method::Exact;
    traj.times = grid.nodes();
    traj.populations.reserve(grid.steps + 1);
    traj.populations.push_back(population(proj, state.joint.mat()));

    ComplexMatrix r = state.joint.mat();
    if (options.scheme == StepScheme::Midpoint) {
        for (std::size_t k = 0; k < grid.steps; ++k) {
            const ComplexMatrix h =
                model.h0 + embed_system(control_operator(model, field.values[k]), layout);
            const ComplexMatrix u = herm_exp(h, Complex{0.0, -dt});
            r = u * r * u.adjoint();
            traj.populations.push_back(population(proj, r));
        }
    } else {
        // Carry S_k = H R(t_k) H† with H = e^{-iH0Δt/2}; consecutive half
        // steps merge into one full free step.
        const FreeEvolution free(model);
        const ComplexMatrix half = free.propagator(0.5 * dt);
        const ComplexMatrix full = free.propagator(dt);
        const ComplexMatrix proj_shifted = half.adjoint() * proj * half;
        ComplexMatrix s = half * r * half.adjoint();
        for (std::size_t k = 0; k < grid.steps; ++k) {
            const ComplexMatrix kick =
                herm_exp(control_operator(model, field.values[k]), Complex{0.0, -dt});
            const ComplexMatrix kicked = conjugate_system(kick, s, de);
            traj.populations.push_back(population(proj_shifted, kicked));
            if (k + 1 < grid.steps)
                s = full * kicked * full.adjoint();
            else
                r = half * kicked * half.adjoint();
        }
    }
    if (options.keep_final_state) traj.final_state = propagated_state(std::move(r), layout);
    return traj;
}

ComplexMatrix exact_unitary(const SystemModel& model, const TimeField& field, const TimeGrid& grid,
                            StepScheme scheme) {
    check_field(field, grid);
    const auto& layout = model.layout;
    const double dt = grid.dt();
    ComplexMatrix u = identity(layout.total_dim());
    const FreeEvolution free(model);
    const ComplexMatrix half = free.propagator(0.5 * dt);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const ComplexMatrix v = control_operator(model, field.values[k]);
        if (scheme == StepScheme::Midpoint) {
            u = herm_exp(model.h0 + embed_system(v, layout), Complex{0.0, -dt}) * u;
        } else {
            const ComplexMatrix kick = herm_exp(v, Complex{0.0, -dt});
            u = half * apply_system_left(kick, half * u, layout.env_dim());
        }
    }
    return u;
}

Trajectory perturbative_p(const SystemModel& model, const CorrelatedState& state,
                          const TimeField& field, const TimeGrid& grid) {
    return run_perturbative(model, state, field, grid).trajectory;
}

PerturbativeParts perturbative_parts(const SystemModel& model, const CorrelatedState& state,
                                     const TimeField& field, const TimeGrid& grid) {
    return run_perturbative(model, state, field, grid).parts;
}

double first_order_rate_analytic(const SystemModel& model, const CorrelatedState& state,
                                 Complex epsilon, double t) {
    check_state(model, state);
    const auto& layout = model.layout;
    const auto ng = layout.ground_dim;
    const auto ds = layout.system_dim();
    const auto de = layout.env_dim();

    // μ̃(t) = U0†(t) (P μ (1-P) ⊗ 1) U0(t), built from the spectral sum.
    const FreeEvolution free(model);
    const ComplexMatrix up = model.proj_excited * model.dipole *
                             (identity(ds) - model.proj_excited);
    const ComplexMatrix mu_t = free.from_eigenbasis(
        free.to_eigenbasis(embed_system(up, layout)).cwiseProduct(free.phase_factors(t)));

    // c_{l n, m k} = ⟨g_l, α_n| R(0) |e_m, α_k⟩. When μ̃ acts trivially on the
    // environment the k = n terms survive and the sum reduces to
    // t_α Σ μ̃_{ml} c_{lmnn}.
    const ComplexMatrix& r = state.joint.mat();
    Complex acc{0.0, 0.0};
    for (std::size_t l = 0; l < ng; ++l)
        for (std::size_t m = ng; m < ds; ++m)
            for (std::size_t n = 0; n < de; ++n)
                for (std::size_t k = 0; k < de; ++k) {
                    const auto g_idx = static_cast<Eigen::Index>(l * de + n);
                    const auto e_idx = static_cast<Eigen::Index>(m * de + k);
                    acc += mu_t(e_idx, g_idx) * r(g_idx, e_idx);
                }
    // −i(ε Σ μ̃c − c.c.) = 2 Im(ε Σ μ̃c)
    return 2.0 * std::imag(epsilon * acc);
}

Trajectory propagate(Method method, const SystemModel& model, const CorrelatedState& state,
                     const SpectralPulse& pulse, const TimeGrid& grid, StepScheme scheme) {
    const TimeField field = sample_midpoints(pulse, grid);
    if (method == Method::Perturbative2) return perturbative_p(model, state, field, grid);
    return exact_propagate(model, state, field, grid, {scheme, true});
}

double grid_convergence(Method method, const SystemModel& model, const CorrelatedState& state,
                        const SpectralPulse& pulse, const TimeGrid& grid, StepScheme scheme) {
    const double coarse = propagate(method, model, state, pulse, grid, scheme).final_population();
    const double fine =
        propagate(method, model, state, pulse, grid.refined(), scheme).final_population();
    return std::abs(coarse - fine);
}

AutocorrelationCheck second_order_autocorrelation_check(const SystemModel& model,
                                                        const CorrelatedState& diag_state,
                                                        const std::vector<SpectralPulse>& family,
                                                        const TimeGrid& grid) {
    const BlockReport br = block_report(diag_state);
    if (br.norm_ge_rho > 1e-10 || br.norm_ge_chi > 1e-10)
        throw InvalidArgument("second_order_autocorrelation_check: state has ground-excited coherence");
    if (family.empty()) throw InvalidArgument("second_order_autocorrelation_check: empty family");

    AutocorrelationCheck out;
    double p0 = 0.0;
    double lo = 0.0, hi = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Trajectory t = perturbative_p(model, diag_state, sample_midpoints(family[i], grid), grid);
        p0 = t.populations.front();
        const double y = t.final_population();
        out.final_populations.push_back(y);
        lo = i == 0 ? y : std::min(lo, y);
        hi = i == 0 ? y : std::max(hi, y);
        scale = std::max(scale, std::abs(y - p0));
    }
    out.relative_spread = scale > 0.0 ? (hi - lo) / scale : 0.0;
    out.phase_independent = out.relative_spread <= 1e-9;
    return out;
}

} // namespace wfpc
