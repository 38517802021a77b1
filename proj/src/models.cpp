#include "wfpc/models.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace wfpc {

namespace {

void require_oscillator_layout(const SpaceLayout& layout, const std::vector<double>& omega_env) {
    layout.validate();
    if (layout.ground_dim != 1)
        throw InvalidArgument("oscillator model: ground manifold must be the single level |0>");
    if (layout.env_dims.size() != omega_env.size())
        throw InvalidArgument("oscillator model: one frequency per environment mode required");
}

// Operator acting on environment mode k only, identity on the other modes.
ComplexMatrix env_mode_operator(const SpaceLayout& layout, std::size_t k, const ComplexMatrix& op) {
    ComplexMatrix out = identity(1);
    for (std::size_t m = 0; m < layout.env_dims.size(); ++m)
        out = kron(out, m == k ? op : identity(layout.env_dims[m]));
    return out;
}

ComplexMatrix bath_hamiltonian(const SpaceLayout& layout, const std::vector<double>& omega_env) {
    const auto de = layout.env_dim();
    ComplexMatrix h = ComplexMatrix::Zero(de, de);
    for (std::size_t k = 0; k < omega_env.size(); ++k) {
        const auto n = layout.env_dims[k];
        h += env_mode_operator(layout, k,
                               omega_env[k] * (number_operator(n) + 0.5 * identity(n)));
    }
    return h;
}

ComplexMatrix bath_position_sum(const SpaceLayout& layout) {
    const auto de = layout.env_dim();
    ComplexMatrix x = ComplexMatrix::Zero(de, de);
    for (std::size_t k = 0; k < layout.env_dims.size(); ++k)
        x += env_mode_operator(layout, k, position(layout.env_dims[k]));
    return x;
}

ComplexMatrix excited_projector(const SpaceLayout& layout) {
    ComplexMatrix p = ComplexMatrix::Zero(layout.system_dim(), layout.system_dim());
    for (std::size_t i = layout.ground_dim; i < layout.system_dim(); ++i) p(i, i) = 1.0;
    return p;
}

// Keeps only the ground-excited blocks of a system operator.
ComplexMatrix offdiagonal_blocks(const ComplexMatrix& op, const SpaceLayout& layout) {
    return system_sector(op, layout, Manifold::Ground, Manifold::Excited) +
           system_sector(op, layout, Manifold::Excited, Manifold::Ground);
}

SystemModel build_oscillator(double omega_s, const std::vector<double>& omega_env, double g,
                             const SpaceLayout& layout, bool number_coupling) {
    require_oscillator_layout(layout, omega_env);
    const auto ds = layout.system_dim();
    const ComplexMatrix hs = omega_s * (number_operator(ds) + 0.5 * identity(ds));
    const ComplexMatrix sys_coupling = number_coupling ? number_operator(ds) : position(ds);

    SystemModel m;
    m.layout = layout;
    m.coupling = g;
    m.h0 = kron(hs, identity(layout.env_dim())) +
           kron(identity(ds), bath_hamiltonian(layout, omega_env)) +
           g * kron(sys_coupling, bath_position_sum(layout));
    m.proj_excited = excited_projector(layout);
    const ComplexMatrix a = annihilation(ds);
    m.dipole = offdiagonal_blocks(a + a.adjoint(), layout);
    return m;
}

ComplexMatrix random_env_diagonal(std::size_t de, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    ComplexMatrix t = ComplexMatrix::Zero(de, de);
    double sum = 0.0;
    for (std::size_t k = 0; k < de; ++k) sum += std::real(t(k, k) = u(rng));
    return t / sum;
}

} // namespace

void SystemModel::check_invariants() const {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    const auto ds = static_cast<Eigen::Index>(layout.system_dim());
    if (h0.rows() != d || h0.cols() != d) throw InvalidArgument("model: H0 dimension mismatch");
    if (proj_excited.rows() != ds || dipole.rows() != ds)
        throw InvalidArgument("model: system operator dimension mismatch");
    if (hermiticity_defect(h0) > 1e-10) throw InvalidArgument("model: H0 not Hermitian");
    if (max_norm(proj_excited * proj_excited - proj_excited) > 1e-12)
        throw InvalidArgument("model: P not idempotent");
    if (hermiticity_defect(dipole) > 1e-10) throw InvalidArgument("model: dipole not Hermitian");
    if (max_norm(system_sector(dipole, layout, Manifold::Ground, Manifold::Ground)) > 0.0 ||
        max_norm(system_sector(dipole, layout, Manifold::Excited, Manifold::Excited)) > 0.0)
        throw InvalidArgument("model: dipole has diagonal-manifold blocks");
}

ComplexMatrix annihilation(std::size_t levels) {
    ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
    for (std::size_t n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ComplexMatrix number_operator(std::size_t levels) {
    ComplexMatrix n = ComplexMatrix::Zero(levels, levels);
    for (std::size_t k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

ComplexMatrix position(std::size_t levels) {
    const ComplexMatrix a = annihilation(levels);
    return (a + a.adjoint()) / std::numbers::sqrt2;
}

SystemModel build_h0_commuting(double omega_s, const std::vector<double>& omega_env, double g,
                               const SpaceLayout& layout) {
    return build_oscillator(omega_s, omega_env, g, layout, true);
}

SystemModel build_h0_noncommuting(double omega_s, const std::vector<double>& omega_env, double g,
                                  const SpaceLayout& layout) {
    return build_oscillator(omega_s, omega_env, g, layout, false);
}

SystemModel build_h0_manifold(const std::vector<double>& ground_energies,
                              const std::vector<double>& excited_energies,
                              const std::vector<double>& omega_env, double g,
                              const SpaceLayout& layout) {
    layout.validate();
    if (ground_energies.size() != layout.ground_dim || excited_energies.size() != layout.excited_dim)
        throw InvalidArgument("manifold model: one energy per system level required");
    if (layout.env_dims.size() != omega_env.size())
        throw InvalidArgument("manifold model: one frequency per environment mode required");
    const auto ds = layout.system_dim();
    ComplexMatrix hs = ComplexMatrix::Zero(ds, ds);
    for (std::size_t i = 0; i < layout.ground_dim; ++i) hs(i, i) = ground_energies[i];
    for (std::size_t i = 0; i < layout.excited_dim; ++i)
        hs(layout.ground_dim + i, layout.ground_dim + i) = excited_energies[i];

    SystemModel m;
    m.layout = layout;
    m.coupling = g;
    m.proj_excited = excited_projector(layout);
    m.h0 = kron(hs, identity(layout.env_dim())) +
           kron(identity(ds), bath_hamiltonian(layout, omega_env)) +
           g * kron(m.proj_excited, bath_position_sum(layout));
    m.dipole = offdiagonal_blocks(ComplexMatrix::Ones(ds, ds), layout);
    return m;
}

CorrelatedState split_correlations(const DensityMatrix& joint) {
    const auto& layout = joint.layout();
    ComplexMatrix rho = partial_trace(joint.mat(), layout, Subsystem::System);
    ComplexMatrix tau = partial_trace(joint.mat(), layout, Subsystem::Environment);
    ComplexMatrix chi = joint.mat() - kron(rho, tau);
    return CorrelatedState{joint, std::move(rho), std::move(tau), std::move(chi)};
}

CorrelatedState make_state(ComplexMatrix m, const SpaceLayout& layout) {
    return split_correlations(validate_density(std::move(m), layout));
}

CorrelatedState gibbs_state(const SystemModel& model, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw InvalidArgument("gibbs_state: beta must be finite and non-negative");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(model.h0);
    const auto& e = es.eigenvalues();
    // Shifting by the ground energy leaves the normalised state unchanged and
    // keeps every Boltzmann weight in (0, 1].
    const Eigen::VectorXd w = (-beta * (e.array() - e.minCoeff())).exp().matrix();
    const double z = w.sum();
    if (!std::isfinite(z) || z <= 0.0)
        throw NumericalError("gibbs_state: partition function is not finite for beta=" +
                             std::to_string(beta));
    ComplexMatrix r = es.eigenvectors() * (w / z).cast<Complex>().asDiagonal() *
                      es.eigenvectors().adjoint();
    r = 0.5 * (r + r.adjoint());
    return make_state(std::move(r), model.layout);
}

CorrelatedState product_state(const ComplexMatrix& rho, const ComplexMatrix& tau,
                              const SpaceLayout& layout) {
    if (static_cast<std::size_t>(rho.rows()) != layout.system_dim() ||
        static_cast<std::size_t>(tau.rows()) != layout.env_dim())
        throw DimensionMismatch("product_state: marginal dimensions do not match layout");
    return make_state(kron(rho, tau), layout);
}

CorrelatedState diagonal_product_state(const std::vector<double>& system_weights,
                                       const std::vector<double>& env_weights,
                                       const SpaceLayout& layout) {
    if (system_weights.size() != layout.system_dim() || env_weights.size() != layout.env_dim())
        throw DimensionMismatch("diagonal_product_state: weight vectors do not match layout");
    auto diag = [](const std::vector<double>& w) {
        double s = 0.0;
        for (double x : w) {
            if (x < 0.0) throw InvalidArgument("diagonal_product_state: negative weight");
            s += x;
        }
        if (s <= 0.0) throw InvalidArgument("diagonal_product_state: weights sum to zero");
        ComplexMatrix m = ComplexMatrix::Zero(w.size(), w.size());
        for (std::size_t i = 0; i < w.size(); ++i) m(i, i) = w[i] / s;
        return m;
    };
    return product_state(diag(system_weights), diag(env_weights), layout);
}

ComplexMatrix system_sector(const ComplexMatrix& op, const SpaceLayout& layout, Manifold row,
                            Manifold col) {
    return joint_sector(op, SpaceLayout{layout.ground_dim, layout.excited_dim, {}}, row, col);
}

ComplexMatrix joint_sector(const ComplexMatrix& op, const SpaceLayout& layout, Manifold row,
                           Manifold col) {
    const auto ng = static_cast<Eigen::Index>(layout.ground_dim * layout.env_dim());
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    if (op.rows() != d || op.cols() != d)
        throw DimensionMismatch("joint_sector: operator does not match layout");
    // System index is the most significant factor, so each manifold is a
    // contiguous range of joint indices.
    auto range = [&](Manifold m) {
        return m == Manifold::Ground ? std::pair{Eigen::Index{0}, ng} : std::pair{ng, d - ng};
    };
    const auto [r0, rn] = range(row);
    const auto [c0, cn] = range(col);
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    out.block(r0, c0, rn, cn) = op.block(r0, c0, rn, cn);
    return out;
}

BlockReport block_report(const CorrelatedState& state) {
    const auto& layout = state.layout();
    BlockReport r;
    r.norm_ge_rho = max_norm(system_sector(state.rho, layout, Manifold::Ground, Manifold::Excited));
    r.norm_ge_chi = max_norm(joint_sector(state.chi, layout, Manifold::Ground, Manifold::Excited));
    r.norm_gg_chi = max_norm(joint_sector(state.chi, layout, Manifold::Ground, Manifold::Ground));
    r.norm_ee_chi = max_norm(joint_sector(state.chi, layout, Manifold::Excited, Manifold::Excited));
    return r;
}

CorrelatedState build_witness_state(const SpaceLayout& layout, WitnessPlacement placement,
                                    std::uint64_t seed) {
    layout.validate();
    if (layout.env_dims.empty())
        throw InvalidArgument("build_witness_state: at least one environment mode required");
    const auto ng = layout.ground_dim;
    const auto ne = layout.excited_dim;
    const auto ds = layout.system_dim();
    const auto de = layout.env_dim();
    const auto d = layout.total_dim();
    if (placement.offdiag_in_chi && de < 2)
        throw InvalidArgument("build_witness_state: correlated coherences need env dimension >= 2");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    constexpr double kFloor = 1e-3;
    constexpr int kMaxAttempts = 1000;

    auto ket = [&](std::size_t s, std::size_t e) {
        ComplexVector v = ComplexVector::Zero(d);
        v(s * de + e) = 1.0;
        return v;
    };

    // Uniform mixture of (|g,k⟩ + e^{iθ_k}|e,k+1⟩)/√2 over k: both marginals are
    // diagonal (τ = 1/d_E), all ground-excited coherence lives in χ.
    auto correlated_part = [&]() {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        for (std::size_t k = 0; k < de; ++k) {
            const ComplexVector psi =
                (ket(k % ng, k) + std::polar(1.0, two_pi * unit(rng)) * ket(ng + k % ne, (k + 1) % de)) /
                std::numbers::sqrt2;
            m += psi * psi.adjoint() / static_cast<double>(de);
        }
        return m;
    };
    // cos θ|g_i⟩ + e^{iφ} sin θ|e_j⟩ with sin 2θ bounded away from zero.
    auto coherent_system = [&]() {
        const double theta = std::numbers::pi * (0.1 + 0.3 * unit(rng));
        ComplexVector s = ComplexVector::Zero(ds);
        s(static_cast<Eigen::Index>(rng() % ng)) = std::cos(theta);
        s(static_cast<Eigen::Index>(ng + rng() % ne)) = std::polar(std::sin(theta), two_pi * unit(rng));
        return ComplexMatrix(s * s.adjoint());
    };
    const ComplexMatrix mixed_env = identity(de) / static_cast<double>(de);

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        ComplexMatrix r;
        const double mix = 0.1 + 0.4 * unit(rng);
        if (!placement.offdiag_in_rho && !placement.offdiag_in_chi) {
            // Classically correlated, block-diagonal: Σ_s p_s |s⟩⟨s| ⊗ τ_s.
            r = ComplexMatrix::Zero(d, d);
            double total = 0.0;
            std::vector<double> p(ds);
            for (auto& x : p) total += (x = 0.1 + unit(rng));
            for (std::size_t s = 0; s < ds; ++s) {
                ComplexMatrix proj = ComplexMatrix::Zero(ds, ds);
                proj(s, s) = p[s] / total;
                r += kron(proj, random_env_diagonal(de, rng));
            }
        } else if (!placement.offdiag_in_rho) {
            r = (1.0 - mix) * correlated_part() + mix * identity(d) / static_cast<double>(d);
        } else if (!placement.offdiag_in_chi) {
            const ComplexMatrix rho =
                (1.0 - mix) * coherent_system() + mix * identity(ds) / static_cast<double>(ds);
            r = kron(rho, random_env_diagonal(de, rng));
        } else {
            const double weight = 0.3 + 0.4 * unit(rng);
            r = weight * kron(coherent_system(), mixed_env) + (1.0 - weight) * correlated_part();
        }
        r = 0.5 * (r + r.adjoint());
        r /= r.trace().real();

        std::optional<CorrelatedState> state;
        try {
            state = make_state(r, layout);
        } catch (const DensityError&) {
            continue;
        }
        const BlockReport br = block_report(*state);
        const bool rho_ok = placement.offdiag_in_rho ? br.norm_ge_rho > kFloor : br.norm_ge_rho <= 1e-12;
        const bool chi_ok = placement.offdiag_in_chi ? br.norm_ge_chi > kFloor : br.norm_ge_chi <= 1e-12;
        if (rho_ok && chi_ok) return *std::move(state);
    }
    throw ConstructionFailed("build_witness_state: no valid state after 1000 attempts");
}

} // namespace wfpc
