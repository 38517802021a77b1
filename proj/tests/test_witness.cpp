#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "wfpc/witness.hpp"

using namespace wfpc;
using oracle::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;
const SpaceLayout kLayout{1, 1, {3}};
const TimeGrid kGrid{0.0, 80.0, 800};

SystemModel commuting(double g = 0.2) { return build_h0_commuting(1.0, {0.8}, g, kLayout); }

// Compact same-amplitude family: global phases plus time shifts.
std::vector<SpectralPulse> family(double lambda = 1e-4) {
    const SpectralPulse base = gaussian_pulse(1.0, 0.2, 128, 5.0, lambda, 40.0);
    const double consts[] = {0.0, kPi / 2, kPi, 3 * kPi / 2};
    const double shifts[] = {-3.0, 3.0};
    std::vector<SpectralPulse> out = phase_family(base, PhaseKind::Constant, consts, 0, 0);
    for (const SpectralPulse& p : phase_family(base, PhaseKind::Linear, shifts, 0, 0)) out.push_back(p);
    return out;
}

ComplexVector basis(Eigen::Index n, Eigen::Index i) {
    ComplexVector v = ComplexVector::Zero(n);
    v(i) = 1.0;
    return v;
}

ComplexMatrix hadamard() {
    ComplexMatrix h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return h / std::sqrt(2.0);
}

// Σ_i p_i |i⟩⟨i| ⊗ τ_i on a two-level system.
CorrelatedState classical_state(const ComplexMatrix& tau_g, const ComplexMatrix& tau_e, double pg) {
    ComplexMatrix pg_proj = ComplexMatrix::Zero(2, 2), pe_proj = ComplexMatrix::Zero(2, 2);
    pg_proj(0, 0) = 1.0;
    pe_proj(1, 1) = 1.0;
    const auto env = static_cast<std::size_t>(tau_g.rows());
    return make_state(pg * oracle::kron(pg_proj, tau_g) + (1 - pg) * oracle::kron(pe_proj, tau_e),
                      SpaceLayout{1, 1, {env}});
}

ComplexMatrix diag3(double a, double b, double c) {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m / (a + b + c);
}

} // namespace

TEST_SUITE("witness") {

TEST_CASE("throw-and-replace") {
    std::mt19937_64 rng(31);
    const ComplexMatrix rho0 = oracle::random_density(2, rng);
    const CorrelatedState corr = make_state(oracle::random_density(6, rng), kLayout);
    const CorrelatedState out = prep_throw_replace(corr, rho0);
    CHECK(max_abs(out.chi) <= 1e-13);
    CHECK(max_abs(out.rho - rho0) <= 1e-13);
    CHECK(max_abs(out.tau - corr.tau) <= 1e-13);

    const CorrelatedState fixed = product_state(rho0, corr.tau, kLayout);
    CHECK(max_abs(prep_throw_replace(fixed, rho0).joint.mat() - fixed.joint.mat()) <= 1e-13);
    CHECK_THROWS_AS(prep_throw_replace(corr, identity(3) / 3.0), DimensionMismatch);
}

TEST_CASE("marginal-preserving preparation") {
    const SystemModel nc = build_h0_noncommuting(1.0, {0.8}, 0.2, kLayout);
    const CorrelatedState g = gibbs_state(nc, 1.0);
    REQUIRE(max_abs(g.chi) > 1e-6);
    const CorrelatedState out = prep_marginal_preserving(g);
    CHECK(max_abs(out.rho - g.rho) <= 1e-13);
    CHECK(max_abs(out.tau - g.tau) <= 1e-13);
    CHECK(max_abs(out.chi) <= 1e-13);
    CHECK(max_abs(prep_marginal_preserving(out).joint.mat() - out.joint.mat()) <= 1e-13);

    std::mt19937_64 rng(32);
    const CorrelatedState prod = product_state(oracle::random_density(2, rng), oracle::random_density(3, rng), kLayout);
    CHECK(max_abs(prep_marginal_preserving(prod).joint.mat() - prod.joint.mat()) <= 1e-13);
}

TEST_CASE("two-copy swap realises the marginal-preserving map") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 3; ++trial) {
        const CorrelatedState s = make_state(oracle::random_density(4, rng), SpaceLayout{1, 1, {2}});
        const CorrelatedState swapped = prep_two_copy_swap(s);
        CHECK(max_abs(swapped.joint.mat() - prep_marginal_preserving(s).joint.mat()) <= 1e-12);
    }
    const CorrelatedState w = build_witness_state(kLayout, {true, true}, 3);
    CHECK(max_abs(prep_two_copy_swap(w).joint.mat() - kron(w.rho, w.tau)) <= 1e-12);
}

TEST_CASE("projective preparation") {
    std::mt19937_64 rng(34);
    const ComplexMatrix tau = oracle::random_density(3, rng);
    const CorrelatedState prod = product_state(oracle::random_density(2, rng), tau, kLayout);
    ComplexVector plus(2);
    plus << 1.0, Complex(0.0, 1.0);
    for (const ComplexVector& psi : {basis(2, 0), basis(2, 1), ComplexVector(plus / std::sqrt(2.0))}) {
        const CorrelatedState out = prep_projective(prod, psi);
        CHECK(max_abs(out.tau - tau) <= 1e-12);
        CHECK(max_abs(out.rho - psi * psi.adjoint()) <= 1e-12);
        CHECK(max_abs(out.chi) <= 1e-12);
    }

    const ComplexMatrix tg = diag3(3, 1, 1), te = diag3(1, 1, 3);
    const CorrelatedState cls = classical_state(tg, te, 0.3);
    CHECK(max_abs(prep_projective(cls, basis(2, 0)).tau - tg) <= 1e-12);
    const auto [env_e, prob_e] = conditional_environment(cls, basis(2, 1));
    CHECK(max_abs(env_e - te) <= 1e-12);
    CHECK(prob_e == doctest::Approx(0.7));

    // (|g,0⟩ + |e,1⟩)/√2
    ComplexVector bell = ComplexVector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const CorrelatedState pure = make_state(bell * bell.adjoint(), SpaceLayout{1, 1, {2}});
    const CorrelatedState cond = prep_projective(pure, basis(2, 0));
    CHECK(std::abs(cond.tau(0, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(cond.tau(1, 1)) <= 1e-12);

    ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    const CorrelatedState only_g = product_state(ground, tau, kLayout);
    CHECK_THROWS_AS(prep_projective(only_g, basis(2, 1)), ZeroProbability);
}

TEST_CASE("rotation") {
    std::mt19937_64 rng(35);
    const CorrelatedState s = make_state(oracle::random_density(6, rng), kLayout);
    CHECK(max_abs(prep_rotate(s, identity(2)).joint.mat() - s.joint.mat()) <= 1e-15);

    ComplexMatrix ground = ComplexMatrix::Zero(2, 2);
    ground(0, 0) = 1.0;
    const CorrelatedState g = product_state(ground, oracle::random_density(3, rng), kLayout);
    const CorrelatedState r = prep_rotate(g, hadamard());
    CHECK(std::abs(r.rho(0, 1)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_abs(prep_rotate(s, hadamard()).tau - s.tau) <= 1e-13);

    ComplexMatrix bad = identity(2);
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(prep_rotate(s, bad), InvalidArgument);
}

TEST_CASE("phase-control detection follows the no-go conditions") {
    const std::vector<SpectralPulse> fam = family();
    const SystemModel c = commuting();
    const PhaseControlReport gibbs_c = detect_wfpc(c, gibbs_state(c, 1.0), fam, kGrid);
    CHECK_FALSE(gibbs_c.detected);
    CHECK(gibbs_c.contrast <= 1e-9);
    CHECK(gibbs_c.profile.size() == fam.size());
    CHECK(gibbs_c.yields[3].first == 3);

    const SystemModel nc = build_h0_noncommuting(1.0, {0.8}, 0.2, kLayout);
    // Second order in λ here, so it needs a stronger (still weak) field.
    const PhaseControlReport gibbs_nc = detect_wfpc(nc, gibbs_state(nc, 1.0), family(3e-3), kGrid);
    CHECK(gibbs_nc.detected);
    CHECK(detect_wfpc(c, gibbs_state(c, 1.0), family(3e-3), kGrid).contrast <= 1e-9);

    // Populations only, no ground-excited coherence anywhere.
    const CorrelatedState diag = diagonal_product_state({0.7, 0.3}, {0.5, 0.3, 0.2}, kLayout);
    CHECK_FALSE(detect_wfpc(c, diag, fam, kGrid).detected);

    const std::vector<SpectralPulse> one{fam.front()};
    CHECK_THROWS_AS(detect_wfpc(c, diag, one, kGrid), InvalidArgument);
    std::vector<SpectralPulse> mixed{fam[0], fam[1]};
    mixed[1].amplitude[10] *= 2.0;
    CHECK_THROWS_AS(detect_wfpc(c, diag, mixed, kGrid), InvalidArgument);
}

TEST_CASE("contrast is non-negative and detection is strict") {
    const SystemModel c = commuting();
    const CorrelatedState s = build_witness_state(kLayout, {true, false}, 44);
    DetectOptions opts;
    opts.check_scaling = false;
    const PhaseControlReport r = detect_wfpc(c, s, family(), kGrid, opts);
    CHECK(r.contrast >= 0.0);
    opts.threshold = r.contrast;
    CHECK_FALSE(detect_wfpc(c, s, family(), kGrid, opts).detected);
}

TEST_CASE("global phases cannot change the second-order term") {
    const SystemModel c = commuting();
    const CorrelatedState s = build_witness_state(kLayout, {true, true}, 5);
    const SpectralPulse base = gaussian_pulse(1.0, 0.2, 128, 5.0, 1e-3, 40.0);
    const double consts[] = {0.0, 1.0, 2.0, kPi, 5.0};
    std::vector<double> second;
    for (const SpectralPulse& p : phase_family(base, PhaseKind::Constant, consts, 0, 0))
        second.push_back(perturbative_parts(c, s, sample_midpoints(p, kGrid), kGrid).second_order);
    const auto [lo, hi] = std::minmax_element(second.begin(), second.end());
    CHECK(*hi - *lo <= 1e-9 * std::abs(*hi));
}

TEST_CASE("weak-field scaling windows") {
    const SystemModel c = commuting();
    const SpectralPulse p = gaussian_pulse(1.0, 0.2, 128, 5.0, 1e-4, 40.0);
    const ScalingCheck second = weak_field_scaling(c, gibbs_state(c, 1.0), p, kGrid, Method::Exact);
    REQUIRE(second.ratio);
    CHECK(*second.ratio == doctest::Approx(4.0).epsilon(0.01));
    CHECK(second.ok);

    const ScalingCheck first = weak_field_scaling(c, build_witness_state(kLayout, {true, false}, 44), p, kGrid,
                                                  Method::Exact);
    REQUIRE(first.ratio);
    CHECK(*first.ratio == doctest::Approx(2.0).epsilon(0.01));
    CHECK(first.ok);

    const ScalingCheck strong = weak_field_scaling(c, gibbs_state(c, 1.0), scale_weak(p, 0.3), kGrid, Method::Exact);
    CHECK_FALSE(strong.ok);
}

TEST_CASE("no-go condition report") {
    const SpectralPulse p = family().front();
    const SystemModel c = commuting();
    const ConditionReport cr = check_nogo_conditions(c, gibbs_state(c, 1.0), p, kGrid);
    CHECK(cr.condition2_pass);
    CHECK(cr.condition3_pass);
    CHECK(cr.all_pass());
    CHECK(cr.condition2_norm <= kConditionTol);

    const SystemModel nc = build_h0_noncommuting(1.0, {0.8}, 0.2, kLayout);
    const ConditionReport ncr = check_nogo_conditions(nc, gibbs_state(nc, 1.0), p, kGrid);
    CHECK_FALSE(ncr.condition2_pass);
    CHECK(ncr.condition3_pass);
    CHECK(ncr.condition2_norm > 1e-3);

    const ConditionReport wr = check_nogo_conditions(c, build_witness_state(kLayout, {true, false}, 1), p, kGrid);
    CHECK_FALSE(wr.condition3_pass);
    CHECK(wr.condition3_norm > 1e-3);
}

TEST_CASE("decision table") {
    CHECK(classify(false, false, 0.0, 1e-7) == Quadrant::NoOffdiag);
    CHECK(classify(false, false, 1.0, 1e-7) == Quadrant::NoOffdiag);
    CHECK(classify(true, false, 0.5, 1e-7) == Quadrant::ChiOnly);
    CHECK(classify(true, true, 1e-7, 1e-7) == Quadrant::RhoOnly);
    CHECK(classify(true, true, 2e-7, 1e-7) == Quadrant::Both);
    CHECK(classify(false, true, 0.0, 1e-7) == Quadrant::RhoOnly);
    for (Quadrant q : {Quadrant::NoOffdiag, Quadrant::ChiOnly, Quadrant::RhoOnly, Quadrant::Both})
        CHECK(parse_quadrant(to_string(q)) == q);
    CHECK_THROWS_AS(parse_quadrant("Diagonal"), InvalidArgument);
}

TEST_CASE("two-copy protocol recovers every placement") {
    const SystemModel c = commuting();
    const std::vector<SpectralPulse> fam = family();
    struct Case {
        WitnessPlacement placement;
        std::uint64_t seed;
        Quadrant expect;
    };
    for (const Case& k : {Case{{false, false}, 42, Quadrant::NoOffdiag}, Case{{false, true}, 43, Quadrant::ChiOnly},
                          Case{{true, false}, 44, Quadrant::RhoOnly}, Case{{true, true}, 45, Quadrant::Both}}) {
        const WitnessVerdict v = run_witness_protocol(c, build_witness_state(kLayout, k.placement, k.seed), fam, kGrid);
        CAPTURE(to_string(k.expect));
        CHECK(v.quadrant == k.expect);
        CHECK_FALSE(v.condition2_caveat);
        CHECK(v.correlations_witnessed == (k.expect == Quadrant::ChiOnly || k.expect == Quadrant::Both));
        CHECK(v.report_before.scaling.ok);
    }
}

TEST_CASE("no false positives without ground-excited coherence") {
    const SystemModel c = commuting();
    const std::vector<SpectralPulse> fam = family();
    const WitnessVerdict g = run_witness_protocol(c, gibbs_state(c, 0.7), fam, kGrid);
    CHECK(g.quadrant == Quadrant::NoOffdiag);
    CHECK(g.summary.find("does not show that none exist") != std::string::npos);

    // Classical correlations without coherence stay invisible.
    const CorrelatedState cls = classical_state(diag3(3, 1, 1), diag3(1, 1, 3), 0.6);
    CHECK(run_witness_protocol(c, cls, fam, kGrid).quadrant == Quadrant::NoOffdiag);

    // Product states with coherence never yield ChiOnly.
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 3; ++trial) {
        const CorrelatedState prod = product_state(oracle::random_density(2, rng), oracle::random_density(3, rng), kLayout);
        CHECK(run_witness_protocol(c, prod, fam, kGrid).quadrant == Quadrant::RhoOnly);
    }
}

TEST_CASE("non-commuting model carries the caveat") {
    const SystemModel nc = build_h0_noncommuting(1.0, {0.8}, 0.2, kLayout);
    const WitnessVerdict v = run_witness_protocol(nc, build_witness_state(kLayout, {false, true}, 43), family(), kGrid);
    CHECK(v.condition2_caveat);
    CHECK_FALSE(v.conditions.condition2_pass);
}

TEST_CASE("verdict is deterministic across worker counts") {
    const SystemModel c = commuting();
    const CorrelatedState s = build_witness_state(kLayout, {true, true}, 45);
    DetectOptions one, many;
    one.workers = 1;
    many.workers = 4;
    const WitnessVerdict a = run_witness_protocol(c, s, family(), kGrid, {}, one);
    const WitnessVerdict b = run_witness_protocol(c, s, family(), kGrid, {}, many);
    CHECK(a.quadrant == b.quadrant);
    CHECK(a.report_before.profile == b.report_before.profile);
    CHECK(a.report_after.profile == b.report_after.profile);
    CHECK(a.profile_distance == b.profile_distance);
}

TEST_CASE("rotated-marginal witness") {
    const SystemModel c = commuting();
    const std::vector<SpectralPulse> fam = family(1e-3);
    const std::vector<ComplexVector> psis{basis(2, 0), basis(2, 1)};

    std::mt19937_64 rng(37);
    const CorrelatedState prod = product_state(oracle::random_density(2, rng), oracle::random_density(3, rng), kLayout);
    const RotatedWitnessReport pr = rotated_marginal_witness(c, prod, psis, hadamard(), fam, kGrid);
    REQUIRE(pr.branches.size() == 2);
    CHECK(pr.max_environment_distance <= 1e-8);
    CHECK_FALSE(pr.environments_differ);
    CHECK(pr.max_contrast_difference <= 1e-9);
    CHECK_FALSE(pr.correlations_witnessed);

    const CorrelatedState cls = classical_state(diag3(3, 1, 1), diag3(1, 1, 3), 0.5);
    const RotatedWitnessReport cr = rotated_marginal_witness(c, cls, psis, hadamard(), fam, kGrid);
    CHECK(cr.environments_differ);
    CHECK(cr.correlations_witnessed);
    CHECK(cr.max_contrast_difference > 1e-6);

    const RotatedWitnessReport nr = rotated_marginal_witness(c, cls, psis, identity(2), fam, kGrid);
    for (const RotatedBranch& b : nr.branches) CHECK_FALSE(b.report.detected);

    CHECK_THROWS_AS(rotated_marginal_witness(c, cls, {}, hadamard(), fam, kGrid), InvalidArgument);
}

} // TEST_SUITE
