#include <doctest.h>

#include "oracles.hpp"
#include "wfpc/models.hpp"

using namespace wfpc;
using oracle::max_abs;

namespace {

// Max |entry| of the ground-excited sector of a system-indexed operator,
// extracted by explicit index loops over the joint basis.
double ge_sector_oracle(const ComplexMatrix& m, std::size_t ground, std::size_t sys, std::size_t env) {
    double out = 0.0;
    for (std::size_t s1 = 0; s1 < sys; ++s1)
        for (std::size_t s2 = 0; s2 < sys; ++s2) {
            if (!(s1 < ground && s2 >= ground)) continue;
            for (std::size_t e1 = 0; e1 < env; ++e1)
                for (std::size_t e2 = 0; e2 < env; ++e2)
                    out = std::max(out, std::abs(m(static_cast<Eigen::Index>(s1 * env + e1),
                                                   static_cast<Eigen::Index>(s2 * env + e2))));
        }
    return out;
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("ladder operators") {
    const ComplexMatrix a = annihilation(4);
    for (Eigen::Index n = 0; n < 4; ++n)
        for (Eigen::Index m = 0; m < 4; ++m)
            CHECK(a(n, m) == Complex(m == n + 1 ? std::sqrt(static_cast<double>(m)) : 0.0));
    CHECK(max_abs(number_operator(4) - a.adjoint() * a) <= 1e-15);
    CHECK(max_abs(position(4) - (a + a.adjoint()) / std::sqrt(2.0)) <= 1e-15);
}

TEST_CASE("uncoupled commuting model is diagonal") {
    const SpaceLayout layout{1, 2, {4}};
    const SystemModel m = build_h0_commuting(1.3, {0.7}, 0.0, layout);
    ComplexMatrix expect = ComplexMatrix::Zero(12, 12);
    for (int n = 0; n < 3; ++n)
        for (int k = 0; k < 4; ++k) expect(n * 4 + k, n * 4 + k) = 1.3 * (n + 0.5) + 0.7 * (k + 0.5);
    CHECK(max_abs(m.h0 - expect) <= 1e-14);
}

TEST_CASE("commuting model matrix elements against ladder algebra") {
    const double g = 0.1;
    const std::size_t ns = 4, ne = 4;
    const SystemModel m = build_h0_commuting(1.0, {0.8}, g, SpaceLayout{1, ns - 1, {ne}});
    for (std::size_t n = 0; n < ns; ++n)
        for (std::size_t k = 0; k + 1 < ne; ++k) {
            // <n,k+1| g n x |n,k> = g n sqrt((k+1)/2)
            const auto i = static_cast<Eigen::Index>(n * ne + k);
            const double expect = g * static_cast<double>(n) * std::sqrt((k + 1.0) / 2.0);
            CHECK(std::abs(m.h0(i + 1, i) - expect) <= 1e-15);
            CHECK(std::abs(m.h0(i, i + 1) - expect) <= 1e-15);
        }
    CHECK(max_norm(commutator(m.h0, m.joint_projector())) <= 1e-12);
    CHECK_NOTHROW(m.check_invariants());
}

TEST_CASE("non-commuting model") {
    const SpaceLayout layout{1, 3, {4}};
    const SystemModel free_nc = build_h0_noncommuting(1.0, {0.8}, 0.0, layout);
    const SystemModel free_c = build_h0_commuting(1.0, {0.8}, 0.0, layout);
    CHECK(max_abs(free_nc.h0 - free_c.h0) == 0.0);

    const SystemModel m = build_h0_noncommuting(1.0, {0.8}, 0.1, layout);
    CHECK(max_norm(commutator(m.h0, m.joint_projector())) > 0.01);

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        const SystemModel r = build_h0_noncommuting(u(rng), {u(rng), u(rng)}, u(rng) * 0.2, SpaceLayout{1, 1, {3, 2}});
        CHECK(hermiticity_defect(r.h0) <= 1e-12);
        CHECK(max_norm(commutator(r.h0, r.joint_projector())) > 1e-6);
    }
}

TEST_CASE("model invariants") {
    const SystemModel m = build_h0_commuting(1.0, {0.8, 1.1}, 0.1, SpaceLayout{1, 2, {3, 2}});
    CHECK(max_abs(m.proj_excited * m.proj_excited - m.proj_excited) <= 1e-12);
    CHECK(hermiticity_defect(m.dipole) == 0.0);
    CHECK(max_abs(system_sector(m.dipole, m.layout, Manifold::Ground, Manifold::Ground)) == 0.0);
    CHECK(max_abs(system_sector(m.dipole, m.layout, Manifold::Excited, Manifold::Excited)) == 0.0);
    CHECK(max_norm(commutator(m.h0, m.joint_projector())) <= 1e-12);
}

TEST_CASE("manifold model with two ground and two excited levels") {
    const SpaceLayout layout{2, 2, {3}};
    const SystemModel m = build_h0_manifold({0.0, 0.1}, {1.0, 1.2}, {0.8}, 0.15, layout);
    CHECK_NOTHROW(m.check_invariants());
    CHECK(max_norm(commutator(m.h0, m.joint_projector())) <= 1e-12);
    CHECK(m.dipole(0, 2) == Complex(1.0));
    CHECK(m.dipole(1, 3) == Complex(1.0));
    CHECK(m.dipole(0, 1) == Complex(0.0));
}

TEST_CASE("builders reject bad layouts") {
    CHECK_THROWS_AS(build_h0_commuting(1.0, {0.8}, 0.1, SpaceLayout{2, 1, {3}}), InvalidArgument);
    CHECK_THROWS_AS(build_h0_commuting(1.0, {0.8, 0.9}, 0.1, SpaceLayout{1, 1, {3}}), InvalidArgument);
    CHECK_THROWS(build_h0_manifold({0.0}, {1.0, 2.0}, {0.8}, 0.1, SpaceLayout{1, 1, {3}}));
}

TEST_CASE("Gibbs states") {
    const SpaceLayout layout{1, 1, {3}};
    const SystemModel c = build_h0_commuting(1.0, {0.8}, 0.2, layout);

    const CorrelatedState hot = gibbs_state(c, 0.0);
    CHECK(max_abs(hot.joint.mat() - identity(6) / 6.0) <= 1e-15);
    CHECK(max_abs(hot.chi) <= 1e-12);

    const CorrelatedState g1 = gibbs_state(c, 1.0);
    const BlockReport br = block_report(g1);
    CHECK(br.norm_ge_rho <= 1e-12);
    CHECK(br.norm_ge_chi <= 1e-12);

    for (double beta : {0.0, 0.5, 1.0, 2.5, 5.0})
        CHECK(max_norm(commutator(c.h0, gibbs_state(c, beta).joint.mat())) <= 1e-10);

    const SystemModel nc = build_h0_noncommuting(1.0, {0.8}, 0.2, layout);
    CHECK(block_report(gibbs_state(nc, 1.0)).norm_ge_chi > 1e-6);

    CHECK_THROWS_AS(gibbs_state(c, -1.0), InvalidArgument);
}

TEST_CASE("split_correlations") {
    std::mt19937_64 rng(22);
    const SpaceLayout layout{1, 1, {3}};
    const ComplexMatrix rho = oracle::random_density(2, rng), tau = oracle::random_density(3, rng);
    const CorrelatedState prod = product_state(rho, tau, layout);
    CHECK(max_abs(prod.chi) <= 1e-15);
    const BlockReport pr = block_report(prod);
    CHECK(pr.norm_ge_chi <= 1e-12);
    CHECK(pr.norm_gg_chi <= 1e-12);
    CHECK(pr.norm_ee_chi <= 1e-12);

    ComplexMatrix classical = ComplexMatrix::Zero(4, 4);
    classical(0, 0) = classical(3, 3) = 0.5;
    const CorrelatedState cc = make_state(classical, SpaceLayout{1, 1, {2}});
    CHECK(max_abs(cc.rho - identity(2) / 2.0) <= 1e-15);
    CHECK(max_abs(cc.tau - identity(2) / 2.0) <= 1e-15);
    CHECK(max_abs(cc.chi) > 0.2);

    for (int trial = 0; trial < 5; ++trial) {
        const CorrelatedState r = make_state(oracle::random_density(6, rng), layout);
        CHECK(max_abs(kron(r.rho, r.tau) + r.chi - r.joint.mat()) <= 1e-13);
        CHECK(max_abs(partial_trace(r.chi, layout, Subsystem::System)) <= 1e-12);
        CHECK(max_abs(partial_trace(r.chi, layout, Subsystem::Environment)) <= 1e-12);
    }
}

TEST_CASE("diagonal product states have no coherent sectors") {
    const CorrelatedState s = diagonal_product_state({2.0, 1.0}, {1.0, 1.0, 2.0}, SpaceLayout{1, 1, {3}});
    CHECK(s.joint.mat().trace().real() == doctest::Approx(1.0));
    const BlockReport br = block_report(s);
    CHECK(br.norm_ge_rho <= 1e-12);
    CHECK(br.norm_ge_chi <= 1e-12);
    CHECK(br.norm_gg_chi <= 1e-12);
    CHECK(br.norm_ee_chi <= 1e-12);
}

TEST_CASE("witness states realise every placement") {
    for (const SpaceLayout& layout : {SpaceLayout{1, 1, {3}}, SpaceLayout{2, 2, {2}}, SpaceLayout{1, 2, {2, 2}}}) {
        for (int code = 0; code < 4; ++code) {
            const WitnessPlacement pl{(code & 2) != 0, (code & 1) != 0};
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                const CorrelatedState s = build_witness_state(layout, pl, seed);
                const BlockReport br = block_report(s);
                CAPTURE(code);
                CAPTURE(seed);
                CHECK((br.norm_ge_rho > 1e-3) == pl.offdiag_in_rho);
                CHECK((br.norm_ge_chi > 1e-3) == pl.offdiag_in_chi);
                if (!pl.offdiag_in_rho) CHECK(br.norm_ge_rho <= 1e-12);
                if (!pl.offdiag_in_chi) CHECK(br.norm_ge_chi <= 1e-12);
                CHECK(min_eigenvalue(s.joint.mat()) >= -1e-10);
                CHECK(max_abs(kron(s.rho, s.tau) + s.chi - s.joint.mat()) <= 1e-13);

                const std::size_t env = layout.env_dim();
                CHECK(ge_sector_oracle(s.chi, layout.ground_dim, layout.system_dim(), env) ==
                      doctest::Approx(br.norm_ge_chi).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("witness states are reproducible from the seed") {
    const SpaceLayout layout{1, 1, {3}};
    const CorrelatedState a = build_witness_state(layout, {true, true}, 9);
    const CorrelatedState b = build_witness_state(layout, {true, true}, 9);
    const CorrelatedState c = build_witness_state(layout, {true, true}, 10);
    CHECK(max_abs(a.joint.mat() - b.joint.mat()) == 0.0);
    CHECK(max_abs(a.joint.mat() - c.joint.mat()) > 0.0);
}

} // TEST_SUITE
