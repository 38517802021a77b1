#include "wfpc/qrf.hpp"

#include <cmath>

#include "wfpc/parallel.hpp"

namespace wfpc {

namespace {

void check_times(double t1, double t2) {
    if (!(t1 >= 0.0) || !(t2 >= t1)) throw InvalidArgument("two-time correlator needs 0 <= t1 <= t2");
}

void check_operator(const ComplexMatrix& op, const SpaceLayout& layout) {
    if (static_cast<std::size_t>(op.rows()) != layout.system_dim() || op.rows() != op.cols())
        throw DimensionMismatch("two-time correlator: operator does not match system dimension");
}

} // namespace

CorrelatedState free_evolve(const SystemModel& model, const CorrelatedState& r0, double t) {
    const ComplexMatrix u = herm_exp(model.h0, Complex{0.0, -t});
    ComplexMatrix r = u * r0.joint.mat() * u.adjoint();
    Tolerances tol;
    tol.psd_floor = -1e-9;
    return split_correlations(validate_density(0.5 * (r + r.adjoint()), model.layout, tol));
}

Complex exact_two_time(const SystemModel& model, const CorrelatedState& r0, const ComplexMatrix& a,
                       const ComplexMatrix& b, double t1, double t2) {
    check_times(t1, t2);
    check_operator(a, model.layout);
    check_operator(b, model.layout);
    const ComplexMatrix u1 = herm_exp(model.h0, Complex{0.0, -t1});
    const ComplexMatrix u2 = herm_exp(model.h0, Complex{0.0, -t2});
    const ComplexMatrix a_t = u1.adjoint() * embed_system(a, model.layout) * u1;
    const ComplexMatrix b_t = u2.adjoint() * embed_system(b, model.layout) * u2;
    return (b_t * a_t * r0.joint.mat()).trace();
}

Complex regression_two_time(const SystemModel& model, const CorrelatedState& r0,
                            const ComplexMatrix& a, const ComplexMatrix& b, double t1, double t2) {
    check_times(t1, t2);
    check_operator(a, model.layout);
    check_operator(b, model.layout);
    const CorrelatedState at_t1 = free_evolve(model, r0, t1);
    const ComplexMatrix factorized = kron(at_t1.rho, at_t1.tau);
    const ComplexMatrix u = herm_exp(model.h0, Complex{0.0, -(t2 - t1)});
    const ComplexMatrix z = partial_trace(u * embed_system(a, model.layout) * factorized * u.adjoint(),
                                          model.layout, Subsystem::System);
    return (b * z).trace();
}

ComplexMatrix induced_map_matrix(const SystemModel& model, const ComplexMatrix& tau, double delta) {
    const auto& layout = model.layout;
    const auto ds = static_cast<Eigen::Index>(layout.system_dim());
    const ComplexMatrix u = herm_exp(model.h0, Complex{0.0, -delta});
    ComplexMatrix map = ComplexMatrix::Zero(ds * ds, ds * ds);
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index i = 0; i < ds; ++i) {
            ComplexMatrix unit = ComplexMatrix::Zero(ds, ds);
            unit(i, j) = 1.0;
            const ComplexMatrix out =
                partial_trace(u * kron(unit, tau) * u.adjoint(), layout, Subsystem::System);
            map.col(j * ds + i) = out.reshaped();
        }
    return map;
}

ComplexMatrix apply_map(const ComplexMatrix& map, const ComplexMatrix& x) {
    const ComplexVector v = map * x.reshaped();
    return v.reshaped(x.rows(), x.cols());
}

std::vector<QrfReport> qrf_scan(const SystemModel& model, const CorrelatedState& r0,
                                const ComplexMatrix& a, const ComplexMatrix& b,
                                const std::vector<double>& t1_grid, const std::vector<double>& delta_grid,
                                double threshold, std::size_t workers) {
    if (t1_grid.empty() || delta_grid.empty()) throw InvalidArgument("qrf_scan: empty grid");
    const std::size_t n = t1_grid.size() * delta_grid.size();
    return parallel_map(n, workers, [&](std::size_t idx) {
        QrfReport rep;
        rep.t1 = t1_grid[idx / delta_grid.size()];
        rep.t2 = rep.t1 + delta_grid[idx % delta_grid.size()];
        rep.exact_value = exact_two_time(model, r0, a, b, rep.t1, rep.t2);
        rep.regression_value = regression_two_time(model, r0, a, b, rep.t1, rep.t2);
        rep.deviation = std::abs(rep.exact_value - rep.regression_value);
        const CorrelatedState at_t1 = free_evolve(model, r0, rep.t1);
        rep.chi_norm = max_norm(at_t1.chi);
        rep.chi_ge_norm = block_report(at_t1).norm_ge_chi;
        rep.violated = rep.deviation > threshold;
        return rep;
    });
}

WitnessVerdict intermediate_wfpc_witness(const SystemModel& model, const CorrelatedState& r0,
                                         double t1, const std::vector<SpectralPulse>& family,
                                         const TimeGrid& grid, const WitnessThresholds& thresholds,
                                         const DetectOptions& options) {
    if (!(t1 >= 0.0)) throw InvalidArgument("intermediate_wfpc_witness: t1 must be non-negative");
    return run_witness_protocol(model, free_evolve(model, r0, t1), family, grid, thresholds, options);
}

} // namespace wfpc
