#include "wfpc/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wfpc {

DensityError::DensityError(Kind kind, double magnitude)
    : Error(std::string("invalid density matrix: ") + to_string(kind) + " (violation " +
            std::to_string(magnitude) + ")"),
      kind_(kind), magnitude_(magnitude) {}

const char* to_string(DensityError::Kind kind) {
    switch (kind) {
    case DensityError::Kind::NonHermitian: return "NonHermitian";
    case DensityError::Kind::TraceNotOne: return "TraceNotOne";
    case DensityError::Kind::NotPSD: return "NotPSD";
    }
    return "unknown";
}

const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

std::size_t SpaceLayout::env_dim() const {
    return std::accumulate(env_dims.begin(), env_dims.end(), std::size_t{1},
                           std::multiplies<>());
}

void SpaceLayout::validate(std::size_t dim_cap) const {
    if (ground_dim == 0 || excited_dim == 0)
        throw InvalidArgument("layout: ground and excited manifolds need at least one level");
    if (std::any_of(env_dims.begin(), env_dims.end(), [](std::size_t d) { return d == 0; }))
        throw InvalidArgument("layout: environment mode dimensions must be positive");
    // Guard the product against overflow before comparing with the cap.
    std::size_t d = system_dim();
    for (auto e : env_dims) {
        if (d > dim_cap / e)
            throw MemoryCapExceeded("layout: joint dimension exceeds cap " + std::to_string(dim_cap));
        d *= e;
    }
    if (d > dim_cap)
        throw MemoryCapExceeded("layout: joint dimension exceeds cap " + std::to_string(dim_cap));
}

ComplexMatrix identity(std::size_t n) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t dim_cap) {
    const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
    const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
    if (rows > dim_cap || cols > dim_cap)
        throw MemoryCapExceeded("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                                " exceeds cap " + std::to_string(dim_cap));
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const bool> keep) {
    if (dims.size() != keep.size())
        throw DimensionMismatch("partial_trace: dims and keep mask differ in length");
    const std::size_t total =
        std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != total)
        throw DimensionMismatch("partial_trace: matrix is not square with the product dimension");

    const std::size_t n = dims.size();
    std::vector<std::size_t> stride(n, 1);
    for (std::size_t k = n; k-- > 1;) stride[k - 1] = stride[k] * dims[k];

    std::vector<std::size_t> kept, traced;
    for (std::size_t k = 0; k < n; ++k) (keep[k] ? kept : traced).push_back(k);

    // Enumerate a mixed-radix counter over a subset of factors, yielding the
    // flat offset of each configuration.
    auto offsets = [&](const std::vector<std::size_t>& factors) {
        std::vector<std::size_t> out{0};
        for (auto k : factors) {
            std::vector<std::size_t> next;
            next.reserve(out.size() * dims[k]);
            for (auto base : out)
                for (std::size_t v = 0; v < dims[k]; ++v) next.push_back(base + v * stride[k]);
            out = std::move(next);
        }
        return out;
    };
    const auto kept_off = offsets(kept);
    const auto traced_off = offsets(traced);

    const auto dk = static_cast<Eigen::Index>(kept_off.size());
    ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
    for (Eigen::Index r = 0; r < dk; ++r)
        for (Eigen::Index c = 0; c < dk; ++c) {
            Complex acc{0.0, 0.0};
            for (auto t : traced_off)
                acc += m(static_cast<Eigen::Index>(kept_off[r] + t),
                         static_cast<Eigen::Index>(kept_off[c] + t));
            out(r, c) = acc;
        }
    return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout, Subsystem keep) {
    const std::size_t dims[2] = {layout.system_dim(), layout.env_dim()};
    const bool mask[2] = {keep == Subsystem::System, keep == Subsystem::Environment};
    return partial_trace(m, dims, mask);
}

double max_norm(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return max_norm(m - m.adjoint());
}

double unitarity_defect(const ComplexMatrix& u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return max_norm(u.adjoint() * u - identity(static_cast<std::size_t>(u.rows())));
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
    const ComplexMatrix sym = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    const ComplexMatrix d = a - b;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

ComplexMatrix herm_exp(const ComplexMatrix& h, Complex scale, double hermitian_tol) {
    if (h.rows() != h.cols()) throw DimensionMismatch("herm_exp: generator is not square");
    const double defect = hermiticity_defect(h);
    if (defect > hermitian_tol * std::max(1.0, max_norm(h)))
        throw NonHermitian("herm_exp: generator is not Hermitian", defect);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const ComplexVector phases =
        (scale * es.eigenvalues().cast<Complex>().array()).exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw DimensionMismatch("commutator: operands must be square with equal dimension");
    return a * b - b * a;
}

DensityMatrix validate_density(ComplexMatrix m, const SpaceLayout& layout, const Tolerances& tol) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    if (m.rows() != d || m.cols() != d)
        throw DimensionMismatch("validate_density: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", layout needs " + std::to_string(d));
    const double herm = hermiticity_defect(m);
    if (herm > tol.hermitian) throw DensityError(DensityError::Kind::NonHermitian, herm);
    const double tr_dev = std::abs(m.trace() - Complex{1.0, 0.0});
    if (tr_dev > tol.trace) throw DensityError(DensityError::Kind::TraceNotOne, tr_dev);
    const double lo = min_eigenvalue(m);
    if (lo < tol.psd_floor) throw DensityError(DensityError::Kind::NotPSD, -lo);
    return DensityMatrix(std::move(m), layout);
}

ComplexMatrix embed_system(const ComplexMatrix& op, const SpaceLayout& layout) {
    if (static_cast<std::size_t>(op.rows()) != layout.system_dim() || op.rows() != op.cols())
        throw DimensionMismatch("embed_system: operator does not match system dimension");
    return kron(op, identity(layout.env_dim()));
}

} // namespace wfpc
