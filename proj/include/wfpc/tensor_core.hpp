#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wfpc/errors.hpp"

namespace wfpc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Numerical thresholds used for validation. Defaults are far above double
// rounding noise for joint dimensions up to a few hundred.
struct Tolerances {
    double hermitian = 1e-10;
    double trace = 1e-10;
    double psd_floor = -1e-10;
    double unitary = 1e-10;
};

const Tolerances& default_tolerances();

// Hilbert-space layout S ⊗ E1 ⊗ E2 ⊗ ... The system factor is split into a
// ground manifold (first `ground_dim` basis states) followed by an excited
// manifold (next `excited_dim` basis states).
struct SpaceLayout {
    std::size_t ground_dim = 1;
    std::size_t excited_dim = 1;
    std::vector<std::size_t> env_dims;

    static constexpr std::size_t kDefaultDimCap = 4096;

    std::size_t system_dim() const { return ground_dim + excited_dim; }
    std::size_t env_dim() const;
    std::size_t total_dim() const { return system_dim() * env_dim(); }

    // Throws InvalidArgument / MemoryCapExceeded.
    void validate(std::size_t dim_cap = kDefaultDimCap) const;

    bool operator==(const SpaceLayout&) const = default;
};

enum class Subsystem { System, Environment };

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t dim_cap = SpaceLayout::kDefaultDimCap);

// General partial trace over a tensor product with factor dimensions `dims`.
// keep[k] == true retains factor k; retained factors keep their order.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const bool> keep);

// Bipartite S|E partial trace. `keep` names the factor that survives.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SpaceLayout& layout, Subsystem keep);

// exp(scale * h) for Hermitian h via eigendecomposition.
ComplexMatrix herm_exp(const ComplexMatrix& h, Complex scale,
                       double hermitian_tol = default_tolerances().hermitian);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

double max_norm(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);
double unitarity_defect(const ComplexMatrix& u);
double min_eigenvalue(const ComplexMatrix& hermitian);
// Half the trace norm of (a - b); both arguments Hermitian.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix identity(std::size_t n);

// A validated quantum state. The only way to obtain one is validate_density,
// so holding a DensityMatrix means the invariants were checked.
class DensityMatrix {
public:
    const ComplexMatrix& mat() const noexcept { return mat_; }
    const SpaceLayout& layout() const noexcept { return layout_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(mat_.rows()); }

private:
    DensityMatrix(ComplexMatrix mat, SpaceLayout layout)
        : mat_(std::move(mat)), layout_(std::move(layout)) {}

    friend DensityMatrix validate_density(ComplexMatrix m, const SpaceLayout& layout,
                                          const Tolerances& tol);

    ComplexMatrix mat_;
    SpaceLayout layout_;
};

// Throws DimensionMismatch when the matrix does not match the layout and
// DensityError naming the first violated invariant otherwise.
DensityMatrix validate_density(ComplexMatrix m, const SpaceLayout& layout,
                               const Tolerances& tol = default_tolerances());

// Embeds a system operator as op ⊗ 1_E.
ComplexMatrix embed_system(const ComplexMatrix& op, const SpaceLayout& layout);

} // namespace wfpc
