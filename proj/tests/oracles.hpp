#pragma once

// Reference implementations used only by the tests. They deliberately avoid
// the library's code paths: plain index loops, power series, closed forms.

#include <cmath>
#include <random>

#include "wfpc/tensor_core.hpp"

namespace oracle {

using wfpc::Complex;
using wfpc::ComplexMatrix;

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const auto ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    ComplexMatrix out(ra * rb, ca * cb);
    for (Eigen::Index i1 = 0; i1 < ra; ++i1)
        for (Eigen::Index j1 = 0; j1 < ca; ++j1)
            for (Eigen::Index i2 = 0; i2 < rb; ++i2)
                for (Eigen::Index j2 = 0; j2 < cb; ++j2)
                    out(i1 * rb + i2, j1 * cb + j2) = a(i1, j1) * b(i2, j2);
    return out;
}

// Bipartite partial trace by explicit index summation.
inline ComplexMatrix trace_out_second(const ComplexMatrix& m, Eigen::Index da, Eigen::Index db) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            for (Eigen::Index k = 0; k < db; ++k) out(i, j) += m(i * db + k, j * db + k);
    return out;
}

inline ComplexMatrix trace_out_first(const ComplexMatrix& m, Eigen::Index da, Eigen::Index db) {
    ComplexMatrix out = ComplexMatrix::Zero(db, db);
    for (Eigen::Index i = 0; i < db; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
            for (Eigen::Index k = 0; k < da; ++k) out(i, j) += m(k * db + i, k * db + j);
    return out;
}

// exp(A) by scaling and squaring with a truncated Taylor series.
inline ComplexMatrix expm_taylor(const ComplexMatrix& a) {
    double norm = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) norm = std::max(norm, a.row(i).cwiseAbs().sum());
    int squarings = 0;
    while (norm > 0.25) {
        norm *= 0.5;
        ++squarings;
    }
    const ComplexMatrix x = a / std::pow(2.0, squarings);
    const auto n = a.rows();
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    ComplexMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

inline ComplexMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex{d(rng), d(rng)};
    return m;
}

inline ComplexMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
    const ComplexMatrix m = random_matrix(n, rng);
    return 0.5 * (m + m.adjoint());
}

// Unit-trace positive matrix G G† / tr.
inline ComplexMatrix random_density(Eigen::Index n, std::mt19937_64& rng) {
    const ComplexMatrix g = random_matrix(n, rng);
    ComplexMatrix r = g * g.adjoint();
    return r / r.trace().real();
}

inline ComplexMatrix sigma_x() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}
inline ComplexMatrix sigma_y() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = Complex{0.0, -1.0};
    m(1, 0) = Complex{0.0, 1.0};
    return m;
}
inline ComplexMatrix sigma_z() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

inline double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace oracle
