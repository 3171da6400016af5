// SPDX-License-Identifier: Apache-2.0

///
/// \file matrix_kernel.hpp
///
/// Dense complex linear algebra used throughout the library: thin SVD,
/// minimum-norm least squares, orthonormal complements, eigenvalues and the
/// smallest singular value. Factorizations are delegated to Eigen; the
/// complement construction and the eigenvalue isolation pass are local.
///
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cfsa/errors.hpp"

namespace cfsa {

using Complex       = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector    = Eigen::VectorXd;

/// Thin singular value decomposition X = U diag(s) V^*.
///
/// `u` is rows x r, `v` is cols x r with r = min(rows, cols); both have
/// orthonormal columns and `singular_values` is nonincreasing.
struct SvdResult {
    ComplexMatrix u;
    RealVector    singular_values;
    ComplexMatrix v;

    [[nodiscard]] Eigen::Index rank() const { return singular_values.size(); }
    [[nodiscard]] ComplexMatrix reconstruct() const
    {
        return u * singular_values.cast<Complex>().asDiagonal() * v.adjoint();
    }
};

namespace detail {

inline void require_finite(const ComplexMatrix& a, const char* what)
{
    if (a.size() == 0) {
        throw DimensionError(std::string(what) + ": empty matrix");
    }
    if (!a.allFinite()) {
        throw Error(std::string(what) + ": matrix has non-finite entries");
    }
}

} // namespace detail

/// Largest absolute entry.
inline double max_abs(const ComplexMatrix& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Thin SVD via one-sided Jacobi with a column-pivoting QR preconditioner.
///
/// Jacobi sweeps converge unconditionally for finite input; a non-finite or
/// non-successful result is reported as IterationFailure.
inline SvdResult svd(const ComplexMatrix& x)
{
    detail::require_finite(x, "svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success || !solver.singularValues().allFinite()) {
        throw IterationFailure("svd: Jacobi iteration failed to converge");
    }
    return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

/// Spectral norm (largest singular value).
inline double spectral_norm(const ComplexMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<ComplexMatrix> solver(a);
    return solver.singularValues()(0);
}

/// Default relative cutoff below which singular values are treated as zero.
inline constexpr double kPinvCutoff = 1e-12;

/// Minimum-norm least-squares solution of a X = b, column by column.
///
/// Computed through the pseudoinverse; singular values below
/// `relative_cutoff * s_1` are dropped.
inline ComplexMatrix least_squares(const ComplexMatrix& a, const ComplexMatrix& b,
                                   double relative_cutoff = kPinvCutoff)
{
    if (a.rows() != b.rows()) {
        throw DimensionError("least_squares: row count of a and b differ");
    }
    detail::require_finite(b, "least_squares");
    const SvdResult f = svd(a);

    ComplexMatrix x = ComplexMatrix::Zero(a.cols(), b.cols());
    if (f.rank() == 0 || f.singular_values(0) == 0.0) {
        return x;
    }
    const double cutoff = relative_cutoff * f.singular_values(0);
    const ComplexMatrix utb = f.u.adjoint() * b;
    for (Eigen::Index j = 0; j < f.rank(); ++j) {
        const double s = f.singular_values(j);
        if (s <= cutoff) {
            break;
        }
        x.noalias() += f.v.col(j) * (utb.row(j) / s);
    }
    return x;
}

/// Orthonormal W (n x r) with W^* W = I and W^* U = 0.
///
/// Candidates are the standard basis vectors projected off range(U). Each
/// step picks the candidate with the largest residual norm, orthogonalizes it
/// a second time against U and the columns already chosen, then deflates it
/// out of the remaining candidates.
inline ComplexMatrix orthonormal_complement(const ComplexMatrix& u)
{
    const Eigen::Index n = u.rows();
    const Eigen::Index r = u.cols();
    detail::require_finite(u, "orthonormal_complement");
    if (2 * r > n) {
        throw DimensionError("orthonormal_complement: need 2r <= n, got r=" + std::to_string(r) +
                             ", n=" + std::to_string(n));
    }
    const double gram_err = max_abs(u.adjoint() * u - ComplexMatrix::Identity(r, r));
    if (gram_err > 1e-10) {
        throw DimensionError("orthonormal_complement: input columns are not orthonormal");
    }

    ComplexMatrix candidates = ComplexMatrix::Identity(n, n) - u * u.adjoint();
    ComplexMatrix w(n, r);
    RealVector norms = candidates.colwise().norm().transpose();

    // A column of I - UU^* has norm <= 1; anything this small has lost its
    // component outside range(U) to rounding.
    constexpr double kMinResidual = 1e-8;

    for (Eigen::Index j = 0; j < r; ++j) {
        Eigen::Index pivot = 0;
        const double best = norms.maxCoeff(&pivot);
        if (!(best > kMinResidual)) {
            throw RankError("orthonormal_complement: only " + std::to_string(j) +
                            " independent complement directions found");
        }
        ComplexVector q = candidates.col(pivot) / best;
        for (int pass = 0; pass < 2; ++pass) {
            q -= u * (u.adjoint() * q);
            if (j > 0) {
                q -= w.leftCols(j) * (w.leftCols(j).adjoint() * q);
            }
            q.normalize();
        }
        w.col(j) = q;

        candidates -= q * (q.adjoint() * candidates);
        norms = candidates.colwise().norm().transpose();
        norms(pivot) = 0.0;
    }
    return w;
}

/// Options for the eigenvalue solver.
struct EigenOptions {
    /// Off-diagonal entries with modulus below `negligible * ||A||_F` are
    /// treated as zero when isolating eigenvalues by permutation.
    double negligible = 1e-12;
};

/// Eigenvalues with multiplicity.
///
/// Rows and columns whose off-diagonal part (within the still active index
/// set) is negligible are peeled off first; their diagonal entry is an exact
/// eigenvalue of the remaining pencil. This keeps nilpotent chains such as the
/// transient part of a cyclic shift from being smeared into a ring of radius
/// eps^(1/k) by the QR iteration. The remaining block goes to a shifted QR
/// (complex Schur) solver whose budget is 30 iterations per row.
inline std::vector<Complex> eigenvalues(const ComplexMatrix& a, const EigenOptions& opts = {})
{
    detail::require_finite(a, "eigenvalues");
    if (a.rows() != a.cols()) {
        throw DimensionError("eigenvalues: matrix must be square");
    }
    const Eigen::Index n = a.rows();
    const double tol = opts.negligible * a.norm();

    std::vector<Eigen::Index> active(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        active[static_cast<std::size_t>(i)] = i;
    }
    std::vector<Complex> values;
    values.reserve(static_cast<std::size_t>(n));

    auto isolated = [&](Eigen::Index i, bool by_row) {
        for (Eigen::Index j : active) {
            if (j != i && std::abs(by_row ? a(i, j) : a(j, i)) > tol) {
                return false;
            }
        }
        return true;
    };

    bool changed = true;
    while (changed && !active.empty()) {
        changed = false;
        for (auto it = active.begin(); it != active.end(); ++it) {
            if (isolated(*it, true) || isolated(*it, false)) {
                values.push_back(a(*it, *it));
                active.erase(it);
                changed = true;
                break;
            }
        }
    }

    if (!active.empty()) {
        const auto m = static_cast<Eigen::Index>(active.size());
        ComplexMatrix block(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                block(i, j) = a(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
            }
        }
        Eigen::ComplexEigenSolver<ComplexMatrix> solver(block, /*computeEigenvectors=*/false);
        if (solver.info() != Eigen::Success) {
            throw IterationFailure("eigenvalues: shifted QR did not converge");
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            values.push_back(solver.eigenvalues()(i));
        }
    }
    return values;
}

/// min over unit v of ||A v||_2.
inline double smallest_singular_value(const ComplexMatrix& a)
{
    detail::require_finite(a, "smallest_singular_value");
    if (a.rows() < a.cols()) {
        return 0.0; // nontrivial kernel
    }
    Eigen::JacobiSVD<ComplexMatrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw IterationFailure("smallest_singular_value: Jacobi iteration failed");
    }
    return solver.singularValues()(solver.singularValues().size() - 1);
}

} // namespace cfsa
