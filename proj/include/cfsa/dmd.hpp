// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>

#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"
#include "cfsa/snapshot.hpp"

namespace cfsa {

/// Companion matrix S with W0 S ~= W1, W0 = [x_1 .. x_{N-1}], W1 = [x_2 .. x_N].
///
/// Columns 1..N-2 are the exact shifts e_2..e_{N-1}; only the last column is
/// estimated, as the least-squares coefficients of x_N on W0.
inline ComplexMatrix companion_from_snapshots(const SnapshotMatrix& x,
                                              double relative_cutoff = kPinvCutoff)
{
    const Eigen::Index count = x.count();
    if (count < 3) {
        throw DimensionError("companion_from_snapshots: need at least three snapshots");
    }
    const Eigen::Index m = count - 1;
    const ComplexMatrix w0 = x.data().leftCols(m);
    const ComplexMatrix c = least_squares(w0, x.data().col(m), relative_cutoff);

    ComplexMatrix s = ComplexMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        s(j + 1, j) = 1.0;
    }
    s.col(m - 1) = c;
    return s;
}

/// ||W0 S - W1||_2 / max(1, ||W1||_2)
inline double connecting_matrix_residual(const SnapshotMatrix& x, const ComplexMatrix& s)
{
    const Eigen::Index m = x.count() - 1;
    if (m < 1 || s.rows() != m || s.cols() != m) {
        throw DimensionError("connecting_matrix_residual: S must be (N-1)x(N-1)");
    }
    const ComplexMatrix w0 = x.data().leftCols(m);
    const ComplexMatrix w1 = x.data().rightCols(m);
    return spectral_norm(w0 * s - w1) / std::max(1.0, spectral_norm(w1));
}

} // namespace cfsa
