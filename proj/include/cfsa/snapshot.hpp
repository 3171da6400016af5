// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <utility>

#include "cfsa/matrix_kernel.hpp"

namespace cfsa {

/// Column-ordered state history X = [x_1 ... x_N]; column j (0-based) holds
/// x_{j+1}. Operations that need a minimum count or nonzero columns check it
/// themselves, so a single-column or empty history is representable.
class SnapshotMatrix {
public:
    SnapshotMatrix() = default;
    explicit SnapshotMatrix(ComplexMatrix data) : data_(std::move(data)) {}

    [[nodiscard]] Eigen::Index state_dim() const { return data_.rows(); }
    [[nodiscard]] Eigen::Index count() const { return data_.cols(); }
    [[nodiscard]] const ComplexMatrix& data() const { return data_; }

    /// x_{index+1}
    [[nodiscard]] ComplexVector column(Eigen::Index index) const { return data_.col(index); }

    /// First `count` columns.
    [[nodiscard]] SnapshotMatrix leading(Eigen::Index count) const
    {
        return SnapshotMatrix(data_.leftCols(count));
    }

    /// Every `stride`-th column starting at the first.
    [[nodiscard]] SnapshotMatrix strided(Eigen::Index stride) const
    {
        const Eigen::Index kept = stride <= 1 ? count() : (count() + stride - 1) / stride;
        ComplexMatrix out(state_dim(), kept);
        for (Eigen::Index j = 0; j < kept; ++j) {
            out.col(j) = data_.col(j * std::max<Eigen::Index>(stride, 1));
        }
        return SnapshotMatrix(std::move(out));
    }

    /// max_t ||x_t||_2, zero for an empty history.
    [[nodiscard]] double max_column_norm() const
    {
        return count() == 0 ? 0.0 : data_.colwise().norm().maxCoeff();
    }

    friend bool operator==(const SnapshotMatrix& a, const SnapshotMatrix& b)
    {
        return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
               a.data_ == b.data_;
    }

private:
    ComplexMatrix data_;
};

} // namespace cfsa
