// SPDX-License-Identifier: Apache-2.0

///
/// \file engine.hpp
///
/// Cyclic finite-state approximation of a sampled orbit.
///
/// From snapshots x_1 ... x_{m+1} the fit builds an isometry Z (n x m) whose
/// first columns reproduce the scaled data, together with the projections
/// K = U U^* and L = z_1 z_1^* and the gain alpha, such that
///
///     alpha * K * Z * C_{k,m}^t * Z^* * L * x_1 = x_{1+tau(t)}
///
/// on eventually periodic data. The GCS index k is read off as the earlier
/// snapshot nearest to x_{m+1}.
///
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "cfsa/errors.hpp"
#include "cfsa/gcs.hpp"
#include "cfsa/matrix_kernel.hpp"
#include "cfsa/snapshot.hpp"

namespace cfsa {

/// Index k (1-based) of the earliest snapshot x_j, j < N, closest to x_N.
inline int classify_gcs_index(const SnapshotMatrix& x)
{
    if (x.count() < 2) {
        throw DimensionError("classify_gcs_index: need at least two snapshots");
    }
    const Eigen::Index last = x.count() - 1;
    const ComplexMatrix& d = x.data();
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < last; ++j) {
        const double dist = (d.col(j) - d.col(last)).norm();
        if (dist < best_dist) {
            best_dist = dist;
            best = j;
        }
    }
    return static_cast<int>(best) + 1;
}

/// Rank-one control law F_t = alpha K Z C^tau(t) Z^* L, kept as left * right^*.
struct ControlLaw {
    ComplexVector left;
    ComplexVector right;

    [[nodiscard]] ComplexVector apply(const ComplexVector& x) const { return left * right.dot(x); }
    [[nodiscard]] ComplexMatrix dense() const { return left * right.adjoint(); }
};

/// Fitted approximation. Immutable once constructed.
class CfsaModel {
public:
    /// Rebuilds a model from stored factors (used by deserialization).
    CfsaModel(int k, double alpha, double s1, ComplexMatrix u, ComplexMatrix z_hat)
        : gcs_(k, static_cast<int>(z_hat.cols())),
          alpha_(alpha),
          s1_(s1),
          u_(std::move(u)),
          z_hat_(std::move(z_hat))
    {
        if (u_.rows() != z_hat_.rows() || u_.cols() != z_hat_.cols()) {
            throw DimensionError("CfsaModel: U and Z must have the same shape");
        }
        if (!(alpha_ > 0.0) || !(s1_ > 0.0) || !std::isfinite(alpha_) || !std::isfinite(s1_)) {
            throw DegenerateDataError("CfsaModel: alpha and s1 must be positive and finite");
        }
    }

    [[nodiscard]] int k() const { return gcs_.k(); }
    [[nodiscard]] int m() const { return gcs_.n(); }
    [[nodiscard]] Eigen::Index n() const { return u_.rows(); }
    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] double s1() const { return s1_; }
    [[nodiscard]] const GcsSpec& gcs() const { return gcs_; }
    [[nodiscard]] const ComplexMatrix& u() const { return u_; }
    [[nodiscard]] const ComplexMatrix& z_hat() const { return z_hat_; }

    /// K = U U^*
    [[nodiscard]] ComplexMatrix k_projection() const { return u_ * u_.adjoint(); }
    /// L = z_1 z_1^*
    [[nodiscard]] ComplexMatrix l_projection() const
    {
        return z_hat_.col(0) * z_hat_.col(0).adjoint();
    }
    /// T = Z C_{k,m} Z^*
    [[nodiscard]] ComplexMatrix transition() const
    {
        return z_hat_ * materialize(gcs_) * z_hat_.adjoint();
    }
    /// The training state x_1, recovered as s1 K z_1.
    [[nodiscard]] ComplexVector initial_state() const
    {
        return s1_ * (u_ * (u_.adjoint() * z_hat_.col(0)));
    }

private:
    GcsSpec       gcs_;
    double        alpha_;
    double        s1_;
    ComplexMatrix u_;
    ComplexMatrix z_hat_;
};

struct FitOptions {
    /// Require 2N <= n for N snapshots. When false only 2(N-1) <= n, which the
    /// complement construction needs, is enforced.
    bool enforce_index_bound = true;
};

/// Fits a CFSA to the N = m+1 columns of `x`: the first m columns are
/// factored, the last one selects the GCS index.
inline CfsaModel fit(const SnapshotMatrix& x, const FitOptions& opts = {})
{
    const Eigen::Index n = x.state_dim();
    const Eigen::Index count = x.count();
    if (count < 2) {
        throw DimensionError("fit: need at least two snapshots");
    }
    const Eigen::Index m = count - 1;
    if (opts.enforce_index_bound && 2 * count > n) {
        throw DimensionError("fit: need 2N <= n, got N=" + std::to_string(count) +
                             ", n=" + std::to_string(n));
    }
    if (2 * m > n) {
        throw DimensionError("fit: need 2(N-1) <= n, got N=" + std::to_string(count) +
                             ", n=" + std::to_string(n));
    }

    const ComplexMatrix data = x.data().leftCols(m);
    const SvdResult f = svd(data);
    const double s1 = f.singular_values(0);
    if (!(s1 > 0.0)) {
        throw DegenerateDataError("fit: all snapshots are zero");
    }
    for (Eigen::Index j = 0; j < count; ++j) {
        if (x.data().col(j).squaredNorm() == 0.0) {
            throw DegenerateDataError("fit: snapshot " + std::to_string(j + 1) + " is zero");
        }
    }

    const int k = classify_gcs_index(x);
    const ComplexMatrix w = orthonormal_complement(f.u);

    RealVector ratio = f.singular_values / s1;
    RealVector t_diag(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        t_diag(j) = std::sqrt(std::max(0.0, 1.0 - ratio(j) * ratio(j)));
    }
    const ComplexMatrix x_hat = f.u * ratio.cast<Complex>().asDiagonal() * f.v.adjoint();
    const ComplexMatrix y_hat = w * t_diag.cast<Complex>().asDiagonal() * f.v.adjoint();

    const double x1_norm2 = x.data().col(0).squaredNorm();
    return CfsaModel(k, s1 * s1 / x1_norm2, s1, f.u, x_hat + y_hat);
}

/// F_t for t >= 1.
inline ControlLaw control_law(const CfsaModel& model, std::int64_t t)
{
    const ComplexMatrix& z = model.z_hat();
    const ComplexVector z1 = z.col(0);
    const ComplexVector reduced = apply_power(model.gcs(), t, ComplexVector(z.adjoint() * z1));
    const ComplexVector lifted = z * reduced;
    return ControlLaw{model.alpha() * (model.u() * (model.u().adjoint() * lifted)), z1};
}

/// alpha K Z C^tau(t) Z^* L x1; equals F_t x1 and costs O(n m) for any t.
inline ComplexVector forecast(const CfsaModel& model, const ComplexVector& x1, std::int64_t t)
{
    if (x1.size() != model.n()) {
        throw DimensionError("forecast: state dimension mismatch");
    }
    return control_law(model, t).apply(x1);
}

/// Sample-window estimate of the epsilon-index s + T + 1.
struct EpsilonIndex {
    int    transient = 0;
    int    period    = 1;
    double epsilon   = 0.0;

    [[nodiscard]] int index() const { return transient + period + 1; }
};

/// Smallest (s, T), ordered by s+T and then T, with
/// ||x_{t+s+T} - x_{t+s}|| <= 2 epsilon for every t inside the sample.
inline EpsilonIndex estimate_epsilon_index(const SnapshotMatrix& x, double epsilon)
{
    const Eigen::Index count = x.count();
    if (count < 3) {
        throw DimensionError("estimate_epsilon_index: need at least three snapshots");
    }
    if (!(epsilon > 0.0)) {
        throw DimensionError("estimate_epsilon_index: epsilon must be positive");
    }
    const ComplexMatrix& d = x.data();
    const double bound = 2.0 * epsilon;
    // s + T + 1 <= N leaves at least one t to test.
    for (Eigen::Index sum = 1; sum + 1 <= count; ++sum) {
        for (Eigen::Index period = 1; period <= sum; ++period) {
            const Eigen::Index s = sum - period;
            bool ok = true;
            for (Eigen::Index t = 0; t + sum < count && ok; ++t) {
                ok = (d.col(t + sum) - d.col(t + s)).norm() <= bound;
            }
            if (ok) {
                return EpsilonIndex{static_cast<int>(s), static_cast<int>(period), epsilon};
            }
        }
    }
    throw NoPeriodFound("estimate_epsilon_index: no transient/period pair within the " +
                        std::to_string(count) + "-snapshot window");
}

} // namespace cfsa
