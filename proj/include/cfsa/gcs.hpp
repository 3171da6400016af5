// SPDX-License-Identifier: Apache-2.0

///
/// \file gcs.hpp
///
/// Generic cyclic shift matrices C_{k,n}. C_{k,n} sends e_j to e_{j+1} for
/// j < n and e_n to e_k, so e_1 runs through a transient of length k-1 and
/// then a cycle of length T = n-k+1. It is the companion matrix of
/// z^n - z^(k-1), which gives closed forms for its powers and spectrum.
///
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"

namespace cfsa {

/// Implicit C_{k,n}; 1 <= k <= n.
class GcsSpec {
public:
    GcsSpec(int k, int n) : k_(k), n_(n)
    {
        if (n < 1 || k < 1 || k > n) {
            throw DimensionError("GcsSpec: need 1 <= k <= n, got k=" + std::to_string(k) +
                                 ", n=" + std::to_string(n));
        }
    }

    [[nodiscard]] int k() const { return k_; }
    [[nodiscard]] int n() const { return n_; }
    /// Cycle length n - k + 1.
    [[nodiscard]] int period() const { return n_ - k_ + 1; }
    /// Transient length k - 1.
    [[nodiscard]] int transient() const { return k_ - 1; }

    friend bool operator==(const GcsSpec&, const GcsSpec&) = default;

private:
    int k_;
    int n_;
};

/// Dense C_{k,n}: column j is e_{j+1} for j < n, column n is e_k.
inline ComplexMatrix materialize(const GcsSpec& spec)
{
    const int n = spec.n();
    ComplexMatrix c = ComplexMatrix::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        c(j + 1, j) = 1.0;
    }
    c(spec.k() - 1, n - 1) = 1.0;
    return c;
}

/// Reduced exponent with C^t = C^tau(t) and C^t e_1 = e_{1+tau(t)}.
///
/// Returns t below the transient and k-1 + (t-k+1) mod T from t = k-1 on.
/// For k = 1 the value is 0 whenever T divides t (C^t = I there).
inline std::int64_t tau(const GcsSpec& spec, std::int64_t t)
{
    if (t < 1) {
        throw DimensionError("tau: t must be positive");
    }
    const std::int64_t s = spec.transient();
    if (t < s) {
        return t;
    }
    return s + (t - s) % spec.period();
}

/// One application of C_{k,n} to v in O(n).
inline ComplexVector apply_once(const GcsSpec& spec, const ComplexVector& v)
{
    const Eigen::Index n = spec.n();
    ComplexVector out(n);
    out(0) = 0.0;
    out.tail(n - 1) = v.head(n - 1);
    out(spec.k() - 1) += v(n - 1);
    return out;
}

/// C_{k,n}^t v, reducing the exponent with tau first so the cost is
/// O(n * min(t, n)) regardless of how large t is.
inline ComplexVector apply_power(const GcsSpec& spec, std::int64_t t, const ComplexVector& v)
{
    if (v.size() != spec.n()) {
        throw DimensionError("apply_power: vector length does not match n");
    }
    ComplexVector out = v;
    const std::int64_t reduced = tau(spec, t);
    for (std::int64_t i = 0; i < reduced; ++i) {
        out = apply_once(spec, out);
    }
    return out;
}

/// Same as apply_power but applied to every column of a block.
inline ComplexMatrix apply_power(const GcsSpec& spec, std::int64_t t, const ComplexMatrix& block)
{
    ComplexMatrix out(block.rows(), block.cols());
    for (Eigen::Index j = 0; j < block.cols(); ++j) {
        out.col(j) = apply_power(spec, t, ComplexVector(block.col(j)));
    }
    return out;
}

/// Closed-form spectrum: k-1 zeros followed by the T-th roots of unity.
inline std::vector<Complex> gcs_eigenvalues(const GcsSpec& spec)
{
    std::vector<Complex> values(static_cast<std::size_t>(spec.transient()), Complex{0.0, 0.0});
    const int period = spec.period();
    for (int j = 0; j < period; ++j) {
        values.push_back(std::polar(1.0, 2.0 * std::numbers::pi * j / period));
    }
    return values;
}

} // namespace cfsa
