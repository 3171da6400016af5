// SPDX-License-Identifier: Apache-2.0

///
/// \file pseudospectra.hpp
///
/// Grid sampling of z -> sigma_min(zI - A). The epsilon-pseudospectrum is the
/// strict sublevel set {z : sigma_min(zI - A) < epsilon}.
///
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"

namespace cfsa {

struct GridBounds {
    double re_min = -1.3;
    double re_max = 1.3;
    double im_min = -1.3;
    double im_max = 1.3;
};

/// Half-width of the square that is always part of the default window, so the
/// unit circle stays in frame.
inline constexpr double kUnitDiskFrame = 1.3;
inline constexpr int    kDefaultGridSize = 201;

struct PseudospectrumGrid {
    GridBounds           bounds;
    int                  nx = 0;
    int                  ny = 0;
    Eigen::MatrixXd      values; ///< nx x ny; values(i, j) at point(i, j)
    std::vector<Complex> eigenvalues;
    /// Points whose SVD failed; their value is the upper bound ||zI - A||_F.
    std::vector<std::pair<int, int>> invalid_points;

    [[nodiscard]] Complex point(int i, int j) const
    {
        const double hx = (bounds.re_max - bounds.re_min) / (nx - 1);
        const double hy = (bounds.im_max - bounds.im_min) / (ny - 1);
        return {bounds.re_min + i * hx, bounds.im_min + j * hy};
    }
};

/// Eigenvalue bounding box padded by half its diagonal, joined with the
/// [-1.3, 1.3]^2 frame.
inline GridBounds default_bounds(std::span<const Complex> eigs)
{
    GridBounds b;
    if (eigs.empty()) {
        return b;
    }
    double re_lo = eigs[0].real(), re_hi = re_lo, im_lo = eigs[0].imag(), im_hi = im_lo;
    for (const Complex& z : eigs) {
        re_lo = std::min(re_lo, z.real());
        re_hi = std::max(re_hi, z.real());
        im_lo = std::min(im_lo, z.imag());
        im_hi = std::max(im_hi, z.imag());
    }
    const double pad = 0.5 * std::hypot(re_hi - re_lo, im_hi - im_lo);
    b.re_min = std::min(re_lo - pad, -kUnitDiskFrame);
    b.re_max = std::max(re_hi + pad, kUnitDiskFrame);
    b.im_min = std::min(im_lo - pad, -kUnitDiskFrame);
    b.im_max = std::max(im_hi + pad, kUnitDiskFrame);
    return b;
}

/// Evaluates sigma_min(zI - A) on an nx x ny grid.
///
/// Grid points are independent; they are split across `threads` workers
/// (0 = hardware concurrency) and the output does not depend on the split.
/// `known_eigenvalues` skips the eigensolver when a closed form is available.
inline PseudospectrumGrid compute_grid(const ComplexMatrix& a, std::optional<GridBounds> bounds = {},
                                       int nx = kDefaultGridSize, int ny = kDefaultGridSize,
                                       std::optional<std::vector<Complex>> known_eigenvalues = {},
                                       unsigned threads = 0)
{
    if (a.rows() != a.cols() || a.size() == 0) {
        throw DimensionError("compute_grid: matrix must be square and nonempty");
    }
    if (nx < 2 || ny < 2) {
        throw DimensionError("compute_grid: need at least 2 points per axis");
    }
    PseudospectrumGrid grid;
    grid.eigenvalues = known_eigenvalues ? std::move(*known_eigenvalues) : eigenvalues(a);
    grid.bounds = bounds ? *bounds : default_bounds(grid.eigenvalues);
    if (!(grid.bounds.re_min < grid.bounds.re_max) || !(grid.bounds.im_min < grid.bounds.im_max)) {
        throw DimensionError("compute_grid: empty bounds");
    }
    grid.nx = nx;
    grid.ny = ny;
    grid.values.resize(nx, ny);

    const Eigen::Index n = a.rows();
    std::vector<char> failed(static_cast<std::size_t>(nx) * ny, 0);

    auto evaluate_column = [&](int i) {
        ComplexMatrix shifted(n, n);
        for (int j = 0; j < ny; ++j) {
            const Complex z = grid.point(i, j);
            shifted = -a;
            shifted.diagonal().array() += z;
            try {
                grid.values(i, j) = smallest_singular_value(shifted);
            } catch (const IterationFailure&) {
                grid.values(i, j) = shifted.norm();
                failed[static_cast<std::size_t>(i) * ny + j] = 1;
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(nx));
    if (threads <= 1) {
        for (int i = 0; i < nx; ++i) {
            evaluate_column(i);
        }
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int i = next++; i < nx; i = next++) {
                    evaluate_column(i);
                }
            });
        }
    }

    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            if (failed[static_cast<std::size_t>(i) * ny + j]) {
                grid.invalid_points.emplace_back(i, j);
            }
        }
    }
    if (grid.invalid_points.size() * 1000 > static_cast<std::size_t>(nx) * ny) {
        throw IterationFailure("compute_grid: more than 0.1% of grid points failed");
    }
    return grid;
}

/// mask(i, j) = values(i, j) < epsilon
inline Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>
level_set_membership(const PseudospectrumGrid& grid, double epsilon)
{
    return grid.values.array() < epsilon;
}

/// Hausdorff distance between two finite point sets in the plane.
inline double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b)
{
    if (a.empty() || b.empty()) {
        return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    }
    auto directed = [](std::span<const Complex> from, std::span<const Complex> to) {
        double worst = 0.0;
        for (const Complex& p : from) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const Complex& q : to) {
                nearest = std::min(nearest, std::abs(p - q));
            }
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// Hausdorff distance between the spectra of a and b.
inline double portrait_distance(const ComplexMatrix& a, const ComplexMatrix& b)
{
    const std::vector<Complex> ea = eigenvalues(a);
    const std::vector<Complex> eb = eigenvalues(b);
    return hausdorff_distance(ea, eb);
}

} // namespace cfsa
