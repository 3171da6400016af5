// SPDX-License-Identifier: Apache-2.0

///
/// \file wave.hpp
///
/// Snapshot generator for the damped wave equation
///
///     psi_tt = alpha^2 psi_xx + delta psi_t   on (0, L),
///     psi_x(0, t) = 0,  psi(L, t) = 0,
///
/// reduced to first order in Phi = [psi; psi_t] and stepped with
/// Crank-Nicolson, A Phi_{t+1} = B Phi_t, Psi_t = C Phi_t.
///
/// Sign convention: delta < 0 damps, delta = 0 is lossless.
///
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "cfsa/errors.hpp"
#include "cfsa/matrix_kernel.hpp"
#include "cfsa/snapshot.hpp"

namespace cfsa {

struct WaveConfig {
    int    grid_points = 201;
    double length      = 1.0;
    double wave_speed  = 1.0;
    double damping     = 0.0;
    /// Time step. Non-positive means "derive from steps_per_period".
    double dt = 0.0;
    /// Snapshots per temporal period of the fundamental mode when dt is derived.
    int    steps_per_period = 100;
    int    snapshots        = 101;
    /// Empty means cos(pi x / (2L)).
    std::vector<double> initial_profile;
    /// Empty means zero.
    std::vector<double> initial_velocity;
    double        perturbation_level = 0.0;
    std::uint64_t rng_seed           = 0;
};

/// Node spacing L / (n_x - 1).
inline double grid_spacing(const WaveConfig& cfg)
{
    return cfg.length / (cfg.grid_points - 1);
}

/// Time step for which the Crank-Nicolson rotation of the fundamental
/// Neumann-Dirichlet mode closes after exactly `steps_per_period` steps.
///
/// That mode, cos(i * theta) with theta = pi / (2 (n_x - 1)), is an exact
/// eigenvector of the difference operator with eigenvalue
/// (2 cos(theta) - 2) / dx^2, and CN turns it by 2 atan(omega dt / 2) per step.
inline double periodic_time_step(const WaveConfig& cfg)
{
    const double dx = grid_spacing(cfg);
    const double theta = std::numbers::pi / (2.0 * (cfg.grid_points - 1));
    const double omega = std::abs(cfg.wave_speed) * std::sqrt((2.0 - 2.0 * std::cos(theta))) / dx;
    return 2.0 * std::tan(std::numbers::pi / cfg.steps_per_period) / omega;
}

inline double effective_time_step(const WaveConfig& cfg)
{
    return cfg.dt > 0.0 ? cfg.dt : periodic_time_step(cfg);
}

inline std::vector<double> default_profile(const WaveConfig& cfg)
{
    std::vector<double> psi(static_cast<std::size_t>(cfg.grid_points));
    const double dx = grid_spacing(cfg);
    for (int i = 0; i < cfg.grid_points; ++i) {
        psi[static_cast<std::size_t>(i)] = std::cos(std::numbers::pi * i * dx / (2.0 * cfg.length));
    }
    // cos(pi/2) is 6e-17 in floating point; pin the Dirichlet node.
    psi.back() = 0.0;
    return psi;
}

/// Throws ConfigError on an invalid configuration.
inline void validate(const WaveConfig& cfg)
{
    if (cfg.grid_points < 3) {
        throw ConfigError("wave: grid_points must be >= 3");
    }
    if (!(cfg.length > 0.0)) {
        throw ConfigError("wave: length must be positive");
    }
    if (!std::isfinite(cfg.wave_speed) || cfg.wave_speed == 0.0) {
        throw ConfigError("wave: wave_speed must be finite and nonzero");
    }
    if (!std::isfinite(cfg.damping) || !std::isfinite(cfg.dt)) {
        throw ConfigError("wave: damping and dt must be finite");
    }
    if (cfg.dt <= 0.0 && cfg.steps_per_period < 3) {
        throw ConfigError("wave: steps_per_period must be >= 3 when dt is derived");
    }
    if (cfg.snapshots < 1) {
        throw ConfigError("wave: snapshots must be >= 1");
    }
    if (!(cfg.perturbation_level >= 0.0)) {
        throw ConfigError("wave: perturbation_level must be nonnegative");
    }
    const auto n = static_cast<std::size_t>(cfg.grid_points);
    for (const auto* profile : {&cfg.initial_profile, &cfg.initial_velocity}) {
        if (!profile->empty() && profile->size() != n) {
            throw ConfigError("wave: initial profiles must have grid_points entries");
        }
    }
    if (!cfg.initial_profile.empty()) {
        const auto& psi = cfg.initial_profile;
        double scale = 0.0;
        for (double p : psi) {
            scale = std::max(scale, std::abs(p));
        }
        const double dx = grid_spacing(cfg);
        if (std::abs(psi.back()) > 1e-12 * scale) {
            throw ConfigError("wave: initial profile must vanish at x = L");
        }
        if (std::abs(psi[1] - psi[0]) / dx > 10.0 * dx * scale) {
            throw ConfigError("wave: initial profile must have zero slope at x = 0");
        }
    }
    if (!cfg.initial_velocity.empty() && cfg.initial_velocity.back() != 0.0) {
        throw ConfigError("wave: initial velocity must vanish at x = L");
    }
}

/// Second-difference matrix: Neumann ghost node at x = 0 (row [-2, 2]),
/// interior [1, -2, 1], and a zero Dirichlet row at x = L.
inline Eigen::MatrixXd second_difference(int grid_points, double dx)
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(grid_points, grid_points);
    const double inv = 1.0 / (dx * dx);
    d(0, 0) = -2.0 * inv;
    d(0, 1) = 2.0 * inv;
    for (int i = 1; i + 1 < grid_points; ++i) {
        d(i, i - 1) = inv;
        d(i, i) = -2.0 * inv;
        d(i, i + 1) = inv;
    }
    return d;
}

struct FirstOrderSystem {
    ComplexMatrix a;
    ComplexMatrix b;
    ComplexMatrix c;
    ComplexVector phi0;
    double        dx         = 0.0;
    double        wave_speed = 0.0;

    [[nodiscard]] Eigen::Index grid_points() const { return c.rows(); }

    /// Discrete energy dx * (sum_i h_i |v_i|^2 + alpha^2 sum_i |u_{i+1} - u_i|^2 / dx^2)
    /// with trapezoid weight h_0 = 1/2 at the Neumann node. Conserved exactly
    /// by the scheme when delta = 0, nonincreasing when delta < 0.
    [[nodiscard]] double energy(const ComplexVector& phi) const
    {
        const Eigen::Index n = grid_points();
        const auto u = phi.head(n);
        const auto v = phi.tail(n);
        double kinetic = 0.5 * std::norm(v(0)) + v.segment(1, n - 1).squaredNorm();
        const double strain = (u.tail(n - 1) - u.head(n - 1)).squaredNorm() / (dx * dx);
        return dx * (kinetic + wave_speed * wave_speed * strain);
    }
};

inline FirstOrderSystem build_system(const WaveConfig& cfg)
{
    validate(cfg);
    const int n = cfg.grid_points;
    const double dx = grid_spacing(cfg);
    const double h = 0.5 * effective_time_step(cfg);
    const double a2 = cfg.wave_speed * cfg.wave_speed;
    const Eigen::MatrixXd d = second_difference(n, dx);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

    Eigen::MatrixXd a(2 * n, 2 * n);
    a << eye, -h * eye, -h * a2 * d, (1.0 - h * cfg.damping) * eye;
    Eigen::MatrixXd b(2 * n, 2 * n);
    b << eye, h * eye, h * a2 * d, (1.0 + h * cfg.damping) * eye;

    FirstOrderSystem sys;
    sys.a = a.cast<Complex>();
    sys.b = b.cast<Complex>();
    sys.c = ComplexMatrix::Zero(n, 2 * n);
    sys.c.leftCols(n).setIdentity();
    sys.dx = dx;
    sys.wave_speed = cfg.wave_speed;

    const std::vector<double> psi0 = cfg.initial_profile.empty() ? default_profile(cfg) : cfg.initial_profile;
    sys.phi0 = ComplexVector::Zero(2 * n);
    for (int i = 0; i < n; ++i) {
        sys.phi0(i) = psi0[static_cast<std::size_t>(i)];
        if (!cfg.initial_velocity.empty()) {
            sys.phi0(n + i) = cfg.initial_velocity[static_cast<std::size_t>(i)];
        }
    }

    // rcond is the LU estimate of 1 / cond_1(A).
    if (!(Eigen::PartialPivLU<ComplexMatrix>(sys.a).rcond() > 1e-12)) {
        throw SingularSystemError("wave: Crank-Nicolson matrix A is numerically singular");
    }
    return sys;
}

/// Stacked states Phi_1 .. Phi_steps as columns; A is factored once.
inline ComplexMatrix simulate_states(const FirstOrderSystem& sys, int n_steps)
{
    if (n_steps < 1) {
        throw ConfigError("simulate: n_steps must be >= 1");
    }
    const Eigen::PartialPivLU<ComplexMatrix> lu(sys.a);
    if (!(lu.rcond() > 1e-12)) {
        throw SingularSystemError("simulate: A is numerically singular");
    }
    ComplexMatrix states(sys.phi0.size(), n_steps);
    states.col(0) = sys.phi0;
    for (int t = 1; t < n_steps; ++t) {
        states.col(t) = lu.solve(sys.b * states.col(t - 1));
    }
    return states;
}

/// Output snapshots Psi_t = C Phi_t, t = 1 .. n_steps.
inline SnapshotMatrix simulate(const FirstOrderSystem& sys, int n_steps)
{
    return SnapshotMatrix(sys.c * simulate_states(sys, n_steps));
}

/// Adds complex Gaussian noise with E|noise|^2 = (level * ||x||_max)^2 per
/// entry (real and imaginary parts each carry half the variance).
inline SnapshotMatrix perturb(const SnapshotMatrix& x, double level, std::uint64_t seed)
{
    if (!(level >= 0.0)) {
        throw ConfigError("perturb: level must be nonnegative");
    }
    if (level == 0.0 || x.count() == 0) {
        return x;
    }
    const double sigma = level * max_abs(x.data()) / std::numbers::sqrt2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    ComplexMatrix out = x.data();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double re = noise(rng);
            const double im = noise(rng);
            out(i, j) += Complex(re, im);
        }
    }
    return SnapshotMatrix(std::move(out));
}

/// build_system + simulate + perturb.
inline SnapshotMatrix generate(const WaveConfig& cfg)
{
    const FirstOrderSystem sys = build_system(cfg);
    SnapshotMatrix x = simulate(sys, cfg.snapshots);
    return perturb(x, cfg.perturbation_level, cfg.rng_seed);
}

} // namespace cfsa
