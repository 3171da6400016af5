// SPDX-License-Identifier: Apache-2.0

// Acceptance checks 1-9. One PASS/FAIL line per criterion; exit status is the
// number of failures. Reference values come from the helpers in
// test_support.hpp, not from the code under test.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "cfsa.hpp"
#include "../test_support.hpp"

namespace {

using namespace cfsa;

struct Outcome {
    bool        pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Criterion 1, 2, 5, 9 share one orbit: n = 128, s = 3, T = 8, N = 12.
constexpr int kDim = 128;
constexpr int kTransient = 3;
constexpr int kPeriod = 8;
constexpr int kCount = kTransient + kPeriod + 1;

SnapshotMatrix reference_orbit()
{
    std::mt19937_64 rng(20240601);
    return SnapshotMatrix(testing::eventually_periodic_orbit(kDim, kTransient, kPeriod, kCount, rng));
}

/// Brute-force tau: index of C^t e_1 in integer arithmetic, 0-based.
long long tau_by_orbit(int k, int n, long long t)
{
    const testing::IntMatrix c = testing::integer_gcs(k, n);
    testing::IntMatrix v = testing::IntMatrix::Zero(n, 1);
    v(0) = 1;
    for (long long i = 0; i < t; ++i) {
        v = c * v;
    }
    return testing::basis_index(v);
}

Outcome reconstruction()
{
    const SnapshotMatrix x = reference_orbit();
    const CfsaModel model = fit(x);
    const int m = model.m();
    const double scale = x.max_column_norm();
    double worst = 0.0;
    for (long long t = 1; t <= 10LL * m; ++t) {
        const long long target = tau_by_orbit(kTransient + 1, m, t);
        worst = std::max(worst, (forecast(model, x.column(0), t) - x.column(target)).norm() / scale);
    }
    return {worst <= 1e-9, fmt("m=%g max relative error %.3e (tol 1e-9)", m, worst)};
}

Outcome classification()
{
    const int k = classify_gcs_index(reference_orbit());
    return {k == kTransient + 1, fmt("k=%g (expected %g)", k, kTransient + 1)};
}

Outcome gcs_algebra()
{
    long long mismatches = 0;
    for (int n = 1; n <= 12; ++n) {
        for (int k = 1; k <= n; ++k) {
            const auto c = testing::integer_gcs(k, n);
            if (testing::integer_power(c, n) != testing::integer_power(c, k - 1)) {
                ++mismatches;
            }
            const GcsSpec spec(k, n);
            testing::IntMatrix v = testing::IntMatrix::Zero(n, 1);
            v(0) = 1;
            for (long long t = 1; t <= 3LL * n; ++t) {
                v = c * v;
                if (testing::basis_index(v) != tau(spec, t)) {
                    ++mismatches;
                }
                ComplexVector e1 = ComplexVector::Zero(n);
                e1(0) = 1.0;
                const ComplexVector moved = apply_power(spec, t, e1);
                if (moved != v.cast<double>().cast<Complex>()) {
                    ++mismatches;
                }
            }
        }
    }
    return {mismatches == 0, fmt("%g mismatches over 1 <= k <= n <= 12 (tol 0, integer)", mismatches)};
}

Outcome construction_invariants()
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(4, 60);
    double worst = 0.0;
    double min_overlap = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 50; ++trial) {
        const int n = dim(rng);
        std::uniform_int_distribution<int> cnt(2, n / 2);
        const int count = cnt(rng);
        const ComplexMatrix data = testing::random_matrix(n, count, rng);
        const CfsaModel model = fit(SnapshotMatrix(data));
        const Eigen::Index m = model.m();
        const ComplexMatrix& z = model.z_hat();
        const ComplexMatrix kp = model.k_projection();
        const ComplexMatrix lp = model.l_projection();
        const double s1 = testing::power_norm(data.leftCols(m));
        worst = std::max({worst,
                          max_abs(z.adjoint() * z - ComplexMatrix::Identity(m, m)),
                          max_abs(kp * kp - kp), max_abs(kp - kp.adjoint()),
                          max_abs(lp * lp - lp), max_abs(lp - lp.adjoint()),
                          max_abs(kp * z - data.leftCols(m) / s1),
                          std::abs(model.s1() - s1) / s1});
        const Complex overlap = z.col(0).dot(data.col(0));
        worst = std::max(worst, std::abs(overlap.imag()));
        min_overlap = std::min(min_overlap, overlap.real());
    }
    return {worst <= 1e-10 && min_overlap > 0.0,
            fmt("max invariant defect %.3e (tol 1e-10), min z1*x1 %.3e (> 0)", worst, min_overlap)};
}

Outcome dmd_link()
{
    const SnapshotMatrix x = reference_orbit();
    const ComplexMatrix s = companion_from_snapshots(x);
    const testing::IntMatrix expected = testing::integer_gcs(kTransient + 1, kCount - 1);
    const double entrywise = max_abs(s - expected.cast<double>().cast<Complex>());
    const CfsaModel model = fit(x);
    const double distance = portrait_distance(s, materialize(model.gcs()));
    return {entrywise <= 1e-8 && distance <= 1e-8,
            fmt("entrywise %.3e, portrait distance %.3e (tol 1e-8)", entrywise, distance)};
}

Outcome pseudospectrum_oracle()
{
    const PseudospectrumGrid g = compute_grid(materialize(GcsSpec(1, 8)), GridBounds{-1.5, 1.5, -1.5, 1.5}, 101, 101);
    const auto roots = testing::roots_of_unity(8);
    double worst = 0.0;
    for (int i = 0; i < 101; ++i) {
        for (int j = 0; j < 101; ++j) {
            const Complex z(-1.5 + 3.0 * i / 100.0, -1.5 + 3.0 * j / 100.0);
            worst = std::max(worst, std::abs(g.values(i, j) - testing::distance_to_set(z, roots)));
        }
    }
    return {worst <= 1e-9 && g.invalid_points.empty(), fmt("max |sigma_min - dist| %.3e (tol 1e-9)", worst)};
}

/// dx * (sum_i w_i |v_i|^2 + alpha^2 sum_i |u_{i+1} - u_i|^2 / dx^2), w_0 = 1/2.
double energy_oracle(const ComplexVector& phi, int nx, double dx, double alpha)
{
    double kinetic = 0.0;
    double strain = 0.0;
    for (int i = 0; i < nx; ++i) {
        kinetic += (i == 0 ? 0.5 : 1.0) * std::norm(phi(nx + i));
        if (i + 1 < nx) {
            strain += std::norm(phi(i + 1) - phi(i));
        }
    }
    return dx * (kinetic + alpha * alpha * strain / (dx * dx));
}

Outcome wave_physics()
{
    WaveConfig cfg;
    cfg.grid_points = 201;
    const double dx = grid_spacing(cfg);

    const FirstOrderSystem lossless = build_system(cfg);
    const ComplexMatrix states = simulate_states(lossless, 400);
    const double e1 = energy_oracle(states.col(0), 201, dx, 1.0);
    double drift = 0.0;
    for (Eigen::Index t = 0; t < states.cols(); ++t) {
        drift = std::max(drift, std::abs(energy_oracle(states.col(t), 201, dx, 1.0) - e1) / e1);
    }

    cfg.damping = -0.05;
    const FirstOrderSystem damped = build_system(cfg);
    const ComplexMatrix dstates = simulate_states(damped, 400);
    const double d1 = energy_oracle(dstates.col(0), 201, dx, 1.0);
    double worst_rise = -std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 1; t < dstates.cols(); ++t) {
        const double rise = energy_oracle(dstates.col(t), 201, dx, 1.0) -
                            energy_oracle(dstates.col(t - 1), 201, dx, 1.0);
        worst_rise = std::max(worst_rise, rise / d1);
    }
    return {drift <= 1e-8 && worst_rise <= 1e-10,
            fmt("lossless drift %.3e (tol 1e-8), damped max step rise %.3e E1 (tol 1e-10)", drift, worst_rise)};
}

Outcome end_to_end()
{
    // 100 steps per period, every 4th step kept: 25 snapshots per period, 51 in two periods.
    WaveConfig cfg;
    cfg.grid_points = 201;
    cfg.steps_per_period = 100;
    cfg.snapshots = 201;
    const SnapshotMatrix clean = simulate(build_system(cfg), cfg.snapshots).strided(4);

    auto pipeline = [](const SnapshotMatrix& sample) {
        const std::string bytes = io::encode_snapshots(sample);
        const SnapshotMatrix x = io::decode_snapshots(bytes);
        const CfsaModel model = io::decode_model(io::encode_model(fit(x.leading(26))));
        const double scale = x.max_column_norm();
        double worst = 0.0;
        for (Eigen::Index t = 1; t < x.count(); ++t) {
            worst = std::max(worst, (forecast(model, x.column(0), t) - x.column(t)).norm() / scale);
        }
        return worst;
    };

    const double clean_err = pipeline(clean);
    const double noise = 1e-3;
    const double noisy_err = pipeline(perturb(clean, noise, 11));
    const bool ok = clean.count() == 51 && clean_err <= 1e-3 && std::isfinite(noisy_err) && noisy_err <= 10 * noise;
    return {ok, fmt("clean max relative error %.3e (tol 1e-3), perturbed %.3e (tol 1e-2)", clean_err, noisy_err)};
}

Outcome control_law_rank()
{
    const SnapshotMatrix x = reference_orbit();
    const CfsaModel model = fit(x);
    int worst = 0;
    for (long long t = 1; t <= 10LL * model.m(); ++t) {
        const ComplexMatrix f = control_law(model, t).dense();
        const Eigen::JacobiSVD<ComplexMatrix> svd(f);
        const auto& s = svd.singularValues();
        worst = std::max(worst, static_cast<int>((s.array() > 1e-10 * model.s1()).count()));
    }
    return {worst <= model.m(), fmt("max numerical rank %g (bound m = %g)", worst, model.m())};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"reconstruction accuracy", reconstruction},
        {"GCS index recovery", classification},
        {"GCS algebra", gcs_algebra},
        {"construction invariants", construction_invariants},
        {"DMD-GCS link", dmd_link},
        {"pseudospectrum oracle", pseudospectrum_oracle},
        {"wave generator physics", wave_physics},
        {"end-to-end desk experiment", end_to_end},
        {"control-law rank", control_law_rank},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += out.pass ? 0 : 1;
        std::printf("%s criterion %zu (%s): %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), out.detail.c_str(), secs);
    }
    return failures;
}
