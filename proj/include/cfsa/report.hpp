// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfsa/engine.hpp"
#include "cfsa/snapshot.hpp"

namespace cfsa {

/// ||forecast(x_1, t) - x_{1+tau(t)}|| / max_j ||x_j|| for t = 1 .. horizon,
/// where x holds the training columns (at least m of them).
inline std::vector<double> training_errors(const CfsaModel& model, const SnapshotMatrix& x, std::int64_t horizon)
{
    const double scale = std::max(x.max_column_norm(), 1e-300);
    const ComplexVector x1 = x.column(0);
    std::vector<double> errs;
    errs.reserve(static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)));
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const auto target = static_cast<Eigen::Index>(tau(model.gcs(), t));
        errs.push_back((forecast(model, x1, t) - x.data().col(target)).norm() / scale);
    }
    return errs;
}

/// ||forecast(x_1, t) - x_{t+1}|| / max_j ||x_j|| for t = 1 .. N-1: how well
/// the fitted law predicts the recorded sample, including columns it never saw.
inline std::vector<double> sample_errors(const CfsaModel& model, const SnapshotMatrix& x)
{
    const double scale = std::max(x.max_column_norm(), 1e-300);
    const ComplexVector x1 = x.column(0);
    std::vector<double> errs;
    for (Eigen::Index t = 1; t < x.count(); ++t) {
        errs.push_back((forecast(model, x1, t) - x.data().col(t)).norm() / scale);
    }
    return errs;
}

inline double max_or_zero(const std::vector<double>& v)
{
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

/// Summary written by the fit and compare commands.
struct RunReport {
    int    k     = 0;
    int    m     = 0;
    double alpha = 0.0;
    double s1    = 0.0;
    std::vector<double>         training_errors;
    std::vector<double>         sample_errors;
    std::optional<EpsilonIndex> epsilon_index;
    std::string                 epsilon_index_error;
    std::optional<double>       portrait_distance;
    std::optional<double>       companion_residual;
    std::map<std::string, std::string> artifacts;
    nlohmann::json              flags = nlohmann::json::object();

    [[nodiscard]] bool all_finite() const
    {
        auto finite = [](double v) { return std::isfinite(v); };
        return finite(alpha) && finite(s1) && std::all_of(training_errors.begin(), training_errors.end(), finite) &&
               std::all_of(sample_errors.begin(), sample_errors.end(), finite) &&
               (!portrait_distance || finite(*portrait_distance)) &&
               (!companion_residual || finite(*companion_residual));
    }

    [[nodiscard]] nlohmann::json to_json() const
    {
        nlohmann::json j = {{"k", k},
                            {"m", m},
                            {"alpha", alpha},
                            {"s1", s1},
                            {"training_errors", training_errors},
                            {"max_training_error", max_or_zero(training_errors)},
                            {"sample_errors", sample_errors},
                            {"max_sample_error", max_or_zero(sample_errors)},
                            {"artifacts", artifacts},
                            {"flags", flags}};
        if (epsilon_index) {
            j["epsilon_index"] = {{"transient", epsilon_index->transient},
                                  {"period", epsilon_index->period},
                                  {"epsilon", epsilon_index->epsilon},
                                  {"index", epsilon_index->index()}};
        } else {
            j["epsilon_index"] = nullptr;
            if (!epsilon_index_error.empty()) {
                j["epsilon_index_error"] = epsilon_index_error;
            }
        }
        j["portrait_distance"] = portrait_distance ? nlohmann::json(*portrait_distance) : nlohmann::json(nullptr);
        j["companion_residual"] =
            companion_residual ? nlohmann::json(*companion_residual) : nlohmann::json(nullptr);
        return j;
    }
};

} // namespace cfsa
