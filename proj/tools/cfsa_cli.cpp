// SPDX-License-Identifier: Apache-2.0

// Command-line front end: gen | fit | forecast | pspec | compare | graph.
//
// Exit codes: 0 ok, 2 usage or invalid configuration, 3 I/O, 4 dimension
// hypothesis (2N <= n) violated, 5 degenerate data, 6 no period found,
// 7 numerical failure.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfsa.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage      = 2;
constexpr int kExitIo         = 3;
constexpr int kExitDimension  = 4;
constexpr int kExitDegenerate = 5;
constexpr int kExitNoPeriod   = 6;
constexpr int kExitNumerical  = 7;

const std::vector<double> kDefaultEpsLevels = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};

const char* const kFormatHelp = R"(
File formats
  snapshot (binary)  one JSON header line {"format":"cfsa-snapshot","version":1,"n","N","dtype"}
                     then N columns of n complex values, interleaved re/im little-endian float64
  snapshot (*.csv)   optional "# cfsa-snapshot v1 n=<n> N=<N>" line, then 2n rows of N values:
                     real parts in rows 1..n, imaginary parts in rows n+1..2n
  model              JSON header {"format":"cfsa-model","version":1,"n","m","k","alpha","s1","dtype"}
                     then U (n x m) and Z (n x m), column-major, same complex encoding
Exit codes
  2 usage/config, 3 I/O, 4 2N > n without --force, 5 degenerate data, 6 no period, 7 numerical
)";

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    cfsa::io::detail::write_all(path, text);
}

/// Options as parsed (or defaulted), recorded in reports for provenance.
json echo_flags(const CLI::App& cmd)
{
    json flags = json::object();
    for (const CLI::Option* opt : cmd.get_options()) {
        if (opt->get_name() == "--help") {
            continue;
        }
        auto values = opt->as<std::vector<std::string>>();
        if (values.empty() && !opt->get_default_str().empty()) {
            values.push_back(opt->get_default_str());
        }
        if (values.empty()) {
            flags[opt->get_name()] = nullptr;
        } else {
            flags[opt->get_name()] = values.size() == 1 ? json(values.front()) : json(values);
        }
    }
    return flags;
}

int run_guarded(const std::function<int()>& body)
{
    try {
        return body();
    } catch (const cfsa::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cfsa::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const cfsa::DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDimension;
    } catch (const cfsa::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDegenerate;
    } catch (const cfsa::NoPeriodFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNoPeriod;
    } catch (const cfsa::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

// ---------------------------------------------------------------------------
// gen

struct GenFlags {
    int           nx           = 201;
    double        length       = 1.0;
    double        alpha        = 1.0;
    double        delta        = 0.0;
    double        dt           = 0.0;
    int           period_steps = 100;
    int           steps        = 101;
    int           stride       = 1;
    double        perturb      = 0.0;
    std::uint64_t seed         = 0;
    std::string   out;
    std::string   config;
};

/// key = value lines; '#' starts a comment. Keys mirror the long flag names.
std::map<std::string, std::string> read_key_values(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw cfsa::IoError("cannot open config " + path);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto eq = line.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        if (trim(line).empty()) {
            continue;
        }
        if (eq == std::string::npos) {
            throw cfsa::ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config_file(CLI::App& cmd, GenFlags& f)
{
    if (f.config.empty()) {
        return;
    }
    for (const auto& [key, value] : read_key_values(f.config)) {
        CLI::Option* opt = nullptr;
        try {
            opt = cmd.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw cfsa::ConfigError("config: unknown key '" + key + "'");
        }
        if (opt->count() > 0) {
            continue; // command line wins
        }
        try {
            const std::string k = "--" + key;
            if (k == "--nx") f.nx = std::stoi(value);
            else if (k == "--length") f.length = std::stod(value);
            else if (k == "--alpha") f.alpha = std::stod(value);
            else if (k == "--delta") f.delta = std::stod(value);
            else if (k == "--dt") f.dt = std::stod(value);
            else if (k == "--period-steps") f.period_steps = std::stoi(value);
            else if (k == "--steps") f.steps = std::stoi(value);
            else if (k == "--stride") f.stride = std::stoi(value);
            else if (k == "--perturb") f.perturb = std::stod(value);
            else if (k == "--seed") f.seed = std::stoull(value);
            else if (k == "--out") f.out = value;
            else throw cfsa::ConfigError("config: key '" + key + "' cannot be set from a file");
        } catch (const std::logic_error&) {
            throw cfsa::ConfigError("config: bad value for '" + key + "'");
        }
    }
}

int cmd_gen(CLI::App& cmd, GenFlags& f)
{
    apply_config_file(cmd, f);
    if (f.out.empty()) {
        throw cfsa::ConfigError("gen: --out is required");
    }
    if (f.stride < 1 || f.steps < 1) {
        throw cfsa::ConfigError("gen: --steps and --stride must be >= 1");
    }
    cfsa::WaveConfig cfg;
    cfg.grid_points = f.nx;
    cfg.length = f.length;
    cfg.wave_speed = f.alpha;
    cfg.damping = f.delta;
    cfg.dt = f.dt;
    cfg.steps_per_period = f.period_steps;
    cfg.snapshots = (f.steps - 1) * f.stride + 1;
    cfg.perturbation_level = f.perturb;
    cfg.rng_seed = f.seed;

    const cfsa::FirstOrderSystem sys = cfsa::build_system(cfg);
    const cfsa::ComplexMatrix states = cfsa::simulate_states(sys, cfg.snapshots);

    const double e1 = sys.energy(states.col(0));
    double drift = 0.0;
    double worst_increase = 0.0;
    double previous = e1;
    for (Eigen::Index t = 0; t < states.cols(); ++t) {
        const double e = sys.energy(states.col(t));
        drift = std::max(drift, std::abs(e - e1));
        worst_increase = std::max(worst_increase, e - previous);
        previous = e;
    }
    if (e1 > 0.0) {
        drift /= e1;
        worst_increase /= e1;
    }

    cfsa::SnapshotMatrix x(sys.c * states);
    x = x.strided(f.stride);
    x = cfsa::perturb(x, cfg.perturbation_level, cfg.rng_seed);
    cfsa::io::write_snapshots(f.out, x);

    std::cout << "wrote " << f.out << ": n=" << x.state_dim() << " N=" << x.count() << '\n'
              << "dt=" << cfsa::effective_time_step(cfg) << " simulated_steps=" << cfg.snapshots << '\n'
              << "energy E_1=" << e1 << " relative_drift=" << drift
              << " max_relative_step_increase=" << worst_increase << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// fit / compare

struct FitFlags {
    std::string input;
    std::string out;
    std::string report;
    int         take    = 0;
    int         stride  = 1;
    bool        force   = false;
    double      epsilon = 1e-6;
};

cfsa::SnapshotMatrix load_selection(const FitFlags& f, cfsa::SnapshotMatrix* full = nullptr)
{
    cfsa::SnapshotMatrix x = cfsa::io::read_snapshots(f.input);
    if (f.stride < 1 || f.take < 0) {
        throw cfsa::ConfigError("--stride must be >= 1 and --take >= 0");
    }
    x = x.strided(f.stride);
    if (full != nullptr) {
        *full = x;
    }
    if (f.take > 0) {
        if (f.take > x.count()) {
            throw cfsa::ConfigError("--take exceeds the number of snapshots");
        }
        x = x.leading(f.take);
    }
    return x;
}

cfsa::RunReport fit_report(const cfsa::CfsaModel& model, const cfsa::SnapshotMatrix& train,
                           const cfsa::SnapshotMatrix& full, double relative_epsilon)
{
    cfsa::RunReport r;
    r.k = model.k();
    r.m = model.m();
    r.alpha = model.alpha();
    r.s1 = model.s1();
    r.training_errors = cfsa::training_errors(model, train, model.m());
    r.sample_errors = cfsa::sample_errors(model, full);
    if (train.count() >= 3) {
        try {
            r.epsilon_index = cfsa::estimate_epsilon_index(train, relative_epsilon * train.max_column_norm());
        } catch (const cfsa::NoPeriodFound& e) {
            r.epsilon_index_error = e.what();
        }
    } else {
        r.epsilon_index_error = "need at least three snapshots";
    }
    return r;
}

int cmd_fit(CLI::App& cmd, const FitFlags& f)
{
    cfsa::SnapshotMatrix full;
    const cfsa::SnapshotMatrix train = load_selection(f, &full);
    const cfsa::CfsaModel model = cfsa::fit(train, cfsa::FitOptions{!f.force});
    cfsa::io::write_model(f.out, model);

    cfsa::RunReport r = fit_report(model, train, full, f.epsilon);
    r.artifacts["model"] = f.out;
    if (!f.report.empty()) {
        r.artifacts["report"] = f.report;
    }
    r.flags = echo_flags(cmd);
    emit(f.report, r.to_json().dump(2) + "\n");
    if (!f.report.empty()) {
        std::cout << "k=" << r.k << " m=" << r.m << " alpha=" << r.alpha << " s1=" << r.s1
                  << " max_training_error=" << cfsa::max_or_zero(r.training_errors) << '\n';
    }
    return 0;
}

int cmd_compare(CLI::App& cmd, const FitFlags& f)
{
    cfsa::SnapshotMatrix full;
    const cfsa::SnapshotMatrix train = load_selection(f, &full);
    const cfsa::CfsaModel model = cfsa::fit(train, cfsa::FitOptions{!f.force});
    if (!f.out.empty()) {
        cfsa::io::write_model(f.out, model);
    }

    cfsa::RunReport r = fit_report(model, train, full, f.epsilon);
    if (train.count() >= 3) {
        const cfsa::ComplexMatrix s = cfsa::companion_from_snapshots(train);
        r.portrait_distance = cfsa::portrait_distance(s, cfsa::materialize(model.gcs()));
        r.companion_residual = cfsa::connecting_matrix_residual(train, s);
    }
    if (!f.out.empty()) {
        r.artifacts["model"] = f.out;
    }
    if (!f.report.empty()) {
        r.artifacts["report"] = f.report;
    }
    r.flags = echo_flags(cmd);
    emit(f.report, r.to_json().dump(2) + "\n");
    if (!r.epsilon_index) {
        std::cerr << "error: epsilon-index: " << r.epsilon_index_error << '\n';
        return kExitNoPeriod;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// forecast

struct ForecastFlags {
    std::string   model;
    std::string   initial;
    std::string   out;
    std::int64_t  t0      = 1;
    std::int64_t  horizon = 0;
};

int cmd_forecast(const ForecastFlags& f)
{
    if (f.t0 < 1 || f.horizon < 0) {
        throw cfsa::ConfigError("forecast: need --t0 >= 1 and --horizon >= 0");
    }
    const cfsa::CfsaModel model = cfsa::io::read_model(f.model);
    cfsa::ComplexVector x1 = model.initial_state();
    if (!f.initial.empty()) {
        const cfsa::SnapshotMatrix init = cfsa::io::read_snapshots(f.initial);
        if (init.count() < 1) {
            throw cfsa::IoError("forecast: --initial file has no columns");
        }
        x1 = init.column(0);
    }
    cfsa::ComplexMatrix out(model.n(), f.horizon);
    for (std::int64_t j = 0; j < f.horizon; ++j) {
        out.col(j) = cfsa::forecast(model, x1, f.t0 + j);
    }
    emit(f.out, cfsa::io::encode_snapshots_csv(cfsa::SnapshotMatrix(std::move(out))));
    return 0;
}

// ---------------------------------------------------------------------------
// pspec

struct PspecFlags {
    std::vector<std::string> matrix;
    std::vector<double>      eps_levels;
    std::vector<double>      bounds;
    int                      grid    = cfsa::kDefaultGridSize;
    int                      nx      = 0;
    int                      ny      = 0;
    int                      take    = 0;
    unsigned                 threads = 0;
    std::string              out     = "pspec";
};

int cmd_pspec(const PspecFlags& f)
{
    if (f.matrix.empty()) {
        throw cfsa::ConfigError("pspec: --matrix is required");
    }
    const std::string& source = f.matrix.front();
    cfsa::ComplexMatrix a;
    std::optional<std::vector<cfsa::Complex>> eigs;
    if (source == "gcs" && f.matrix.size() == 3) {
        int k = 0;
        int n = 0;
        try {
            k = std::stoi(f.matrix[1]);
            n = std::stoi(f.matrix[2]);
        } catch (const std::logic_error&) {
            throw cfsa::ConfigError("pspec: gcs needs integer k and n");
        }
        const cfsa::GcsSpec spec(k, n);
        a = cfsa::materialize(spec);
        eigs = cfsa::gcs_eigenvalues(spec);
    } else if (source == "dmd" && f.matrix.size() == 2) {
        cfsa::SnapshotMatrix x = cfsa::io::read_snapshots(f.matrix[1]);
        if (f.take > 0 && f.take < x.count()) {
            x = x.leading(f.take);
        }
        a = cfsa::companion_from_snapshots(x);
    } else if (source == "model" && f.matrix.size() == 2) {
        const cfsa::CfsaModel model = cfsa::io::read_model(f.matrix[1]);
        a = cfsa::materialize(model.gcs());
        eigs = cfsa::gcs_eigenvalues(model.gcs());
    } else {
        throw cfsa::ConfigError("pspec: --matrix must be 'dmd <snap>', 'gcs <k> <n>' or 'model <file>'");
    }

    std::optional<cfsa::GridBounds> bounds;
    if (!f.bounds.empty()) {
        if (f.bounds.size() != 4) {
            throw cfsa::ConfigError("pspec: --bounds takes re_min re_max im_min im_max");
        }
        bounds = cfsa::GridBounds{f.bounds[0], f.bounds[1], f.bounds[2], f.bounds[3]};
    }
    const int nx = f.nx > 0 ? f.nx : f.grid;
    const int ny = f.ny > 0 ? f.ny : f.grid;
    const std::vector<double>& levels = f.eps_levels.empty() ? kDefaultEpsLevels : f.eps_levels;

    const cfsa::PseudospectrumGrid grid = cfsa::compute_grid(a, bounds, nx, ny, eigs, f.threads);
    cfsa::io::detail::write_all(f.out + ".csv", cfsa::io::grid_to_csv(grid));
    json doc = cfsa::io::grid_to_json(grid, levels);
    doc["source"] = f.matrix;
    cfsa::io::detail::write_all(f.out + ".json", doc.dump() + "\n");

    std::cout << "wrote " << f.out << ".csv and " << f.out << ".json (" << nx << "x" << ny << ", "
              << grid.eigenvalues.size() << " eigenvalues, " << grid.invalid_points.size() << " invalid points)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// graph

int cmd_graph(const std::string& model_path, const std::string& out)
{
    const cfsa::CfsaModel model = cfsa::io::read_model(model_path);
    emit(out, cfsa::io::gcs_to_dot(model.gcs()));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cyclic finite-state approximation of snapshot data"};
    app.footer(kFormatHelp);
    app.require_subcommand(1);

    GenFlags gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Simulate the damped wave model and write snapshots");
    gen_cmd->add_option("--nx", gen.nx, "Grid points (output dimension)")->capture_default_str();
    gen_cmd->add_option("--length", gen.length, "Domain length L")->capture_default_str();
    gen_cmd->add_option("--alpha", gen.alpha, "Wave speed")->capture_default_str();
    gen_cmd->add_option("--delta", gen.delta, "Damping; negative values decay")->capture_default_str();
    gen_cmd->add_option("--dt", gen.dt, "Time step; 0 derives it from --period-steps")->capture_default_str();
    gen_cmd->add_option("--period-steps", gen.period_steps, "Steps per period of the fundamental mode")
        ->capture_default_str();
    gen_cmd->add_option("--steps", gen.steps, "Number of snapshots written")->capture_default_str();
    gen_cmd->add_option("--stride", gen.stride, "Simulated steps between written snapshots")->capture_default_str();
    gen_cmd->add_option("--perturb", gen.perturb, "Relative complex Gaussian noise level")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output snapshot file (.csv for text)");
    gen_cmd->add_option("--config", gen.config, "key = value file; explicit flags override it");

    FitFlags fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a CFSA model to a snapshot file");
    fit_cmd->add_option("input", fit.input, "Snapshot file")->required();
    fit_cmd->add_option("--out", fit.out, "Model file")->required();
    fit_cmd->add_option("--report", fit.report, "Report JSON (stdout if omitted)");
    fit_cmd->add_option("--take", fit.take, "Use the first N snapshots (0 = all)")->capture_default_str();
    fit_cmd->add_option("--stride", fit.stride, "Keep every s-th snapshot before --take")->capture_default_str();
    fit_cmd->add_option("--epsilon", fit.epsilon, "Epsilon-index tolerance relative to max ||x_t||")
        ->capture_default_str();
    fit_cmd->add_flag("--force", fit.force, "Allow 2N > n as long as 2(N-1) <= n");

    FitFlags cmp;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "Fit, then compare against the DMD companion");
    cmp_cmd->add_option("input", cmp.input, "Snapshot file")->required();
    cmp_cmd->add_option("--out", cmp.out, "Optional model file");
    cmp_cmd->add_option("--report", cmp.report, "Report JSON (stdout if omitted)");
    cmp_cmd->add_option("--take", cmp.take, "Use the first N snapshots (0 = all)")->capture_default_str();
    cmp_cmd->add_option("--stride", cmp.stride, "Keep every s-th snapshot before --take")->capture_default_str();
    cmp_cmd->add_option("--epsilon", cmp.epsilon, "Epsilon-index tolerance relative to max ||x_t||")
        ->capture_default_str();
    cmp_cmd->add_flag("--force", cmp.force, "Allow 2N > n as long as 2(N-1) <= n");

    ForecastFlags fc;
    CLI::App* fc_cmd = app.add_subcommand("forecast", "Forecast states from a model (snapshot CSV output)");
    fc_cmd->add_option("model", fc.model, "Model file")->required();
    fc_cmd->add_option("--t0", fc.t0, "First step; column j holds the prediction for t0 + j")->capture_default_str();
    fc_cmd->add_option("--horizon", fc.horizon, "Number of steps")->required();
    fc_cmd->add_option("--initial", fc.initial, "Snapshot file whose first column replaces x_1");
    fc_cmd->add_option("--out", fc.out, "Output CSV (stdout if omitted)");

    PspecFlags ps;
    CLI::App* ps_cmd = app.add_subcommand("pspec", "Pseudospectrum grid of a companion or GCS matrix");
    ps_cmd->add_option("--matrix", ps.matrix, "dmd <snap> | gcs <k> <n> | model <file>")
        ->expected(2, 3)
        ->required();
    ps_cmd->add_option("--eps-levels", ps.eps_levels, "Epsilon levels (default 1e-1 .. 1e-8)");
    ps_cmd->add_option("--grid", ps.grid, "Points per axis")->capture_default_str();
    ps_cmd->add_option("--nx", ps.nx, "Points along the real axis (overrides --grid)");
    ps_cmd->add_option("--ny", ps.ny, "Points along the imaginary axis (overrides --grid)");
    ps_cmd->add_option("--bounds", ps.bounds, "re_min re_max im_min im_max")->expected(4);
    ps_cmd->add_option("--take", ps.take, "For dmd: use the first N snapshots");
    ps_cmd->add_option("--threads", ps.threads, "Worker threads (0 = all cores)")->capture_default_str();
    ps_cmd->add_option("--out", ps.out, "Output prefix for .csv and .json")->capture_default_str();

    std::string graph_model;
    std::string graph_out;
    CLI::App* gr_cmd = app.add_subcommand("graph", "DOT diagram of the model's GCS transition structure");
    gr_cmd->add_option("model", graph_model, "Model file")->required();
    gr_cmd->add_option("--out", graph_out, "DOT file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (*gen_cmd) {
        return run_guarded([&] { return cmd_gen(*gen_cmd, gen); });
    }
    if (*fit_cmd) {
        return run_guarded([&] { return cmd_fit(*fit_cmd, fit); });
    }
    if (*cmp_cmd) {
        return run_guarded([&] { return cmd_compare(*cmp_cmd, cmp); });
    }
    if (*fc_cmd) {
        return run_guarded([&] { return cmd_forecast(fc); });
    }
    if (*ps_cmd) {
        return run_guarded([&] { return cmd_pspec(ps); });
    }
    return run_guarded([&] { return cmd_graph(graph_model, graph_out); });
}
