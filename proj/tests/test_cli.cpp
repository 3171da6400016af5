// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "cfsa/io.hpp"
#include "test_support.hpp"

#ifndef CFSA_CLI_PATH
#error "CFSA_CLI_PATH must point at the cfsa executable"
#endif

namespace cfsa {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               (std::string("cfsa_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string file(const std::string& name) const { return (dir_ / name).string(); }

    /// Runs the CLI with stdout/stderr captured to files; returns the exit code.
    int run(const std::string& args)
    {
        const std::string cmd = std::string(CFSA_CLI_PATH) + " " + args + " >" + file("stdout.txt") + " 2>" +
                                file("stderr.txt");
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    [[nodiscard]] std::string output() const { return io::detail::read_all(file("stdout.txt")); }
    [[nodiscard]] nlohmann::json json_file(const std::string& name) const
    {
        return nlohmann::json::parse(io::detail::read_all(file(name)));
    }

    void write_orbit(const std::string& name, Eigen::Index n, int transient, int period, int count,
                     std::uint64_t seed = 1)
    {
        std::mt19937_64 rng(seed);
        io::write_snapshots(file(name), SnapshotMatrix(testing::eventually_periodic_orbit(n, transient, period,
                                                                                          count, rng)));
    }

private:
    fs::path dir_;
};

TEST_F(Cli, GenWritesRequestedShape)
{
    ASSERT_EQ(run("gen --nx 41 --steps 21 --period-steps 20 --out " + file("w.snap")), 0);
    const SnapshotMatrix x = io::read_snapshots(file("w.snap"));
    EXPECT_EQ(x.state_dim(), 41);
    EXPECT_EQ(x.count(), 21);
    EXPECT_NE(output().find("relative_drift="), std::string::npos);
}

TEST_F(Cli, GenSingleSnapshot)
{
    ASSERT_EQ(run("gen --nx 11 --steps 1 --out " + file("one.csv")), 0);
    EXPECT_EQ(io::read_snapshots(file("one.csv")).count(), 1);
}

TEST_F(Cli, GenIsDeterministic)
{
    const std::string common = "gen --nx 31 --steps 12 --perturb 1e-3 --seed 7 --out ";
    ASSERT_EQ(run(common + file("a.snap")), 0);
    ASSERT_EQ(run(common + file("b.snap")), 0);
    EXPECT_EQ(io::detail::read_all(file("a.snap")), io::detail::read_all(file("b.snap")));
}

TEST_F(Cli, GenStrideSubsamples)
{
    ASSERT_EQ(run("gen --nx 21 --steps 9 --out " + file("full.snap")), 0);
    ASSERT_EQ(run("gen --nx 21 --steps 3 --stride 4 --out " + file("strided.snap")), 0);
    const SnapshotMatrix full = io::read_snapshots(file("full.snap"));
    EXPECT_EQ(io::read_snapshots(file("strided.snap")), full.strided(4));
}

TEST_F(Cli, GenConfigFileWithFlagOverride)
{
    std::ofstream(file("wave.cfg")) << "# desk run\nnx = 25\nsteps = 5\n";
    ASSERT_EQ(run("gen --config " + file("wave.cfg") + " --steps 7 --out " + file("c.snap")), 0);
    const SnapshotMatrix x = io::read_snapshots(file("c.snap"));
    EXPECT_EQ(x.state_dim(), 25);
    EXPECT_EQ(x.count(), 7);
}

TEST_F(Cli, GenRejectsBadConfig)
{
    EXPECT_EQ(run("gen --nx 2 --out " + file("x.snap")), 2);
    EXPECT_EQ(run("gen --nx 11 --no-such-flag 1 --out " + file("x.snap")), 2);
    EXPECT_EQ(run("gen --nx 11 --out " + file("missing_dir/x.snap")), 3);
}

TEST_F(Cli, FitRejectsDimensionGateUnlessForced)
{
    ASSERT_EQ(run("gen --nx 201 --steps 101 --out " + file("p.snap")), 0);
    EXPECT_EQ(run("fit " + file("p.snap") + " --out " + file("m.cfsa")), 4);
    EXPECT_EQ(run("fit " + file("p.snap") + " --force --out " + file("m.cfsa")), 0);
}

TEST_F(Cli, FitSyntheticPeriodicData)
{
    write_orbit("syn.snap", 512, 0, 19, 20);
    ASSERT_EQ(run("fit " + file("syn.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    const auto report = json_file("r.json");
    EXPECT_EQ(report["k"], 1);
    EXPECT_EQ(report["m"], 19);
    EXPECT_LE(report["max_training_error"].get<double>(), 1e-9);
    EXPECT_EQ(report["flags"]["--out"], file("m.cfsa"));
}

TEST_F(Cli, FitZeroDataIsDegenerate)
{
    io::write_snapshots(file("zero.snap"), SnapshotMatrix(ComplexMatrix::Zero(10, 4)));
    EXPECT_EQ(run("fit " + file("zero.snap") + " --out " + file("m.cfsa")), 5);
}

TEST_F(Cli, FitMissingInputIsIoError)
{
    EXPECT_EQ(run("fit " + file("nope.snap") + " --out " + file("m.cfsa")), 3);
}

TEST_F(Cli, ForecastHorizonZeroIsHeaderOnly)
{
    write_orbit("syn.snap", 32, 1, 3, 5);
    ASSERT_EQ(run("fit " + file("syn.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    ASSERT_EQ(run("forecast " + file("m.cfsa") + " --horizon 0 --out " + file("f.csv")), 0);
    EXPECT_EQ(io::detail::read_all(file("f.csv")), "# cfsa-snapshot v1 n=32 N=0\n");
}

TEST_F(Cli, ForecastOfPeriodicModelRepeatsExactly)
{
    const int period = 6;
    write_orbit("syn.snap", 40, 0, period, period + 1);
    ASSERT_EQ(run("fit " + file("syn.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    ASSERT_EQ(run("forecast " + file("m.cfsa") + " --horizon " + std::to_string(10 * period) + " --out " +
                  file("f.csv")),
              0);
    const SnapshotMatrix f = io::read_snapshots(file("f.csv"));
    ASSERT_EQ(f.count(), 10 * period);
    for (Eigen::Index j = 0; j + period < f.count(); ++j) {
        EXPECT_EQ(f.column(j + period), f.column(j));
    }
}

TEST_F(Cli, GenFitForecastRoundTrip)
{
    ASSERT_EQ(run("gen --nx 101 --period-steps 40 --steps 21 --stride 2 --out " + file("w.snap")), 0);
    ASSERT_EQ(run("fit " + file("w.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    const double tolerance = std::max(json_file("r.json")["max_training_error"].get<double>(), 1e-12);
    ASSERT_EQ(run("forecast " + file("m.cfsa") + " --initial " + file("w.snap") + " --horizon 20 --out " +
                  file("f.csv")),
              0);
    const SnapshotMatrix x = io::read_snapshots(file("w.snap"));
    const SnapshotMatrix f = io::read_snapshots(file("f.csv"));
    const double scale = x.max_column_norm();
    for (Eigen::Index j = 0; j < 20; ++j) {
        // Column j predicts t = j + 1, i.e. x_{j+2}; the training window has m = 20 columns.
        const Eigen::Index target = j + 1 < 20 ? j + 1 : 0;
        EXPECT_LE((f.column(j) - x.column(target)).norm() / scale, 10.0 * tolerance + 1e-12) << "t=" << j + 1;
    }
}

TEST_F(Cli, PspecGcsMatchesDistanceToRoots)
{
    ASSERT_EQ(run("pspec --matrix gcs 1 8 --grid 21 --out " + file("g")), 0);
    const auto doc = json_file("g.json");
    EXPECT_EQ(doc["eigenvalues"].size(), 8u);
    EXPECT_EQ(doc["eps_levels"].size(), 8u);
    const auto roots = testing::roots_of_unity(8);
    std::ifstream csv(file("g.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "re,im,sigma_min");
    int rows = 0;
    while (std::getline(csv, line)) {
        double re = 0.0, im = 0.0, value = 0.0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &re, &im, &value), 3);
        EXPECT_NEAR(value, testing::distance_to_set(Complex(re, im), roots), 1e-10);
        ++rows;
    }
    EXPECT_EQ(rows, 21 * 21);
}

TEST_F(Cli, PspecDmdAndModelSources)
{
    write_orbit("syn.snap", 30, 2, 4, 7);
    ASSERT_EQ(run("pspec --matrix dmd " + file("syn.snap") + " --grid 11 --eps-levels 0.1 0.01 --out " +
                  file("d")),
              0);
    EXPECT_EQ(json_file("d.json")["eps_levels"].size(), 2u);
    EXPECT_EQ(json_file("d.json")["eigenvalues"].size(), 6u);
    ASSERT_EQ(run("fit " + file("syn.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    ASSERT_EQ(run("pspec --matrix model " + file("m.cfsa") + " --nx 7 --ny 5 --bounds -2 2 -1 1 --out " +
                  file("m")),
              0);
    const auto doc = json_file("m.json");
    EXPECT_EQ(doc["nx"], 7);
    EXPECT_EQ(doc["ny"], 5);
    EXPECT_EQ(doc["bounds"]["re_min"], -2.0);
}

TEST_F(Cli, PspecUnknownSourceIsUsageError)
{
    EXPECT_EQ(run("pspec --matrix banana 1 --out " + file("x")), 2);
}

TEST_F(Cli, CompareExactPeriodicData)
{
    write_orbit("syn.snap", 64, 3, 5, 9);
    ASSERT_EQ(run("compare " + file("syn.snap") + " --report " + file("c.json")), 0);
    const auto report = json_file("c.json");
    EXPECT_EQ(report["k"], 4);
    EXPECT_LE(report["portrait_distance"].get<double>(), 1e-8);
    EXPECT_LE(report["companion_residual"].get<double>(), 1e-10);
    EXPECT_EQ(report["epsilon_index"]["transient"], 3);
    EXPECT_EQ(report["epsilon_index"]["period"], 5);
}

TEST_F(Cli, ComparePerturbedDataReportsFiniteDistance)
{
    ASSERT_EQ(run("gen --nx 101 --period-steps 20 --steps 21 --perturb 1e-3 --seed 3 --out " + file("p.snap")),
              0);
    ASSERT_EQ(run("compare " + file("p.snap") + " --epsilon 1e-2 --report " + file("c.json")), 0);
    EXPECT_TRUE(std::isfinite(json_file("c.json")["portrait_distance"].get<double>()));
}

TEST_F(Cli, CompareTooShortSampleHasNoPeriod)
{
    std::mt19937_64 rng(5);
    io::write_snapshots(file("short.snap"), SnapshotMatrix(testing::random_matrix(20, 3, rng)));
    EXPECT_EQ(run("compare " + file("short.snap") + " --report " + file("c.json")), 6);
    const auto report = json_file("c.json");
    EXPECT_TRUE(report["epsilon_index"].is_null());
    EXPECT_FALSE(report["epsilon_index_error"].get<std::string>().empty());
}

TEST_F(Cli, GraphOfFittedModel)
{
    write_orbit("syn.snap", 40, 2, 3, 6);
    ASSERT_EQ(run("fit " + file("syn.snap") + " --out " + file("m.cfsa") + " --report " + file("r.json")), 0);
    ASSERT_EQ(run("graph " + file("m.cfsa") + " --out " + file("g.dot")), 0);
    const std::string dot = io::detail::read_all(file("g.dot"));
    EXPECT_NE(dot.find("5 -> 3;"), std::string::npos);
    EXPECT_EQ(run("graph " + file("nope.cfsa")), 3);
}

TEST_F(Cli, HelpDocumentsFormats)
{
    EXPECT_EQ(run("--help"), 0);
    EXPECT_NE(output().find("float64"), std::string::npos);
}

} // namespace
} // namespace cfsa
