// test_experiments.cpp

#include "adfs/experiments.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

using namespace adfs;
using namespace adfs::experiments;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("adfs_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string first_line(const std::filesystem::path& file) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

qubit::QubitExampleParams short_run() {
    return qubit::scenario("fig2", {{"t_final", "3"}, {"samples", "31"}, {"dt", "0.01"}});
}

}  // namespace

TEST(Emit, Parsing) {
    const auto e = parse_emit("xi,diagnostics");
    EXPECT_FALSE(e.trajectory);
    EXPECT_TRUE(e.xi);
    EXPECT_TRUE(e.diagnostics);
    const auto all = parse_emit("all");
    EXPECT_TRUE(all.sta_fields && all.bound);
    EXPECT_THROW(parse_emit("pictures"), ArgumentError);
    EXPECT_THROW(parse_emit(""), ArgumentError);
}

TEST(Grid, ParseAndExpand) {
    const auto doc = nlohmann::json::parse(R"({"nu": {"start": 0, "stop": 1, "count": 3}, "mu": [0.1, 0.2],
                                               "control": ["engineered", "sta"]})");
    const auto axes = parse_grid(doc);
    ASSERT_EQ(axes.size(), 3u);
    EXPECT_EQ(axes[0].key, "control");
    EXPECT_EQ(axes[1].key, "mu");
    EXPECT_EQ(axes[2].values, (std::vector<std::string>{"0", "0.5", "1"}));
    const auto pts = expand_grid(axes);
    ASSERT_EQ(pts.size(), 12u);
    EXPECT_EQ(pts[0][2].second, "0");
    EXPECT_EQ(pts[1][2].second, "0.5");
    EXPECT_EQ(pts[3][1].second, "0.2");
    EXPECT_EQ(pts[6][0].second, "sta");
    EXPECT_TRUE(expand_grid({}).empty());
    EXPECT_TRUE(expand_grid(parse_grid(nlohmann::json::parse(R"({"mu": []})"))).empty());
    EXPECT_THROW(parse_grid(nlohmann::json::parse(R"({"mu": {"start": 0}})")), ArgumentError);
    EXPECT_THROW(parse_grid(nlohmann::json::parse(R"({"mu": 3})")), ArgumentError);
    EXPECT_THROW(parse_grid(nlohmann::json::parse("[1]")), ArgumentError);
}

TEST(Simulate, SummaryFields) {
    const auto r = simulate(short_run());
    EXPECT_EQ(r.trajectory.times.size(), 31u);
    EXPECT_EQ(r.xi_state.size(), 31u);
    EXPECT_EQ(r.bound_profile.size(), 31u);
    EXPECT_GE(r.min_bound_margin, 0.0);
    EXPECT_LT(r.max_invariance_residual, 1e-10);
    EXPECT_LE(r.min_purity, r.final_purity);
    const auto s = r.summary();
    EXPECT_EQ(s["schema_version"], kSchemaVersion);
    EXPECT_TRUE(s["params"].contains("system"));
    EXPECT_TRUE(s["bound"]["valid"].get<bool>());
    EXPECT_EQ(s.dump().find("time"), std::string::npos);  // no timestamps

    RunOptions light;
    light.emit = parse_emit("trajectory");
    const auto t = simulate(short_run(), light);
    EXPECT_TRUE(t.xi_state.empty());
    EXPECT_TRUE(t.bound_profile.empty());
    EXPECT_TRUE(t.summary()["bound"].is_null());
}

TEST(RunToDirectory, WritesRequestedFiles) {
    const auto dir = scratch("run");
    RunOptions opts;
    opts.emit = parse_emit("all");
    run_to_directory(short_run(), dir, opts);
    EXPECT_EQ(first_line(dir / "trajectory.csv"), "t,purity,fidelity,bloch_x,bloch_y,bloch_z,trace_err,herm_err,min_eig");
    EXPECT_EQ(first_line(dir / "xi.csv"),
              "t,r,theta,xi_state,xi_lindblad,xi_closed_form,omega,gamma,f_max,prefactor,divergent,bound");
    EXPECT_EQ(first_line(dir / "diagnostics.csv"), "t,coherent_leak,backflow,dpdt");
    EXPECT_TRUE(std::filesystem::exists(dir / "sta_fields.csv"));
    std::ifstream in(dir / "bound.json");
    const auto doc = nlohmann::json::parse(in);
    EXPECT_TRUE(doc["profile_valid"].get<bool>());
    EXPECT_TRUE(doc["purity_lower_bound"].contains("scaled_coefficient"));
    std::ifstream sj(dir / "summary.json");
    EXPECT_TRUE(nlohmann::json::accept(sj));
}

TEST(RunToDirectory, DeterministicOutput) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    run_to_directory(short_run(), a);
    run_to_directory(short_run(), b);
    for (const char* f : {"trajectory.csv", "xi.csv", "bound.json", "summary.json"}) {
        std::ifstream fa(a / f), fb(b / f);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_EQ(sa.str(), sb.str()) << f;
    }
}

TEST(Sweep, RowsInIndexOrderAndEmptyGridRejected) {
    const auto dir = scratch("sweep");
    const auto axes = parse_grid(nlohmann::json::parse(R"({"mu": [0.1, 0.5, 1]})"));
    const auto rows = sweep("fig2", {{"t_final", "2"}, {"samples", "11"}, {"dt", "0.01"}}, axes, dir);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].index, i);
        EXPECT_EQ(rows[i].status, "ok");
    }
    EXPECT_GT(rows[0].final_purity, rows[2].final_purity);
    EXPECT_EQ(first_line(dir / "sweep.csv"), "index,mu,final_purity,final_fidelity,min_purity,max_xi,status");
    EXPECT_THROW(sweep("fig2", {}, {}, dir), ArgumentError);
    EXPECT_THROW(sweep("fig2", {}, parse_grid(nlohmann::json::parse(R"({"bogus": [1]})")), dir), ArgumentError);
}

TEST(Sweep, RecordsPositivityFailuresPerPoint) {
    const auto dir = scratch("sweep_fail");
    const auto axes = parse_grid(nlohmann::json::parse(R"({"dt": [0.01, 5]})"));
    const auto rows = sweep("fig2", {{"mu", "1"}, {"samples", "3"}}, axes, dir);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[1].status, "positivity_violation");
}

TEST(Parallel, RunsEveryIndexAndPropagatesErrors) {
    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                     if (i == 3) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
    EXPECT_GE(worker_count(), 1u);
}
