#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    json report() const { return json::parse(out); }
};

Result run(const std::string& args) {
    const std::string cmd = std::string(CVQD_CLI_PATH) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Result run_err(const std::string& args) {
    const std::string cmd = std::string(CVQD_CLI_PATH) + " " + args + " 2>&1 >/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("cvqd_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Cli, GadgetCheckPassesWithSummary) {
    auto r = run("gadget-check");
    ASSERT_EQ(r.code, 0);
    auto j = r.report();
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checks"].size(), 4u);
    for (const auto& row : j["checks"]) EXPECT_EQ(row["failures"], 0);
}

TEST(Cli, PlantedXAttackRejectedByXTest) {
    auto r = run("gadget-check --planted-attack X:1 --attack-trials 100");
    ASSERT_EQ(r.code, 0);
    auto a = r.report()["planted_attack"];
    EXPECT_EQ(a["xtest_reject_rate"].get<double>(), 1.0);
    EXPECT_EQ(a["ztest_reject_rate"].get<double>(), 0.0);
    EXPECT_EQ(run("gadget-check --planted-attack W:1").code, 3);
    EXPECT_EQ(run("gadget-check --planted-attack X:5 --wires 2").code, 3);
}

TEST(Cli, TwirlCheckWithinTolerance) {
    auto r = run("twirl-check --qubits 1 --trials 50");
    ASSERT_EQ(r.code, 0);
    EXPECT_LE(r.report()["results"][0]["max_error"].get<double>(), 1e-9);
}

TEST(Cli, SimonConstruction) {
    auto r = run("simon --n-min 2 --n-max 7 --keys 20");
    ASSERT_EQ(r.code, 0);
    for (const auto& row : r.report()["results"]) EXPECT_EQ(row["simon"], 20);
}

TEST(Cli, DsspDepthAudit) {
    auto in = run("dssp-run --n 3 --d 2 --trials 20").report();
    EXPECT_EQ(in["audited_depth"], 5);
    auto st = run("dssp-run --n 3 --d 2 --trials 10 --solver standard").report();
    EXPECT_EQ(st["audited_depth"], 7);
}

TEST(Cli, GameRunHonestMeetsBound) {
    auto r = run("game-run --n 3 --d 2 --trials 400 --jobs 2");
    ASSERT_EQ(r.code, 0);
    auto j = r.report();
    EXPECT_GE(j["accept_rate"].get<double>(), j["completeness_bound"].get<double>());
    EXPECT_EQ(j["config"]["q"], 3);
}

TEST(Cli, ClassicalProverNearChanceOnComputation) {
    auto j = run("game-run --prover-a classical --gamma 0 --trials 1000").report();
    // a uniformly random nonzero 3-bit guess
    EXPECT_NEAR(j["accept_rate"].get<double>(), 1.0 / 7.0, 0.04);
}

TEST(Cli, RepetitionWidensGap) {
    double prev = 2.0, prev_gap = -1.0;
    for (int rep : {1, 2, 4}) {
        const std::string tail = " --trials 600 --repeat " + std::to_string(rep);
        const double h = run("game-run" + tail).report()["accept_rate"].get<double>();
        const double c = run("game-run --prover-a lying" + tail).report()["accept_rate"].get<double>();
        EXPECT_LT(c, prev);
        EXPECT_GT(h - c, prev_gap);
        prev = c;
        prev_gap = h - c;
    }
}

TEST(Cli, JobsDoNotChangeReports) {
    const auto a = run("game-run --prover-o pauli --trials 200 --jobs 1").out;
    const auto b = run("game-run --prover-o pauli --trials 200 --jobs 4").out;
    EXPECT_EQ(a, b);
    const auto c = run("ntcf-run --prover reset-at-1 --extract --trials 300 --jobs 1").out;
    const auto d = run("ntcf-run --prover reset-at-1 --extract --trials 300 --jobs 3").out;
    EXPECT_EQ(c, d);
}

TEST(Cli, TranscriptsReproduceByteForByte) {
    const auto d1 = scratch("t1"), d2 = scratch("t2");
    ASSERT_EQ(run("game-run --trials 20 --seed 9 --transcripts 3 --out-dir " + d1.string()).code, 0);
    ASSERT_EQ(run("game-run --trials 20 --seed 9 --transcripts 3 --out-dir " + d2.string()).code, 0);
    for (int t = 0; t < 3; ++t) {
        const auto name = fs::path("transcripts") / ("trial_" + std::to_string(t) + ".json");
        const auto a = slurp(d1 / name);
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, slurp(d2 / name));
        auto j = json::parse(a);
        EXPECT_TRUE(j.contains("messages"));
        EXPECT_TRUE(j.contains("verdict"));
    }
    auto m1 = json::parse(slurp(d1 / "manifest.json")), m2 = json::parse(slurp(d2 / "manifest.json"));
    EXPECT_EQ(m1["oracle_hash"], m2["oracle_hash"]);
    EXPECT_EQ(m1["oracle_hash"].get<std::string>().size(), 40u);
    EXPECT_EQ(slurp(d1 / "report.json"), slurp(d2 / "report.json"));
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto dir = scratch("ini");
    fs::create_directories(dir);
    const auto ini = dir / "run.ini";
    std::ofstream(ini) << "[game-run]\nn = 3\ntrials = 40\nprover-o = skip\n";
    auto j = run("game-run --config " + ini.string()).report();
    EXPECT_EQ(j["config"]["trials"], 40);
    EXPECT_EQ(j["prover_o"], "skip");
    auto k = run("game-run --config " + ini.string() + " --prover-o honest --trials 30").report();
    EXPECT_EQ(k["prover_o"], "honest");
    EXPECT_EQ(k["config"]["trials"], 30);
    std::ofstream(dir / "bad.ini") << "[game-run]\nbogus = 1\n";
    EXPECT_EQ(run("game-run --config " + (dir / "bad.ini").string()).code, 3);
    fs::remove_all(dir);
}

TEST(Cli, AllViolationsReportedTogether) {
    auto r = run_err("game-run --n 1 --p 0.9 --prover-a nobody --prover-o nothing --jobs 0");
    EXPECT_EQ(r.code, 3);
    auto j = json::parse(r.out);
    EXPECT_EQ(j["error"], "config");
    EXPECT_EQ(j["violations"].size(), 5u);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("game-run --trials 0").code, 3);
    EXPECT_EQ(run("no-such-command").code, 3);
    EXPECT_EQ(run("dssp-run --n 8 --d 10 --solver standard --trials 1").code, 4);
    // forcing an impossible acceptance threshold is an assertion failure
    EXPECT_EQ(run("ntcf-run --prover preimage-only --d 2 --trials 200 --min-accept 0.9").code, 2);
    EXPECT_EQ(run("ntcf-run --prover honest --extract").code, 3);
}

TEST(Cli, NtcfRuns) {
    auto h = run("ntcf-run --prover honest --d 3 --trials 300");
    ASSERT_EQ(h.code, 0);
    EXPECT_EQ(h.report()["accept_rate"].get<double>(), 1.0);
    EXPECT_EQ(h.report()["audited_depth"], 17);
    auto p = run("ntcf-run --prover preimage-only --d 4 --trials 4000").report();
    EXPECT_NEAR(p["accept_rate"].get<double>(), 1.0 / 32, 0.02);
    auto e = run("ntcf-run --prover reset-at-2 --extract --trials 2000");
    ASSERT_EQ(e.code, 0);
    auto x = e.report()["extractor"];
    for (const char* key : {"p0", "p1", "both_valid_rate"}) EXPECT_TRUE(x.contains(key));
    EXPECT_GE(x["both_valid_rate"].get<double>(),
              x["p0"].get<double>() + x["p1"].get<double>() - 1 - 3 * x["sigma"].get<double>());
}

TEST(Cli, BenchReportsTimings) {
    auto r = run("bench --reps 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_GE(r.report()["timings"].size(), 4u);
}
