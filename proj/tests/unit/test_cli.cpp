#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = gfbp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir() {
    fs::path d = fs::temp_directory_path() / ("gfbp_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Cli, ThetaPrintsPublishedSet) {
    Result r = run({"theta", "3", "2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "[[1,1,1],[1,2,0],[2,0,1]]\n");
    EXPECT_EQ(run({"theta", "30", "2", "--count"}).out, "1346269\n");
}

TEST(Cli, PoissonColumns) {
    Result r = run({"pmf", "--preset", "tfpp", "--lambda", "1", "--alpha", "1", "--t-grid", "0:2:0.5"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n1,0,0.36787944117144"), std::string::npos);
    EXPECT_NE(r.out.find("\n2,2,0.27067056647322"), std::string::npos);
}

TEST(Cli, GfcpPmfMatchesGoldenFile) {
    Result r = run({"pmf", "--preset", "gfcp", "--lambdas", "1,3", "--alpha", "0.5", "--t-grid", "0:1:0.25"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(fs::path(GFBP_GOLDEN_DIR) / "gfcp_pmf.csv"));
    // t = 1 rows agree with the Talbot reference values
    EXPECT_NE(r.out.find("\n1,0,0.1369994576250"), std::string::npos);
    EXPECT_NE(r.out.find("\n1,2,0.1046159515300"), std::string::npos);
}

TEST(Cli, SimulateMatchesGoldenFile) {
    Result r = run({"simulate", "--preset", "tfpp", "--lambda", "2", "--horizon", "1", "--paths", "1000", "--seed", "42"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, slurp(fs::path(GFBP_GOLDEN_DIR) / "tfpp_simulate_seed42.jsonl"));
}

TEST(Cli, OutputFilesCarryManifest) {
    fs::path d = temp_dir();
    fs::path out = d / "pmf.json";
    Result r = run({"pmf", "--preset", "gfcp", "--lambdas", "1,3", "--alpha", "0.5", "--t-grid", "0:1:0.5",
                    "--format", "json", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    std::string manifest = slurp(fs::path(out.string() + ".manifest.json"));
    for (const char* key : {"\"command\": \"pmf\"", "\"model\"", "\"order\"", "\"grid\"", "\"tolerances\"",
                            "\"seed\"", "\"outputs\"", "\"version\"", "\"wall_clock_seconds\""})
        EXPECT_NE(manifest.find(key), std::string::npos) << key;
    EXPECT_NE(slurp(out).find("\"columns\""), std::string::npos);
    fs::remove_all(d);
}

TEST(Cli, ExitCodes) {
    fs::path d = temp_dir();
    fs::path bad = d / "bad.json";
    std::ofstream(bad) << "{\n  \"kind\": oops\n}";
    Result r = run({"pmf", "--model", bad.string(), "--alpha", "1", "--t-grid", "0:1:1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    EXPECT_EQ(run({"pmf", "--preset", "tfpp", "--lambda", "1", "--alpha", "1"}).code, 2);
    EXPECT_EQ(run({"pmf", "--preset", "tfpp", "--lambda", "1", "--alpha", "1", "--t-grid", "0:1:1", "--state-budget", "2"})
                  .code,
              3);
    EXPECT_EQ(run({"theta", "80", "2"}).code, 4);
    EXPECT_EQ(run({"bogus"}).code, 2);
    fs::remove_all(d);
}

TEST(Cli, ExplosionVerdict) {
    Result r = run({"explosion", "--preset", "fpbp", "--rates", "n^2", "--terms", "10000"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("PossiblyExploding"), std::string::npos);
}

TEST(Cli, ValidateModes) {
    const std::vector<std::string> model = {"--preset", "formula", "--n0", "1", "--k", "2", "--rates", "n,1"};
    auto with = [&](std::vector<std::string> head) {
        head.insert(head.end(), model.begin(), model.end());
        return run(head);
    };
    Result oracle = with({"validate", "--mode", "oracle", "--alpha", "1"});
    EXPECT_EQ(oracle.code, 0) << oracle.out << oracle.err;
    EXPECT_NE(oracle.out.find("\"passed\": true"), std::string::npos);
    Result lap = with({"validate", "--mode", "laplace", "--alpha", "0.8"});
    EXPECT_EQ(lap.code, 0) << lap.out;
    Result mc = run({"validate", "--mode", "mc", "--preset", "gfcp", "--lambdas", "1,3", "--alpha", "0.5", "--t-grid",
                     "1:1:1", "--samples", "100000", "--seed", "42"});
    EXPECT_EQ(mc.code, 0) << mc.out;
    Result res = run({"validate", "--mode", "residual", "--preset", "tfpp", "--lambda", "1", "--alpha", "1"});
    EXPECT_EQ(res.code, 0) << res.out;
    EXPECT_EQ(with({"validate", "--mode", "mc", "--alpha", "0.7"}).code, 2);
}

TEST(Cli, MlEval) {
    Result r = run({"ml-eval", "--alpha", "0.5", "--z", "-1,0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.5,-1,0.4275835761558"), std::string::npos) << r.out;
}

TEST(Cli, BinaryExitCodeThroughShell) {
    std::string cmd = std::string(GFBP_TOOL_PATH) + " pmf --model /nonexistent.json --alpha 1 --t-grid 0:1:1 2>/dev/null";
    FILE* p = ::popen(cmd.c_str(), "r");
    ASSERT_NE(p, nullptr);
    char buf[256];
    while (std::fgets(buf, sizeof buf, p)) {
    }
    int status = ::pclose(p);
    EXPECT_EQ(WEXITSTATUS(status), 2);
    std::string ok = std::string(GFBP_TOOL_PATH) + " theta 2 2";
    p = ::popen(ok.c_str(), "r");
    std::string out;
    while (std::fgets(buf, sizeof buf, p)) out += buf;
    EXPECT_EQ(WEXITSTATUS(::pclose(p)), 0);
    EXPECT_EQ(out, "[[1,1],[2,0]]\n");
}
