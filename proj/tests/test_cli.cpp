#include <gtest/gtest.h>

#include <sstream>

#include "cdc/cli.hpp"
#include "support/testkit.hpp"

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& stdin_text = "") {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    const int code = cdc::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST(Cli, CompileToFile) {
    testkit::TempDir dir("cli");
    const auto src = testkit::corpus_dir() / "square.kd";
    const auto out = dir.path() / "square.svg";
    const CliRun r = run({"compile", src.string(), "-o", out.string(), "--cache-dir", (dir.path() / "c").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(testkit::read_file(out).rfind("<?xml", 0), 0u);
}

TEST(Cli, StdinToStdout) {
    const CliRun r = run({"compile", "-", "--no-cache", "--format", "json"}, "A & \\rTo & B");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out).at("arrows").size(), 1u);
}

TEST(Cli, NoCacheTwiceIdentical) {
    const auto src = (testkit::corpus_dir() / "styles.kd").string();
    const CliRun a = run({"compile", src, "--no-cache"});
    const CliRun b = run({"compile", src, "--no-cache"});
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CheckReportsOneDiagnostic) {
    testkit::TempDir dir("check");
    write(dir.path() / "bad.kd", "A & {B");
    const CliRun r = run({"check", (dir.path() / "bad.kd").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_NE(r.err.find("bad.kd:1:5: error[E002]"), std::string::npos) << r.err;
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"compile", "-", "--format", "pdf"}).code, 2);
    EXPECT_EQ(run({"compile", "-", "--set", "nonsense"}).code, 2);
    EXPECT_EQ(run({"compile", "/nonexistent/x.kd", "--no-cache"}).code, 3);
    EXPECT_EQ(run({"compile", "-", "--no-cache", "--metrics", "/nonexistent/m"}, "A").code, 3);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DgPresetValues) {
    const CliRun r = run({"dump", "-", "--preset", "dg"}, "A & B \\\\ C & D");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& grid = j.at("grid");
    EXPECT_TRUE(grid.at("flexible").get<bool>());
    const auto y = grid.at("y");
    EXPECT_EQ(y[1].get<int>() - y[0].get<int>(), 1864679 - 372935);  // ygrid 1cm - 2mm
    const auto& params = j.at("parameters");
    EXPECT_EQ(params.at("cellwidth").get<int>(), 1864679 + 559403);
    EXPECT_EQ(params.at("bracewidth").get<int>(), 1864679 - 466169);
    EXPECT_EQ(params.at("xgrid").get<int>(), 0);
}

TEST(Cli, SetAppliesAfterPreset) {
    const CliRun r = run({"dump", "-", "--preset", "dg", "--set", "ygrid=20pt", "--set", "cellwidth+=1pt"}, "A \\\\ B");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("parameters").at("ygrid").get<int>(), 20 * 65536);
    EXPECT_EQ(j.at("parameters").at("cellwidth").get<int>(), 1864679 + 559403 + 65536);
}

TEST(Cli, ConfigFileBeforeSet) {
    testkit::TempDir dir("cfg");
    write(dir.path() / "k.conf", "# defaults\nxgrid = 30pt\nlabelpad = 1pt\n");
    const CliRun r = run({"dump", "-", "--config", (dir.path() / "k.conf").string(), "--set", "labelpad=2pt"}, "A");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("parameters").at("xgrid").get<int>(), 30 * 65536);
    EXPECT_EQ(j.at("parameters").at("labelpad").get<int>(), 2 * 65536);
}

TEST(Cli, MultipleInputsIntoDirectory) {
    testkit::TempDir dir("multi");
    std::vector<std::string> args{"compile", "--no-cache", "-o", (dir.path() / "out").string()};
    for (const char* n : {"square.kd", "styles.kd", "diagonals.kd"}) args.push_back((testkit::corpus_dir() / n).string());
    const CliRun r = run(args);
    EXPECT_EQ(r.code, 0) << r.err;
    for (const char* n : {"square.svg", "styles.svg", "diagonals.svg"}) {
        EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / n)) << n;
    }
}

TEST(Cli, CacheStatusVerbose) {
    testkit::TempDir dir("verbose");
    const auto src = dir.path() / "d.kd";
    write(src, "A & \\rTo & B");
    const std::vector<std::string> args{"compile", src.string(), "-v", "--cache-dir", (dir.path() / "cache").string()};
    EXPECT_NE(run(args).err.find("cache miss"), std::string::npos);
    EXPECT_NE(run(args).err.find("cache hit"), std::string::npos);
    write(src, "A  &  \\rTo  &  B  ");
    EXPECT_NE(run(args).err.find("cache hit"), std::string::npos);
    write(src, "A & \\rTo & C");
    EXPECT_NE(run(args).err.find("cache stale"), std::string::npos);
}

TEST(Cli, FlagsReachOutput) {
    const CliRun plain = run({"compile", "-", "--no-cache", "--format", "json"}, "A & \\\\ & B");
    const CliRun dotted = run({"compile", "-", "--no-cache", "--format", "json", "--dotted", "--gridlines"}, "A & \\\\ & B");
    const auto a = nlohmann::json::parse(plain.out).at("items").size();
    const auto b = nlohmann::json::parse(dotted.out).at("items").size();
    EXPECT_EQ(b, a + 2 + 4);
}
