#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "pupilcover/cli.hpp"
#include "pupilcover/io.hpp"

using namespace pupilcover;
namespace fs = std::filesystem;

namespace {

const fs::path fixtures = PUPILCOVER_FIXTURES;

struct Run {
    int code = -1;
    std::string out, err;
    json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string fixture(const char* name) { return (fixtures / name).string(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
    return n;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("pupilcover_test_" + name); }

} // namespace

TEST(CliDecide, ExitCodes) {
    auto r = run({"decide", fixture("single_covered.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["schema"], 1);
    EXPECT_EQ(r.report()["result"]["covered"], true);

    r = run({"decide", fixture("single_uncovered.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(r.report()["result"]["witness"].is_array());

    r = run({"decide", fixture("negative_radius.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("pupils[0].r"), std::string::npos);

    EXPECT_EQ(run({"decide", fixture("unknown_key.json")}).code, 2);
    EXPECT_EQ(run({"decide", fixture("shifted.json")}).code, 2);
    EXPECT_EQ(run({"decide", fixture("missing.json")}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(CliReports, AlphaAndMaxobj) {
    auto r = run({"alpha", fixture("single_uncovered.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_DOUBLE_EQ(r.report()["result"]["alpha_star"].get<double>(), 0.4);
    EXPECT_EQ(r.report()["command"], "alpha");
    EXPECT_EQ(r.report()["input_digest"].get<std::string>().rfind("fnv1a64:", 0), 0u);

    r = run({"maxobj", fixture("single_uncovered.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_DOUBLE_EQ(r.report()["result"]["r_star"].get<double>(), 0.6);
}

TEST(CliReports, OptimizersAndFailures) {
    auto r = run({"minsum", fixture("single_uncovered.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(r.report()["result"]["trace"]["final_config"]["pupils"][0]["r"].get<double>(), 0.5, 1e-9);

    r = run({"minsum", "--area", fixture("wide.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["result"]["objective"], "area");

    r = run({"minsum", "--max-radius", "0.01", fixture("wide.json")});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(r.report()["error"]["code"], "Infeasible");
    EXPECT_TRUE(r.report()["result"]["trace"].contains("final_config"));

    r = run({"minarea", "--max-iterations", "1", fixture("wide.json")});
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(r.report()["error"]["code"], "IterationLimit");

    r = run({"move", "--iterations", "3", fixture("five.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["result"]["trace"]["iterations"].size(), 3u);

    r = run({"exhaustive", "--theta", "0.1", fixture("single_uncovered.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NEAR(r.report()["result"]["sum_of_radii"].get<double>(), 0.5, 1e-12);

    r = run({"exhaustive", "--theta", "0.001", fixture("five.json")});
    EXPECT_EQ(r.code, 2);

    EXPECT_EQ(run({"minsum", "--epsilon", "-1", fixture("wide.json")}).code, 2);
}

TEST(CliDesign, ThreeAndPrime) {
    auto r = run({"design-three", "--objective-radius", "2"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["result"]["config"]["pupils"][0]["r"], 1.0);

    r = run({"design-prime", "--objective-radius", "4", "--pupil-radius", "0.70710678"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.report()["result"]["pupil_count"], 64);
    EXPECT_EQ(r.report()["result"]["p"], 2);
    EXPECT_EQ(r.report()["result"]["upper_bound_formula"], 64.0);

    EXPECT_EQ(run({"design-prime", "--objective-radius", "1", "--pupil-radius", "0.9"}).code, 2);
}

TEST(CliOut, WritesFileOrFailsCleanly) {
    const auto path = temp_path("report.json");
    fs::remove(path);
    auto r = run({"decide", fixture("single_covered.json"), "--out", path.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(json::parse(slurp(path))["result"]["covered"], true);
    fs::remove(path);

    r = run({"decide", fixture("single_covered.json"), "--out", "/nonexistent-dir/report.json"});
    EXPECT_EQ(r.code, 2);
}

TEST(CliRender, ThreePupilSvg) {
    const auto a = temp_path("a.svg"), b = temp_path("b.svg");
    ASSERT_EQ(run({"render", fixture("three_optimal.json"), "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"render", fixture("three_optimal.json"), "--out", b.string()}).code, 0);
    const std::string svg = slurp(a);
    EXPECT_EQ(svg, slurp(b));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
    EXPECT_EQ(count(svg, "class=\"objective\""), 1u);
    EXPECT_EQ(count(svg, "class=\"pupil\""), 3u);
    EXPECT_EQ(count(svg, "class=\"acs\""), build_acs(parse_config(slurp(fixture("three_optimal.json"))).config).size());
    EXPECT_GT(count(svg, "class=\"vertex\""), 0u);
    fs::remove(a);
    fs::remove(b);

    EXPECT_EQ(run({"render", fixture("empty.json"), "--out", a.string()}).code, 2);
    EXPECT_EQ(run({"render", fixture("three_optimal.json"), "--out", "/nonexistent-dir/x.svg"}).code, 2);
    EXPECT_EQ(run({"render", fixture("three_optimal.json"), "--out", a.string(), "--layers", "bogus"}).code, 2);
}

TEST(ConfigIo, RoundTripIsExact) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(-1, 1), r(0, 0.5);
    for (int trial = 0; trial < 50; ++trial) {
        ConfigFile file;
        file.config.objective_radius = 0.5 + r(rng);
        for (int k = 0; k < 1 + trial % 6; ++k) file.config.pupils.push_back({{u(rng), u(rng)}, r(rng)});
        file.options.epsilon = r(rng) + 1e-9;
        file.options.max_radius = 0.1 + r(rng);
        file.settings.tau = 1e-10;
        const ConfigFile back = parse_config(to_json(file).dump());
        ASSERT_EQ(back.config.size(), file.config.size());
        EXPECT_EQ(back.config.objective_radius, file.config.objective_radius);
        for (std::size_t k = 0; k < file.config.size(); ++k) {
            EXPECT_EQ(back.config.pupils[k].center, file.config.pupils[k].center);
            EXPECT_EQ(back.config.pupils[k].radius, file.config.pupils[k].radius);
        }
        EXPECT_EQ(back.options.epsilon, file.options.epsilon);
        EXPECT_EQ(back.options.max_radius, file.options.max_radius);
        EXPECT_EQ(back.settings.tau, file.settings.tau);
        EXPECT_EQ(to_json(back).dump(), to_json(file).dump());
    }
}

TEST(ConfigIo, ReportsOffendingField) {
    try {
        parse_config(R"({"objective_radius": 1, "pupils": [{"x": 0, "y": "a", "r": 1}]})");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("pupils[0].y"), std::string::npos);
    }
    EXPECT_THROW(parse_config("{"), Error);
    EXPECT_THROW(parse_config(R"({"objective_radius": 1, "pupils": [{"x":0,"y":0,"r":0}], "options": {"gauge": "x"}})"),
                 Error);
}

// The installed binary honours the same contract as the in-process entry point.
TEST(CliBinary, ExitCodes) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(PUPILCOVER_BIN) + " " + args + " >/dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("decide " + fixture("single_covered.json")), 0);
    EXPECT_EQ(status("decide " + fixture("single_uncovered.json")), 1);
    EXPECT_EQ(status("decide " + fixture("negative_radius.json")), 2);
    EXPECT_EQ(status("minsum --max-radius 0.01 " + fixture("wide.json")), 3);
    EXPECT_EQ(status("--help"), 0);
}
