#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "apcircle/bounds.hpp"
#include "apcircle/cli.hpp"
#include "apcircle/errors.hpp"
#include "apcircle/expsums.hpp"
#include "apcircle/verify.hpp"

using namespace apcircle;
using namespace apcircle::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> fields(const std::string& text) {
    std::map<std::string, std::string> m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto pos = line.find(": ");
        if (pos != std::string::npos) m[line.substr(0, pos)] = line.substr(pos + 2);
    }
    return m;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() /
                      ("apcircle_cli_" + std::to_string(::getpid()) + "_" + name);
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST(ParseArgs, CountSpec) {
    const auto spec = parse_args({"count", "--x", "25", "--q", "4", "--a", "1"});
    EXPECT_EQ(spec.subcommand, "count");
    const auto& args = std::get<CountArgs>(spec.args);
    EXPECT_EQ(args.x, 25u);
    EXPECT_EQ(args.q, 4u);
    EXPECT_EQ(args.a, 1);
}

TEST(ParseArgs, NegativeResidueAccepted) {
    const auto spec = parse_args({"count", "--x", "25", "--q", "4", "--a", "-3"});
    EXPECT_EQ(std::get<CountArgs>(spec.args).a, -3);
}

TEST(ParseArgs, UsageErrors) {
    try {
        parse_args({"count", "--x", "-1", "--q", "4", "--a", "1"});
        FAIL() << "expected UsageError";
    } catch (const UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("--x"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_args({"count", "--x", "2.5", "--q", "4", "--a", "1"}), UsageError);
    EXPECT_THROW(parse_args({"count", "--x", "10", "--q", "0", "--a", "1"}), UsageError);
    EXPECT_THROW(parse_args({"count", "--x", "10"}), UsageError);
    EXPECT_THROW(parse_args({"frobnicate"}), UsageError);
    EXPECT_THROW(parse_args({}), UsageError);
    EXPECT_THROW(parse_args({"verify", "--module", "nope"}), UsageError);
    EXPECT_THROW(parse_args({"sweep", "--config", "/nonexistent/cfg.json"}), UsageError);
}

TEST(ParseArgs, SweepConfigLoaded) {
    const auto path = temp_file("cfg.json", R"({"x_values": [10000], "q_values": [1], "a_values": [0],
                                               "workers": 2, "output_path": "out.csv"})");
    const auto spec = parse_args({"sweep", "--config", path.string()});
    const auto& c = std::get<SweepArgs>(spec.args).config;
    EXPECT_EQ(c.x_values, (std::vector<std::uint64_t>{10000}));
    EXPECT_EQ(c.q_rule.values, (std::vector<std::uint64_t>{1}));
    EXPECT_EQ(c.workers, 2u);
    EXPECT_EQ(c.output_path, "out.csv");
    std::filesystem::remove(path);
}

TEST(SweepConfig, JsonValidation) {
    EXPECT_THROW(sweep_config_from_json("{", 1), UsageError);
    EXPECT_THROW(sweep_config_from_json(R"({"x_value": [1]})", 1), UsageError);
    EXPECT_THROW(sweep_config_from_json(R"({"q_rule": "random", "q_count": 3})", 1), UsageError);
    EXPECT_THROW(sweep_config_from_json(R"({"smith_xi": 0.5})", 1), UsageError);
    EXPECT_THROW(sweep_config_from_json(R"({"x_values": [-4]})", 1), UsageError);
    const auto c = sweep_config_from_json(
        R"({"x_values": [1000], "q_rule": "log_spaced", "q_count": 4, "a_rule": "random",
            "a_values": [0, 1], "a_count": 1, "a_seed": 18446744073709551615})",
        3);
    EXPECT_EQ(c.workers, 3u);
    EXPECT_EQ(c.q_rule.kind, bounds::ModulusRule::Kind::log_spaced);
    EXPECT_EQ(*c.a_rule.seed, 18446744073709551615ull);
}

TEST(Run, CountPrintsTotal) {
    const auto o = invoke({"count", "--x", "25", "--q", "4", "--a", "1"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto f = fields(o.out);
    EXPECT_EQ(f.at("total"), "44");
    EXPECT_EQ(f.at("quadrant"), "8");
    EXPECT_EQ(f.at("axis"), "3");
    EXPECT_EQ(f.at("origin"), "0");
    EXPECT_EQ(f.at("eta"), "8");
}

TEST(Run, HsumExample) {
    const auto o = invoke({"hsum", "--q", "5", "--a", "1", "--h", "1", "--n", "1"});
    ASSERT_EQ(o.code, kExitOk);
    const auto f = fields(o.out);
    EXPECT_NEAR(std::stod(f.at("re")), 1.2360680, 1e-7);
    EXPECT_NEAR(std::stod(f.at("im")), 0.0, 1e-7);
    EXPECT_NEAR(std::stod(f.at("bound")), 35.7771, 1e-4);
    EXPECT_EQ(f.at("check"), "OK");
    EXPECT_EQ(invoke({"hsum", "--q", "5", "--a", "1", "--h", "1", "--n", "1", "--direct"}).out.find("check: OK") !=
                  std::string::npos,
              true);
}

TEST(Run, PrintedRealsRoundTrip) {
    const auto o = invoke({"gauss", "--q", "3", "--k", "1"});
    ASSERT_EQ(o.code, kExitOk);
    const auto f = fields(o.out);
    const auto v = expsums::gauss_closed(3, 1, 0);
    EXPECT_EQ(std::stod(f.at("re")), v.real());
    EXPECT_EQ(std::stod(f.at("im")), v.imag());
}

TEST(Run, EtaOmegaKloosterman) {
    EXPECT_EQ(fields(invoke({"eta", "--q", "5", "--a", "1"}).out).at("eta"), "4");
    EXPECT_EQ(fields(invoke({"eta", "--q", "5", "--a", "1", "--method", "brute"}).out).at("eta"), "4");
    EXPECT_EQ(fields(invoke({"omega", "--q", "8", "--a", "1"}).out).at("omega"), "4");
    const auto k = invoke({"kloosterman", "--q", "5", "--k", "1", "--n", "1"});
    EXPECT_EQ(k.code, kExitOk);
    EXPECT_NEAR(std::stod(fields(k.out).at("re")), 0.3819660, 1e-7);
}

TEST(Run, DecomposeReportsResiduals) {
    const auto o = invoke({"decompose", "--x", "100", "--q", "3", "--a", "1"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto f = fields(o.out);
    EXPECT_EQ(f.at("exact_identities"), "OK");
    EXPECT_EQ(f.at("reconstruction"), "OK");
    EXPECT_TRUE(f.count("residual s1_0_reconstruction"));
    EXPECT_EQ(invoke({"decompose", "--x", "1000000000", "--q", "3", "--a", "1"}).code, kExitUsage);
}

TEST(Run, VerifyModule) {
    const auto o = invoke({"verify", "--module", "expsums"});
    EXPECT_EQ(o.code, kExitOk) << o.out;
    const auto f = fields(o.out);
    EXPECT_EQ(f.at("failed"), "0");
    EXPECT_EQ(f.at("seed"), std::to_string(verify::kDefaultSeed));
}

TEST(Run, SweepAndReport) {
    const auto csv = std::filesystem::temp_directory_path() / ("apcircle_cli_" + std::to_string(::getpid()) + ".csv");
    const auto cfg = temp_file("sweep.json", R"({"x_values": [10000, 100000], "q_rule": "log_spaced", "q_count": 4,
        "a_rule": "random", "a_values": [0, 1], "a_count": 1, "a_seed": 7, "output_path": ")" +
                                                 csv.string() + R"("})");
    const auto first = invoke({"sweep", "--config", cfg.string(), "--workers", "1"});
    ASSERT_EQ(first.code, kExitOk) << first.err;
    std::ifstream in(csv);
    std::stringstream bytes_one;
    bytes_one << in.rdbuf();
    in.close();
    const auto second = invoke({"sweep", "--config", cfg.string(), "--workers", "3"});
    ASSERT_EQ(second.code, kExitOk);
    std::ifstream in2(csv);
    std::stringstream bytes_two;
    bytes_two << in2.rdbuf();
    EXPECT_EQ(bytes_one.str(), bytes_two.str());
    EXPECT_EQ(first.out, second.out);

    const auto report = invoke({"report", "--input", csv.string()});
    ASSERT_EQ(report.code, kExitOk) << report.err;
    EXPECT_NE(report.out.find("bound tolev"), std::string::npos);

    const auto to_stdout = invoke({"sweep", "--config", cfg.string(), "--output", ""});
    EXPECT_EQ(to_stdout.out, bytes_one.str());
    std::filesystem::remove(csv);
    std::filesystem::remove(cfg);
}

TEST(Run, EmptySweepSucceeds) {
    const auto cfg = temp_file("empty.json", R"({"x_values": []})");
    const auto o = invoke({"sweep", "--config", cfg.string()});
    EXPECT_EQ(o.code, kExitOk);
    EXPECT_EQ(o.out, std::string(bounds::kCsvHeader) + "\n");
    std::filesystem::remove(cfg);
}

TEST(Run, HelpExitsCleanly) {
    const auto o = invoke({"--help"});
    EXPECT_EQ(o.code, kExitOk);
    EXPECT_NE(o.out.find("count"), std::string::npos);
}

TEST(Binary, ExitCodes) {
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(APCIRCLE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    EXPECT_EQ(status("count --x 25 --q 4 --a 1"), 0);
    EXPECT_EQ(status("count --x -1"), 2);
    EXPECT_EQ(status("count --x 10 --q 20000000 --a 1"), 2);
    EXPECT_EQ(status("verify --module all"), 0);
}

TEST(Binary, WorkersFromEnvironment) {
    ::setenv("APCIRCLE_WORKERS", "3", 1);
    EXPECT_EQ(default_workers(), 3u);
    ::setenv("APCIRCLE_WORKERS", "zero", 1);
    EXPECT_GE(default_workers(), 1u);
    ::unsetenv("APCIRCLE_WORKERS");
}
