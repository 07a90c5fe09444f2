#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "dptkit/json_io.hpp"

using namespace dptkit;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run cli(const std::string& args) {
    Run r;
    const std::string cmd = std::string("\"") + DPTKIT_CLI_PATH + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string temp_file(const std::string& name, const std::string& text) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST(GameJson, RoundTripsBuiltins) {
    for (const char* name : {"chsh", "magic_square", "mse"}) {
        const auto g = builtin_game(name);
        const auto h = game_from_json(game_to_json(g));
        ASSERT_EQ(h.num_inputs(), g.num_inputs());
        ASSERT_EQ(h.num_outputs(), g.num_outputs());
        for (std::size_t i = 0; i < g.num_inputs(); ++i) EXPECT_DOUBLE_EQ(h.prob(i), g.prob(i));
        for (std::size_t o = 0; o < g.num_outputs(); ++o)
            for (std::size_t i = 0; i < g.num_inputs(); ++i) ASSERT_EQ(h.wins(o, i), g.wins(o, i));
        EXPECT_DOUBLE_EQ(classical_value(h).value, classical_value(g).value);
    }
}

TEST(GameJson, BuiltinNameWithCustomDistribution) {
    json j{{"V", "chsh"}, {"p", {0.5, 0.5, 0.0, 0.0}}};
    const auto g = game_from_json(j);
    EXPECT_DOUBLE_EQ(classical_value(g).value, 1.0);
}

TEST(GameJson, RejectsMalformed) {
    EXPECT_THROW(game_from_json(json{{"inputs", {{"0"}}}}), DomainError);
    EXPECT_THROW(game_from_json(json{{"V", "nope"}}), DomainError);
    const auto bad = json::parse(R"({"inputs":[["0","1"]],"outputs":[["0","1"]],"p":[0.5,0.5],"V":[1,0,2,1]})");
    EXPECT_THROW(game_from_json(bad), DomainError);
    const auto short_v = json::parse(R"({"inputs":[["0","1"]],"outputs":[["0","1"]],"p":[0.5,0.5],"V":[1,0,1]})");
    EXPECT_THROW(game_from_json(short_v), DimensionError);
}

TEST(AdversaryJson, Parses) {
    const auto s = adversary_from_json(json::parse(
        R"({"rounds":[{"from":"alice_box","to":"bob_box","bits":4,"function_id":"alice_inputs"},
                      {"from":"eve","to":"alice_box","bits":1,"function_id":"random","after_outputs":true}]})"));
    ASSERT_EQ(s.rounds.size(), 2u);
    EXPECT_EQ(s.rounds[0].bits, 4u);
    EXPECT_EQ(s.rounds[0].to, Party::bob_box);
    EXPECT_TRUE(s.rounds[1].after_outputs);
    EXPECT_THROW(adversary_from_json(json::parse(R"({"rounds":[{"from":"x","to":"eve","bits":1,"function_id":"random"}]})")),
                 DomainError);
    EXPECT_THROW(adversary_from_json(json::parse(R"({"rounds":[{"from":"eve","to":"bob","bits":1,"function_id":"steal"}]})")),
                 DomainError);
}

TEST(Cli, MagicSquareClassicalValue) {
    const auto r = cli("game value --builtin magic_square --method classical");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["value"].get<double>(), 8.0 / 9.0, 1e-12);
}

TEST(Cli, GameFileMatchesBuiltin) {
    const auto path = temp_file("chsh.json", game_to_json(chsh()).dump());
    const auto r = cli("game value --game \"" + path + "\"");
    ASSERT_EQ(r.code, 0);
    EXPECT_DOUBLE_EQ(json::parse(r.out)["value"].get<double>(), 0.75);
}

TEST(Cli, RateSubstitution) {
    const auto r = cli("diqkd rate --delta 0 --c 0 --gamma 0 --PrE 1 --alpha 0.04 --nu 0.5 --beta 1 --n 1000");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(json::parse(r.out)["rate_bits"].get<double>(), 0.04 * (0.5 - 0.2) * 1000, 1e-9);
}

TEST(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("frobnicate").code, 1);
    EXPECT_EQ(cli("game value").code, 1);
    EXPECT_EQ(cli("game value --builtin magic_square --method quantum").code, 1);
    EXPECT_EQ(cli("diqkd rate --delta 0.3").code, 1);
    EXPECT_EQ(cli("game value --game /nonexistent/file.json").code, 1);
}

TEST(Cli, ComputationErrorsExitTwo) {
    EXPECT_EQ(cli("dpt bound case-ii --c 0.5 --eff 10").code, 2);
    EXPECT_EQ(cli("dpt probe --builtin magic_square --n 2 --mode exhaustive --budget 10").code, 2);
    const auto script = temp_file("overrun.json",
                                  R"({"rounds":[{"from":"eve","to":"bob_box","bits":50,"function_id":"random"}]})");
    EXPECT_EQ(cli("diqkd run --n 100 --c 0.1 --adversary \"" + script + "\"").code, 2);
}

TEST(Cli, SweepCsvShape) {
    const auto r = cli("diqkd sweep --alpha 0.1,0.2 --gamma 0.01,0.02 --n 1000");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), kSweepHeader);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST(Cli, OutFlagWritesFile) {
    const std::string path = ::testing::TempDir() + "rate.json";
    const auto r = cli("--out \"" + path + "\" diqkd rate");
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    EXPECT_TRUE(json::parse(in).contains("eps_smooth"));
}

TEST(Cli, SeedChangesStochasticOutput) {
    const auto a = cli("--seed 1 diqkd run --n 300 --delta 0.1");
    const auto b = cli("--seed 2 diqkd run --n 300 --delta 0.1");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, cli("--seed 1 diqkd run --n 300 --delta 0.1").out);
    EXPECT_NE(a.out, b.out);
}
