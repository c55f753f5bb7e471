#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lo/cli.hpp"
#include "lo/engine.hpp"

using namespace lo;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return std::string(LO_SPEC_DIR) + "/" + name; }

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::string temp_file(const std::string& name, const std::string& text) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

} // namespace

TEST(Cli, ParsePrints) {
    auto r = run({"parse", spec("testlock.lo")});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_NE(r.out.find("init <- init | think."), std::string::npos);
    EXPECT_NE(r.out.find("quantified-rewrite-rule"), std::string::npos);
}

TEST(Cli, MissingFile) {
    auto r = run({"parse", spec("no_such_file.lo")});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ParseErrorHasPosition) {
    std::string path = temp_file("lo_cli_bad.lo", "p(x <- q.\n");
    auto r = run({"fixpoint", path});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find(path + ":1:5"), std::string::npos) << r.err;
    EXPECT_EQ(r.out.find("SAFE"), std::string::npos);
}

TEST(Cli, UnknownSubcommand) { EXPECT_EQ(run({"frobnicate"}).code, kExitUsage); }

TEST(Cli, BadGoal) {
    auto r = run({"check", spec("testlock.lo"), "--goal", "init |"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("goal:"), std::string::npos);
}

TEST(Cli, FixpointTestAndLock) {
    auto r = run({"fixpoint", spec("testlock.lo")});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_NE(r.out.find("facts: 12"), std::string::npos);
    EXPECT_NE(r.out.find("terminated: yes"), std::string::npos);
}

TEST(Cli, Strengthen) {
    auto r = run({"fixpoint", spec("testlock.lo"), "--strengthen", spec("inv9.lo")});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_NE(r.out.find("facts: 6"), std::string::npos);
}

TEST(Cli, EmptyProgram) {
    auto r = run({"fixpoint", spec("empty.lo")});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_NE(r.out.find("facts: 0"), std::string::npos);
    EXPECT_NE(r.out.find("rounds: 0"), std::string::npos);
}

TEST(Cli, Monadize) {
    auto r = run({"fixpoint", spec("testlock.lo"), "--monadize"});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_NE(r.out.find("m_unlocked"), std::string::npos);
    EXPECT_NE(r.out.find("monadic: yes"), std::string::npos);
}

TEST(Cli, CheckSafe) {
    auto r = run({"check", spec("testlock.lo"), "--goal", "init"});
    EXPECT_EQ(r.code, kExitSafe);
    EXPECT_TRUE(starts_with(r.out, "SAFE"));
}

TEST(Cli, CheckViolationWithTrace) {
    auto r = run({"check", spec("testlock_flawed.lo"), "--goal", "init", "--trace", "--validate"});
    EXPECT_EQ(r.code, kExitViolation);
    EXPECT_TRUE(starts_with(r.out, "VIOLATION"));
    EXPECT_NE(r.out.find("1*, 2*, 4*, 6*, 8"), std::string::npos);
    EXPECT_NE(r.out.find("validated: yes"), std::string::npos);
}

TEST(Cli, CheckTopIsViolation) {
    auto r = run({"check", spec("testlock.lo"), "--goal", "top"});
    EXPECT_EQ(r.code, kExitViolation);
    EXPECT_TRUE(starts_with(r.out, "VIOLATION"));
}

TEST(Cli, OracleExitCodes) {
    auto found = run({"oracle", spec("universal_goal.lo"), "--goal", "s(a)", "--depth", "6"});
    EXPECT_EQ(found.code, kExitViolation);
    EXPECT_NE(found.out.find("forall"), std::string::npos);
    auto shallow = run({"oracle", spec("universal_goal.lo"), "--goal", "s(a)", "--depth", "1"});
    EXPECT_EQ(shallow.code, kExitUnknown);
}

TEST(Cli, JsonRoundTrip) {
    auto r = run({"fixpoint", spec("worked_fixpoint.lo"), "--json"});
    ASSERT_EQ(r.code, kExitSafe);
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_TRUE(doc["terminated"].get<bool>());
    std::set<Fact> got;
    for (const auto& f : doc["facts"]) {
        std::string text;
        for (const auto& a : f) text += (text.empty() ? "" : " | ") + a.get<std::string>();
        got.insert(parse_fact(text));
    }
    std::set<Fact> want;
    std::ifstream in(spec("worked_fixpoint.lo"));
    std::stringstream ss;
    ss << in.rdbuf();
    for (const auto& f : fixpoint(parse_program(ss.str())).interpretation.facts) want.insert(canonicalize(f));
    EXPECT_EQ(got, want);
}

TEST(Cli, RoundCapFromEnvironment) {
    ::setenv("LO_MAX_ROUNDS", "1", 1);
    auto r = run({"fixpoint", spec("testlock.lo")});
    auto c = run({"check", spec("testlock.lo"), "--goal", "init"});
    ::unsetenv("LO_MAX_ROUNDS");
    EXPECT_EQ(r.code, kExitUnknown);
    EXPECT_NE(r.out.find("terminated: no"), std::string::npos);
    EXPECT_EQ(c.code, kExitUnknown);
    EXPECT_EQ(c.out.find("SAFE"), std::string::npos);
    EXPECT_EQ(run({"fixpoint", spec("testlock.lo")}).code, kExitSafe);
}

TEST(Cli, RoundCapFlag) {
    EXPECT_EQ(run({"fixpoint", spec("msr_example.lo"), "--max-rounds", "3"}).code, kExitUnknown);
}
