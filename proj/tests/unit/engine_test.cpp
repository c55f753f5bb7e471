#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lo/engine.hpp"
#include "oracles.hpp"

using namespace lo;
namespace lt = lo::testing;

namespace {

Program load(const std::string& name) {
    std::ifstream in(std::string(LO_SPEC_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

Interpretation interp(std::initializer_list<const char*> facts) {
    Interpretation i;
    for (const char* f : facts) i.facts.push_back(canonicalize(parse_fact(f)));
    return i;
}

std::set<Fact> canon(const Interpretation& i) {
    std::set<Fact> out;
    for (const auto& f : i.facts) out.insert(canonicalize(f));
    return out;
}

Interpretation step_facts(const std::vector<ProvenanceRecord>& recs) {
    Interpretation i;
    for (const auto& r : recs) i.facts.push_back(r.fact);
    return i;
}

Clusters groups(const std::vector<std::string>& words) {
    Clusters out;
    for (const auto& w : words) {
        std::vector<std::string> g;
        for (char ch : w) g.emplace_back(1, ch);
        std::sort(g.begin(), g.end());
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(SpStep, FirstRounds) {
    Program p = load("worked_fixpoint.lo");
    NameSupply names;
    Interpretation i1 = step_facts(sp_step(p, Interpretation{}, names));
    EXPECT_EQ(canon(i1), canon(interp({"{p(X), q(X)}"})));

    auto recs = sp_step(p, i1, names);
    bool found = false;
    for (const auto& r : recs)
        if (r.fact == canonicalize(parse_fact("{r(W), p(f(W))}"))) {
            found = true;
            EXPECT_EQ(r.clause_label, "1");
            ASSERT_EQ(r.used_facts.size(), 1u);
            EXPECT_EQ(r.used_facts[0], i1.facts[0]);
        }
    EXPECT_TRUE(found);
}

TEST(SpStep, NeedsTopClause) {
    NameSupply names;
    EXPECT_TRUE(sp_step(parse_program("p(X) <- q(X).\nq(a) <- p(a) & p(b)."), Interpretation{}, names).empty());
}

TEST(SpStep, ProvenanceReplays) {
    Program p = load("worked_fixpoint.lo");
    NameSupply names;
    Interpretation i = step_facts(sp_step(p, Interpretation{}, names));
    i = reduce(Interpretation{[&] {
        auto f = i.facts;
        for (const auto& r : sp_step(p, i, names)) f.push_back(r.fact);
        return f;
    }()});
    for (const auto& r : sp_step(p, i, names)) {
        EXPECT_EQ(apply(r.raw, r.canon), r.fact);
        EXPECT_TRUE(submultiset(apply(r.variant.head, r.theta), r.raw));
        for (const auto& u : r.used_facts) EXPECT_TRUE(std::count(i.facts.begin(), i.facts.end(), u));
    }
}

TEST(SpStep, Monotone) {
    lt::Rng rng(41);
    lt::Vocab v{{"a", "b"}, {}, {{"p", 1}, {"q", 1}, {"r", 0}}};
    StepOptions no_prune;
    no_prune.asat.prune_trivial = false;
    for (int n = 0; n < 100; ++n) {
        Program p = parse_program(lt::random_program_text(rng, v, 3, 0));
        Interpretation i1, i2;
        std::size_t k = 1 + rng.below(3);
        for (std::size_t j = 0; j < k; ++j) {
            Fact f = canonicalize(lt::random_fact(rng, v, {"X", "Y"}, 3, 0));
            i1.facts.push_back(f);
            std::vector<Atom> as(f.begin(), f.end());
            if (as.size() > 1 && rng.chance(0.5)) as.erase(as.begin() + rng.below(as.size()));
            i2.facts.push_back(canonicalize(Fact(as)));
        }
        ASSERT_TRUE(entails_interp(i1, i2));
        NameSupply names;
        auto s1 = step_facts(sp_step(p, i1, names, no_prune));
        auto s2 = step_facts(sp_step(p, i2, names, no_prune));
        EXPECT_TRUE(entails_interp(s1, s2)) << print(p);
    }
}

TEST(Reduce, SubsumedFactGoes) {
    Interpretation got = reduce(interp({"{p(X), q(X)}", "{r(Y), p(f(Y))}", "{p(f(Y1))}"}));
    EXPECT_EQ(canon(got), canon(interp({"{p(X), q(X)}", "{p(f(Y1))}"})));
}

TEST(Reduce, AntichainUnchanged) {
    Interpretation i = interp({"{p(X), q(X)}", "{p(f(Y))}", "{s(Z)}"});
    EXPECT_EQ(reduce(i).facts, i.facts);
}

TEST(Reduce, VariantsCollapse) {
    Interpretation i{{parse_fact("{p(X)}"), parse_fact("{p(Y)}")}};
    Interpretation got = reduce(i);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got.facts[0], i.facts[0]);
}

TEST(Reduce, PreservesDenotation) {
    lt::Rng rng(42);
    lt::Vocab v{{"a", "b"}, {"f"}, {{"p", 1}, {"q", 1}}};
    for (int n = 0; n < 300; ++n) {
        Interpretation i;
        std::size_t k = 1 + rng.below(5);
        for (std::size_t j = 0; j < k; ++j) i.facts.push_back(canonicalize(lt::random_fact(rng, v, {"X", "Y"}, 3, 1)));
        Interpretation r = reduce(i);
        EXPECT_TRUE(entails_interp(i, r));
        EXPECT_TRUE(entails_interp(r, i));
        for (std::size_t a = 0; a < r.size(); ++a)
            for (std::size_t b = 0; b < r.size(); ++b)
                if (a != b) EXPECT_FALSE(entails_fact(r.facts[a], r.facts[b]));
    }
}

TEST(Fixpoint, WorkedExample) {
    auto r = fixpoint(load("worked_fixpoint.lo"));
    EXPECT_TRUE(r.terminated);
    EXPECT_FALSE(r.monadic_guarantee);
    EXPECT_EQ(canon(r.interpretation), canon(interp({"{p(X), q(X)}", "{p(f(Y))}", "{s(Z)}"})));
    EXPECT_EQ(r.provenance.size(), r.interpretation.size());
    for (std::size_t k = 0; k < r.provenance.size(); ++k)
        EXPECT_EQ(r.archive.at(r.provenance[k]).fact, r.interpretation.facts[k]);
}

TEST(Fixpoint, TestAndLockSizes) {
    EXPECT_EQ(fixpoint(load("testlock.lo")).interpretation.size(), 12u);
    auto r = fixpoint(merge_programs(load("testlock.lo"), load("inv9.lo")));
    EXPECT_TRUE(r.terminated);
    EXPECT_EQ(r.interpretation.size(), 6u);
}

TEST(Fixpoint, EmptyProgram) {
    auto r = fixpoint(load("empty.lo"));
    EXPECT_TRUE(r.terminated);
    EXPECT_TRUE(r.interpretation.empty());
}

TEST(Fixpoint, RoundCap) {
    // p(a), p(f(a)), ... never stabilizes
    FixpointOptions opts;
    opts.max_rounds = 5;
    auto r = fixpoint(parse_program("p(a) <- top.\np(f(X)) <- p(X)."), opts);
    EXPECT_FALSE(r.terminated);
    EXPECT_EQ(r.rounds, 5u);
}

TEST(Fixpoint, DeltaAgreesWithFull) {
    // msr_example grows forever; the cap keeps it short
    FixpointOptions full, delta;
    full.max_rounds = delta.max_rounds = 30;
    delta.delta = true;
    for (const auto& e : std::filesystem::recursive_directory_iterator(LO_SPEC_DIR)) {
        if (e.path().extension() != ".lo") continue;
        auto rel = std::filesystem::relative(e.path(), LO_SPEC_DIR).string();
        Program p = load(rel);
        auto base = fixpoint(p, full);
        auto fast = fixpoint(p, delta);
        ASSERT_EQ(base.terminated, fast.terminated) << rel;
        EXPECT_TRUE(entails_interp(base.interpretation, fast.interpretation)) << rel;
        EXPECT_TRUE(entails_interp(fast.interpretation, base.interpretation)) << rel;
    }
}

TEST(Fixpoint, NoEigenvariablesInFacts) {
    auto r = fixpoint(load("testlock.lo"));
    for (const auto& f : r.interpretation.facts)
        for (const auto& a : f)
            for (const auto& t : a.args) EXPECT_NE(t.kind, TermKind::Eigen) << print(f);
}

TEST(CheckGoal, Examples) {
    auto r5 = fixpoint(load("worked_fixpoint.lo"));
    EXPECT_TRUE(check_goal(r5, parse_goal("s(a)")));
    EXPECT_TRUE(check_goal(r5, Goal::top()));
    EXPECT_TRUE(check_goal(FixpointResult{}, Goal::top()));
    EXPECT_FALSE(check_goal(fixpoint(load("testlock.lo")), parse_goal("init")));
    auto w = check_goal(fixpoint(load("testlock_flawed.lo")), parse_goal("init"));
    ASSERT_TRUE(w);
    EXPECT_TRUE(w->output.out.empty());
    ASSERT_EQ(w->used_facts.size(), 1u);
    EXPECT_EQ(w->used_facts[0], parse_fact("{init}"));
}

TEST(Trace, FlawedTestAndLock) {
    Program p = load("testlock_flawed.lo");
    auto r = fixpoint(p);
    Trace t = extract_trace(p, r, parse_goal("init"));
    EXPECT_EQ(step_summary(t), (std::vector<std::string>{"1*", "2*", "4*", "6*", "8"}));
    EXPECT_FALSE(check_proof(p, t.proof, t.fresh_constants));
    for (const auto& c : t.fresh_constants) EXPECT_EQ(c[0], 'k');
    Prover prover(p);
    EXPECT_TRUE(prover.prove(t.proof.sequent, bc_depth(t.proof)));
}

TEST(Trace, SingleStep) {
    Program p = load("testlock.lo");
    auto r = fixpoint(p);
    Trace t = extract_trace(p, r, parse_goal("use(a) | use(a)"));
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(step_summary(t), std::vector<std::string>{"8"});
    EXPECT_FALSE(check_proof(p, t.proof));
}

TEST(Monadic, Diagnostics) {
    auto tl = is_monadic(load("testlock.lo"));
    EXPECT_FALSE(tl.monadic);
    ASSERT_FALSE(tl.diagnostics.empty());
    bool hint = false;
    for (const auto& d : tl.diagnostics) hint |= d.find("m/2") != std::string::npos && d.find("monadize") != std::string::npos;
    EXPECT_TRUE(hint);
    EXPECT_FALSE(is_monadic(load("worked_fixpoint.lo")).monadic);
    EXPECT_TRUE(is_monadic(parse_program("p(a) | q <- r(X).")).monadic);
}

TEST(Monadize, TestAndLock) {
    auto m = monadize(load("testlock.lo"));
    ASSERT_TRUE(m.applicable) << m.reason;
    EXPECT_TRUE(is_monadic(m.program).monadic);
    std::map<std::string, std::size_t> want{{"m_locked", 1}, {"m_unlocked", 1}, {"wait", 1},
                                            {"use", 1},      {"think", 0},      {"init", 0}};
    EXPECT_EQ(m.program.signature.predicates, want);
    auto r = fixpoint(m.program);
    EXPECT_TRUE(r.terminated);
    EXPECT_TRUE(r.monadic_guarantee);
    EXPECT_EQ(r.interpretation.size(), 12u);
    EXPECT_EQ(fold_fact(m, parse_fact("{m(X, locked)}")), parse_fact("{m_locked(X)}"));
    EXPECT_EQ(fold_goal(m, parse_goal("init")), parse_goal("init"));
}

TEST(Monadize, AlreadyMonadic) {
    Program p = parse_program("p(X) <- q(X).\nq(a) <- top.");
    auto m = monadize(p);
    ASSERT_TRUE(m.applicable);
    EXPECT_EQ(print(m.program), print(p));
}

TEST(Monadize, VariablePositionBlocks) {
    auto m = monadize(parse_program("m(X, Y) <- w(X) | m(X, locked).\nw(X) <- top."));
    EXPECT_FALSE(m.applicable);
    EXPECT_EQ(m.blocking_predicate, "m");
    EXPECT_EQ(m.blocking_position, 2u);
}

TEST(Cluster, Examples) {
    auto m = parse_fact("p(X1) | q(X1) | p(X1) | q(X2) | r(X2) | q(X3) | r(X3)");
    EXPECT_EQ(cluster(m), groups({"ppq", "qr", "qr"}));
    EXPECT_TRUE(cluster(Fact{}).empty());
    EXPECT_EQ(cluster(parse_fact("{p(X)}")), groups({"p"}));
    EXPECT_THROW(cluster(parse_fact("{q(X, Y)}")), std::invalid_argument);
    EXPECT_THROW(cluster(parse_fact("{q(f(X))}")), std::invalid_argument);
}

TEST(Cluster, Inclusion) {
    EXPECT_TRUE(entails_cluster(groups({"ppp", "tt", "qq", "rrr"}), groups({"pp", "q", "rr"})));
    EXPECT_FALSE(entails_cluster(groups({"ppp", "rr", "t", "qq"}), groups({"pq", "q", "rr"})));
    auto s = groups({"ppq", "qr"});
    EXPECT_TRUE(entails_cluster(s, s));
}

TEST(Cluster, SoundForEntailment) {
    lt::Rng rng(43);
    lt::Vocab v{{}, {}, {{"p", 1}, {"q", 1}, {"r", 1}}};
    std::size_t positives = 0;
    for (int n = 0; n < 2000; ++n) {
        Fact a = lt::random_fact(rng, v, {"X", "Y", "Z"}, 5, 0);
        Fact b = lt::random_fact(rng, v, {"U", "W"}, 3, 0);
        if (!entails_cluster(cluster(a), cluster(b))) continue;
        ++positives;
        EXPECT_TRUE(entails_fact(a, b)) << print(a) << " / " << print(b);
    }
    EXPECT_GT(positives, 50u);
}
