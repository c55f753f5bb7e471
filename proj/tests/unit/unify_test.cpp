#include <gtest/gtest.h>

#include "lo/syntax.hpp"
#include "lo/unify.hpp"
#include "oracles.hpp"

using namespace lo;
namespace lt = lo::testing;

namespace {

Atom atom(const std::string& text) { return parse_fact(text)[0]; }

bool equivalent(const Substitution& a, const Substitution& b, const VarSet& vars) {
    return more_general(a, b, vars) && more_general(b, a, vars);
}

} // namespace

TEST(Mgu, BindsToStructure) {
    auto s = mgu(atom("q(X1)"), atom("q(f(W1))"));
    ASSERT_TRUE(s);
    EXPECT_EQ(*s, (Substitution{{"X1", Term::apply("f", {Term::var("W1")})}}));
}

TEST(Mgu, IdenticalGivesEmpty) {
    auto s = mgu(atom("p(X)"), atom("p(X)"));
    ASSERT_TRUE(s);
    EXPECT_TRUE(s->empty());
}

TEST(Mgu, ClashFails) { EXPECT_FALSE(mgu(atom("p(a)"), atom("p(b)"))); }

TEST(Mgu, OccursCheck) { EXPECT_FALSE(mgu(Term::var("X"), Term::apply("f", {Term::var("X")}))); }

TEST(Mgu, EigenvariableIsRigid) {
    Term c = Term::eigen("_c");
    EXPECT_FALSE(mgu(c, Term::constant("a")));
    EXPECT_FALSE(mgu(c, Term::eigen("_d")));
    EXPECT_TRUE(mgu(c, c));
    auto s = mgu(Term::var("X"), c);
    ASSERT_TRUE(s);
    EXPECT_EQ(apply(Term::var("X"), *s), c);
}

TEST(Mgu, AgreesWithRobinson) {
    lt::Rng rng(21);
    lt::Vocab v{{"a", "b"}, {"f", "g"}, {{"p", 2}}};
    std::size_t unified = 0;
    for (int n = 0; n < 2000; ++n) {
        Atom x = lt::random_atom(rng, v, {"X", "Y", "Z"}, 2);
        Atom y = lt::random_atom(rng, v, {"X", "Y", "W"}, 2);
        auto ours = mgu(x, y);
        std::vector<std::pair<Term, Term>> eqs;
        for (std::size_t i = 0; i < x.args.size(); ++i) eqs.emplace_back(x.args[i], y.args[i]);
        auto theirs = lt::naive_unify(eqs);
        ASSERT_EQ(ours.has_value(), theirs.has_value()) << to_string(x) << " " << to_string(y);
        if (!ours) continue;
        ++unified;
        EXPECT_EQ(apply(x, *ours), apply(y, *ours));
        EXPECT_TRUE(ours->is_idempotent());
        VarSet vs;
        collect_vars(x, vs);
        collect_vars(y, vs);
        // both are most general, so each is an instance of the other
        EXPECT_TRUE(lt::instance_on(lt::to_binding(*ours), *theirs, vs));
        EXPECT_TRUE(lt::instance_on(*theirs, lt::to_binding(*ours), vs));
    }
    EXPECT_GT(unified, 100u);
}

TEST(MguMultisets, Singleton) {
    auto got = mgu_multisets(parse_fact("{q(X1)}"), parse_fact("{q(f(W1))}"));
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0], (Substitution{{"X1", Term::apply("f", {Term::var("W1")})}}));
}

TEST(MguMultisets, EmptyPair) {
    auto got = mgu_multisets(Fact{}, Fact{});
    ASSERT_EQ(got.size(), 1u);
    EXPECT_TRUE(got[0].empty());
}

TEST(MguMultisets, TwoBijections) {
    auto got = mgu_multisets(parse_fact("{p(X), p(Y)}"), parse_fact("{p(a), p(b)}"));
    ASSERT_EQ(got.size(), 2u);
    Substitution s1{{"X", Term::constant("a")}, {"Y", Term::constant("b")}};
    Substitution s2{{"X", Term::constant("b")}, {"Y", Term::constant("a")}};
    EXPECT_TRUE((got[0] == s1 && got[1] == s2) || (got[0] == s2 && got[1] == s1));
}

TEST(MguMultisets, SizeMismatchThrows) {
    EXPECT_THROW(mgu_multisets(parse_fact("{p(a)}"), Fact{}), std::invalid_argument);
}

TEST(MguMultisets, NoBijectionUnifies) {
    EXPECT_TRUE(mgu_multisets(parse_fact("{p(a), q(a)}"), parse_fact("{p(b), q(X)}")).empty());
}

TEST(MguMultisets, MatchesBruteForce) {
    lt::Rng rng(22);
    lt::Vocab v{{"a", "b"}, {"f"}, {{"p", 1}, {"q", 1}}};
    for (int n = 0; n < 400; ++n) {
        std::size_t k = rng.below(5);
        std::vector<Atom> xs, ys;
        for (std::size_t i = 0; i < k; ++i) {
            xs.push_back(lt::random_atom(rng, v, {"X", "Y"}, 1));
            ys.push_back(lt::random_atom(rng, v, {"U", "W"}, 1));
        }
        Fact a(xs), b(ys);
        auto ours = mgu_multisets(a, b);
        auto brute = lt::brute_mgus(a, b);
        VarSet vs = vars_of(a);
        collect_vars(b, vs);
        for (const auto& s : ours) {
            EXPECT_EQ(apply(a, s), apply(b, s)) << print(a) << " / " << print(b);
            EXPECT_TRUE(s.is_idempotent());
        }
        // every bijection's unifier is equivalent to a returned one
        for (const auto& m : brute) {
            bool found = std::any_of(ours.begin(), ours.end(), [&](const Substitution& s) {
                return lt::instance_on(lt::to_binding(s), m, vs) &&
                       lt::instance_on(m, lt::to_binding(s), vs);
            });
            EXPECT_TRUE(found) << print(a) << " / " << print(b);
        }
        // and nothing else
        for (const auto& s : ours) {
            bool found = std::any_of(brute.begin(), brute.end(), [&](const lt::Binding& m) {
                return lt::instance_on(lt::to_binding(s), m, vs) &&
                       lt::instance_on(m, lt::to_binding(s), vs);
            });
            EXPECT_TRUE(found) << print(a) << " / " << print(b);
        }
        // pairwise non-equivalent
        for (std::size_t i = 0; i < ours.size(); ++i)
            for (std::size_t j = i + 1; j < ours.size(); ++j)
                EXPECT_FALSE(equivalent(ours[i], ours[j], vs));
    }
}

TEST(Lub, ThreeWay) {
    Term y = Term::var("Y1");
    Term fy = Term::apply("f", {y});
    auto l1 = subst_lub(Substitution{{"U1", Term::var("X3")}}, Substitution{{"V1", y}});
    ASSERT_TRUE(l1);
    auto l2 = subst_lub(*l1, Substitution{{"X3", fy}});
    ASSERT_TRUE(l2);
    Substitution want{{"U1", fy}, {"V1", y}, {"X3", fy}};
    EXPECT_TRUE(equivalent(*l2, want, {"U1", "V1", "X3", "Y1"}));
}

TEST(Lub, EmptyIsIdentity) {
    Substitution s{{"X", Term::constant("a")}};
    EXPECT_EQ(subst_lub(s, Substitution{}), s);
}

TEST(Lub, SolvesEquations) {
    auto got = subst_lub(Substitution{{"X", Term::apply("f", {Term::var("Y")})}},
                         Substitution{{"X", Term::apply("f", {Term::constant("a")})}});
    ASSERT_TRUE(got);
    EXPECT_EQ(*got, (Substitution{{"X", Term::apply("f", {Term::constant("a")})}, {"Y", Term::constant("a")}}));
}

TEST(Lub, Conflict) {
    EXPECT_FALSE(subst_lub(Substitution{{"X", Term::constant("a")}}, Substitution{{"X", Term::constant("b")}}));
}

TEST(Lub, UpperBoundAndCommutative) {
    lt::Rng rng(23);
    lt::Vocab v{{"a", "b"}, {"f"}, {}};
    VarSet vars{"X", "Y", "Z"};
    std::size_t defined = 0;
    for (int n = 0; n < 500; ++n) {
        Substitution s1, s2;
        s1.bind("X", lt::random_term(rng, v, {"Z"}, 2));
        s2.bind(rng.chance(0.5) ? "X" : "Y", lt::random_term(rng, v, {"Z"}, 2));
        auto l = subst_lub(s1, s2);
        auto r = subst_lub(s2, s1);
        ASSERT_EQ(l.has_value(), r.has_value());
        if (!l) continue;
        ++defined;
        EXPECT_TRUE(more_general(s1, *l, vars));
        EXPECT_TRUE(more_general(s2, *l, vars));
        EXPECT_TRUE(equivalent(*l, *r, vars));
    }
    EXPECT_GT(defined, 100u);
}

TEST(Match, OneWay) {
    MatchMap m;
    EXPECT_TRUE(match_into(m, atom("p(X, f(Y))"), atom("p(a, f(Z))")));
    EXPECT_EQ(m.at("X"), Term::constant("a"));
    EXPECT_EQ(m.at("Y"), Term::var("Z"));
    MatchMap n;
    EXPECT_FALSE(match_into(n, atom("p(a)"), atom("p(X)")));
    MatchMap k;
    EXPECT_FALSE(match_into(k, atom("q(X, X)"), atom("q(a, b)")));
}

TEST(Match, AgreesWithNaive) {
    lt::Rng rng(24);
    lt::Vocab v{{"a", "b"}, {"f"}, {{"p", 2}}};
    for (int n = 0; n < 1000; ++n) {
        Atom pat = lt::random_atom(rng, v, {"X", "Y"}, 2);
        Atom tgt = lt::random_atom(rng, v, {"X", "Z"}, 2);
        MatchMap m;
        bool ours = match_into(m, pat, tgt);
        lt::Binding b;
        bool theirs = true;
        for (std::size_t i = 0; i < pat.args.size() && theirs; ++i)
            theirs = lt::naive_match(pat.args[i], tgt.args[i], b);
        EXPECT_EQ(ours, theirs) << to_string(pat) << " / " << to_string(tgt);
    }
}
