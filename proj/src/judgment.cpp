#include "lo/judgment.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "lo/unify.hpp"

namespace lo {

// ---------------------------------------------------------------- entailment

namespace {

bool predicate_counts_fit(const Fact& a, const Fact& b) {
    // b's atoms must find distinct partners in a with the same predicate.
    std::size_t i = 0, j = 0;
    while (j < b.size()) {
        const std::string& p = b[j].predicate;
        std::size_t need = 0;
        while (j < b.size() && b[j].predicate == p) ++need, ++j;
        while (i < a.size() && a[i].predicate < p) ++i;
        std::size_t have = 0;
        while (i < a.size() && a[i].predicate == p) ++have, ++i;
        if (have < need) return false;
    }
    return true;
}

struct Matcher {
    const Fact& a;
    const Fact& b;
    std::vector<bool> used;
    std::vector<std::size_t> choice;
    MatchMap map;

    bool run(std::size_t j) {
        if (j == b.size()) return true;
        std::size_t start = (j > 0 && b[j] == b[j - 1]) ? choice[j - 1] + 1 : 0;
        const Atom* last = nullptr;
        for (std::size_t i = start; i < a.size(); ++i) {
            if (used[i]) continue;
            if (a[i].predicate != b[j].predicate) continue;
            if (last && *last == a[i]) continue;
            last = &a[i];
            MatchMap saved = map;
            if (match_into(map, b[j], a[i])) {
                used[i] = true;
                choice[j] = i;
                if (run(j + 1)) return true;
                used[i] = false;
            }
            map = std::move(saved);
        }
        return false;
    }
};

} // namespace

std::optional<EntailmentWitness> entails_fact(const Fact& a, const Fact& b) {
    if (b.size() > a.size() || !predicate_counts_fit(a, b)) return std::nullopt;
    Matcher m{a, b, std::vector<bool>(a.size(), false), std::vector<std::size_t>(b.size(), 0), {}};
    if (!m.run(0)) return std::nullopt;
    std::vector<Atom> rest;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!m.used[i]) rest.push_back(a[i]);
    return EntailmentWitness{to_substitution(m.map), Fact(std::move(rest))};
}

std::optional<std::size_t> denotation_member(const Interpretation& interp, const Fact& f) {
    for (std::size_t i = 0; i < interp.facts.size(); ++i)
        if (entails_fact(f, interp.facts[i])) return i;
    return std::nullopt;
}

bool entails_interp(const Interpretation& i, const Interpretation& j) {
    return std::all_of(i.facts.begin(), i.facts.end(),
                       [&](const Fact& f) { return denotation_member(j, f).has_value(); });
}

VarSet free_vars(const std::vector<Goal>& ctx) {
    VarSet out;
    for (const auto& g : ctx) {
        VarSet v = free_vars(g);
        out.insert(v.begin(), v.end());
    }
    return out;
}

// ---------------------------------------------------------------- output order

namespace {

// Context variables tagged by name, followed by C·θ.
Fact tagged(const JudgmentOutput& o, const VarSet& vars) {
    std::vector<Atom> atoms;
    for (const auto& v : vars)
        atoms.emplace_back("$" + v, std::vector<Term>{apply(Term::var(v), o.theta)});
    for (const auto& a : apply(o.out, o.theta)) atoms.push_back(a);
    return Fact(std::move(atoms));
}

std::string output_key(const JudgmentOutput& o, const VarSet& vars) {
    std::string key;
    for (const auto& a : canonicalize(tagged(o, vars))) key += to_string(a) + ";";
    return key;
}

void dedupe(std::vector<JudgmentOutput>& outs, const VarSet& vars) {
    std::set<std::string> seen;
    std::vector<JudgmentOutput> kept;
    for (auto& o : outs)
        if (seen.insert(output_key(o, vars)).second) kept.push_back(std::move(o));
    outs = std::move(kept);
}

void prune(std::vector<JudgmentOutput>& outs, const VarSet& vars) {
    std::vector<bool> drop(outs.size(), false);
    for (std::size_t i = 0; i < outs.size(); ++i) {
        for (std::size_t j = 0; j < outs.size() && !drop[i]; ++j) {
            if (i == j || drop[j]) continue;
            if (!output_subsumes(outs[j], outs[i], vars)) continue;
            if (j < i || !output_subsumes(outs[i], outs[j], vars)) drop[i] = true;
        }
    }
    std::vector<JudgmentOutput> kept;
    for (std::size_t i = 0; i < outs.size(); ++i)
        if (!drop[i]) kept.push_back(std::move(outs[i]));
    outs = std::move(kept);
}

void merge_used(std::vector<std::size_t>& into, const std::vector<std::size_t>& from) {
    for (auto u : from)
        if (std::find(into.begin(), into.end(), u) == into.end()) into.push_back(u);
}

std::size_t first_compound(const std::vector<Goal>& ctx) {
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (!ctx[i].is_atomic()) return i;
    return ctx.size();
}

bool has_top(const std::vector<Goal>& ctx) {
    return std::any_of(ctx.begin(), ctx.end(),
                       [](const Goal& g) { return g.kind == Goal::Kind::Top; });
}

bool theta_mentions(const Substitution& s, const std::string& eigen) {
    for (const auto& [v, t] : s)
        if (mentions_eigen(t, eigen)) return true;
    return false;
}

// ---------------------------------------------------------------- asat

class Abstract {
public:
    Abstract(const Interpretation& interp, NameSupply& names, const AsatOptions& opts)
        : interp_(interp), names_(names), opts_(opts) {}

    std::vector<JudgmentOutput> solve(std::vector<Goal> ctx) {
        if (has_top(ctx)) return {JudgmentOutput{}};
        std::size_t k = first_compound(ctx);
        if (k == ctx.size()) return atoms(ctx);

        Goal g = std::move(ctx[k]);
        ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(k));
        switch (g.kind) {
        case Goal::Kind::Bot:
            return solve(std::move(ctx));
        case Goal::Kind::Par:
            ctx.push_back(std::move(g.sub[0]));
            ctx.push_back(std::move(g.sub[1]));
            return solve(std::move(ctx));
        case Goal::Kind::Forall: {
            std::string c = names_.fresh_eigen();
            ctx.push_back(apply(g.sub[0], Substitution{{g.var, Term::eigen(c)}}));
            auto outs = solve(std::move(ctx));
            std::erase_if(outs, [&](const JudgmentOutput& o) {
                return mentions_eigen(o.out, c) || theta_mentions(o.theta, c);
            });
            return outs;
        }
        case Goal::Kind::With:
            return with(std::move(ctx), g);
        default:
            break;
        }
        return {};
    }

private:
    std::vector<JudgmentOutput> atoms(const std::vector<Goal>& ctx) {
        std::vector<Atom> as;
        for (const auto& g : ctx) as.push_back(g.atom);
        Fact a(std::move(as));
        VarSet avars = vars_of(a);
        std::vector<JudgmentOutput> outs;
        for (std::size_t idx = 0; idx < interp_.facts.size(); ++idx) {
            if (opts_.active && !(*opts_.active)[idx]) continue;
            Fact b = fresh_variant(interp_.facts[idx], names_).first;
            std::size_t top = std::min(a.size(), b.size());
            for (std::size_t k = top + 1; k-- > 0;) {
                if (k == 0 && opts_.prune_trivial && !a.empty() && !b.empty()) continue;
                auto a_sel = submultisets(a, k);
                auto b_sel = submultisets(b, k);
                for (const auto& a1 : a_sel) {
                    for (const auto& b1 : b_sel) {
                        for (auto& mu : mgu_multisets(a1, b1)) {
                            Fact c = b - b1;
                            VarSet keep = avars;
                            collect_vars(c, keep);
                            outs.push_back({std::move(c), restrict(mu, keep), {idx}});
                        }
                    }
                }
            }
        }
        finish(outs, avars);
        return outs;
    }

    std::vector<JudgmentOutput> with(const std::vector<Goal>& rest, const Goal& g) {
        std::vector<Goal> left = rest, right = rest;
        left.push_back(g.sub[0]);
        right.push_back(g.sub[1]);
        auto outs1 = solve(left);
        if (outs1.empty()) return {};
        auto outs2 = solve(right);
        VarSet scope = free_vars(rest);
        for (const auto& s : g.sub) {
            VarSet v = free_vars(s);
            scope.insert(v.begin(), v.end());
        }
        std::vector<JudgmentOutput> outs;
        for (const auto& o1 : outs1) {
            for (const auto& o2 : outs2) {
                auto lub12 = subst_lub(o1.theta, o2.theta);
                if (!lub12) continue;
                std::size_t top = std::min(o1.out.size(), o2.out.size());
                for (std::size_t k = top + 1; k-- > 0;) {
                    auto d1s = submultisets(o1.out, k);
                    auto d2s = submultisets(o2.out, k);
                    for (const auto& d1 : d1s) {
                        for (const auto& d2 : d2s) {
                            for (const auto& t3 : mgu_multisets(d1, d2)) {
                                auto lub = subst_lub(*lub12, t3);
                                if (!lub) continue;
                                Fact c = o1.out + (o2.out - d2);
                                VarSet keep = scope;
                                collect_vars(c, keep);
                                JudgmentOutput o{std::move(c), restrict(*lub, keep), o1.used};
                                merge_used(o.used, o2.used);
                                outs.push_back(std::move(o));
                            }
                        }
                    }
                }
            }
        }
        finish(outs, scope);
        return outs;
    }

    void finish(std::vector<JudgmentOutput>& outs, const VarSet& scope) {
        dedupe(outs, scope);
        if (opts_.prune_outputs) prune(outs, scope);
    }

    const Interpretation& interp_;
    NameSupply& names_;
    const AsatOptions& opts_;
};

// ---------------------------------------------------------------- concrete

bool concrete(const Interpretation& interp, std::vector<Goal> ctx, const Fact& c,
              NameSupply& names) {
    if (has_top(ctx)) return true;
    std::size_t k = first_compound(ctx);
    if (k == ctx.size()) {
        std::vector<Atom> as(c.begin(), c.end());
        for (const auto& g : ctx) as.push_back(g.atom);
        return denotation_member(interp, Fact(std::move(as))).has_value();
    }
    Goal g = std::move(ctx[k]);
    ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(k));
    switch (g.kind) {
    case Goal::Kind::Bot:
        return concrete(interp, std::move(ctx), c, names);
    case Goal::Kind::Par:
        ctx.push_back(std::move(g.sub[0]));
        ctx.push_back(std::move(g.sub[1]));
        return concrete(interp, std::move(ctx), c, names);
    case Goal::Kind::Forall:
        ctx.push_back(apply(g.sub[0], Substitution{{g.var, Term::eigen(names.fresh_eigen())}}));
        return concrete(interp, std::move(ctx), c, names);
    case Goal::Kind::With: {
        std::vector<Goal> left = ctx;
        left.push_back(g.sub[0]);
        if (!concrete(interp, std::move(left), c, names)) return false;
        ctx.push_back(g.sub[1]);
        return concrete(interp, std::move(ctx), c, names);
    }
    default:
        return false;
    }
}

} // namespace

std::vector<JudgmentOutput> asat(const Interpretation& interp, const std::vector<Goal>& ctx,
                                 NameSupply& names, const AsatOptions& opts) {
    return Abstract(interp, names, opts).solve(ctx);
}

bool concrete_sat(const Interpretation& interp, const std::vector<Goal>& ctx, const Fact& c,
                  NameSupply& names) {
    return concrete(interp, ctx, c, names);
}

bool output_subsumes(const JudgmentOutput& general, const JudgmentOutput& specific,
                     const VarSet& vars) {
    return entails_fact(tagged(specific, vars), tagged(general, vars)).has_value();
}

} // namespace lo
