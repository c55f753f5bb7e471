#include "lo/unify.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace lo {

namespace {

// Binds var := t in the solved form, pushing the binding through the range.
void solve(Substitution& s, const std::string& var, const Term& t) {
    Substitution single{{var, t}};
    Substitution updated;
    for (const auto& [v, u] : s) updated.bind(v, apply(u, single));
    updated.bind(var, t);
    s = std::move(updated);
}

bool unify_terms(Substitution& s, const Term& a0, const Term& b0) {
    Term a = apply(a0, s);
    Term b = apply(b0, s);
    if (a == b) return true;
    if (a.kind == TermKind::Variable) {
        if (occurs(a.name, b)) return false;
        solve(s, a.name, b);
        return true;
    }
    if (b.kind == TermKind::Variable) {
        if (occurs(b.name, a)) return false;
        solve(s, b.name, a);
        return true;
    }
    if (a.kind != TermKind::Apply || b.kind != TermKind::Apply) return false;
    if (a.name != b.name || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!unify_terms(s, a.args[i], b.args[i])) return false;
    return true;
}

} // namespace

bool unify_into(Substitution& s, const Term& a, const Term& b) { return unify_terms(s, a, b); }

bool unify_into(Substitution& s, const Atom& a, const Atom& b) {
    if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!unify_terms(s, a.args[i], b.args[i])) return false;
    return true;
}

std::optional<Substitution> mgu(const Term& a, const Term& b) {
    Substitution s;
    if (!unify_into(s, a, b)) return std::nullopt;
    return s;
}

std::optional<Substitution> mgu(const Atom& a, const Atom& b) {
    Substitution s;
    if (!unify_into(s, a, b)) return std::nullopt;
    return s;
}

namespace {

// Renaming-invariant key of a unifier restricted to `vars`.
std::string unifier_key(const Substitution& s, const VarSet& vars) {
    std::vector<Atom> atoms;
    for (const auto& v : vars) atoms.emplace_back("$" + v, std::vector<Term>{apply(Term::var(v), s)});
    Fact f = canonicalize(Fact(std::move(atoms)));
    std::string key;
    for (const auto& a : f) key += to_string(a) + ";";
    return key;
}

} // namespace

std::vector<Substitution> mgu_multisets(const Fact& a, const Fact& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mgu_multisets: sizes differ");
    std::vector<Substitution> out;
    std::set<std::string> seen;
    VarSet vars = vars_of(a);
    collect_vars(b, vars);

    const std::size_t n = a.size();
    std::vector<bool> used(n, false);
    std::vector<std::size_t> choice(n, 0);

    std::function<void(std::size_t, const Substitution&)> go = [&](std::size_t i,
                                                                   const Substitution& s) {
        if (i == n) {
            if (seen.insert(unifier_key(s, vars)).second) out.push_back(s);
            return;
        }
        // Identical atoms of `a` take partners in increasing order; identical
        // atoms of `b` are tried once per step.
        std::size_t start = (i > 0 && a[i] == a[i - 1]) ? choice[i - 1] + 1 : 0;
        const Atom* last_tried = nullptr;
        for (std::size_t j = start; j < n; ++j) {
            if (used[j]) continue;
            if (last_tried && *last_tried == b[j]) continue;
            last_tried = &b[j];
            Substitution next = s;
            if (!unify_into(next, a[i], b[j])) continue;
            used[j] = true;
            choice[i] = j;
            go(i + 1, next);
            used[j] = false;
        }
    };
    go(0, Substitution{});
    return out;
}

std::optional<Substitution> subst_lub(const Substitution& a, const Substitution& b) {
    Substitution s = a;
    for (const auto& [v, t] : b)
        if (!unify_into(s, Term::var(v), t)) return std::nullopt;
    return s;
}

bool match_into(MatchMap& m, const Term& pattern, const Term& target) {
    if (pattern.kind == TermKind::Variable) {
        auto [it, fresh] = m.try_emplace(pattern.name, target);
        return fresh || it->second == target;
    }
    if (pattern.kind != target.kind || pattern.name != target.name ||
        pattern.args.size() != target.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match_into(m, pattern.args[i], target.args[i])) return false;
    return true;
}

bool match_into(MatchMap& m, const Atom& pattern, const Atom& target) {
    if (pattern.predicate != target.predicate || pattern.args.size() != target.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match_into(m, pattern.args[i], target.args[i])) return false;
    return true;
}

Substitution to_substitution(const MatchMap& m) {
    Substitution s;
    for (const auto& [v, t] : m) s.bind(v, t);
    return s;
}

bool more_general(const Substitution& a, const Substitution& b, const VarSet& vars) {
    MatchMap sigma;
    for (const auto& v : vars)
        if (!match_into(sigma, apply(Term::var(v), a), apply(Term::var(v), b))) return false;
    return true;
}

} // namespace lo
