#include "lo/engine.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace lo {

// ---------------------------------------------------------------- operator

std::vector<ProvenanceRecord> sp_step(const Program& program, const Interpretation& interp,
                                      NameSupply& names, const StepOptions& opts) {
    std::vector<ProvenanceRecord> out;
    std::set<Fact> seen;
    for (std::size_t ci = 0; ci < program.clauses.size(); ++ci) {
        const Clause& clause = program.clauses[ci];
        AsatOptions ao = opts.asat;
        if (opts.active && classify_clause(clause) != ClauseClass::General) ao.active = opts.active;
        Clause variant = fresh_variant(clause, names);
        for (auto& o : asat(interp, {variant.body}, names, ao)) {
            ProvenanceRecord r;
            r.raw = apply(variant.head + o.out, o.theta);
            r.fact = canonicalize(r.raw, r.canon);
            if (!seen.insert(r.fact).second) continue;
            r.clause_label = clause.label;
            r.clause_index = ci;
            r.variant = variant;
            r.theta = std::move(o.theta);
            for (auto u : o.used) r.used_facts.push_back(interp.facts[u]);
            out.push_back(std::move(r));
        }
    }
    return out;
}

namespace {

// Indices of the facts that survive, in input order.
std::vector<std::size_t> reduce_indices(const std::vector<Fact>& facts) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < facts.size(); ++i) {
        bool covered = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return entails_fact(facts[i], facts[k]).has_value();
        });
        if (covered) continue;
        std::erase_if(kept, [&](std::size_t k) {
            return entails_fact(facts[k], facts[i]).has_value();
        });
        kept.push_back(i);
    }
    return kept;
}

} // namespace

Interpretation reduce(const Interpretation& interp) {
    Interpretation out;
    for (auto i : reduce_indices(interp.facts)) out.facts.push_back(interp.facts[i]);
    return out;
}

FixpointResult fixpoint(const Program& program, const FixpointOptions& opts) {
    FixpointResult res;
    res.monadic_guarantee = is_monadic(program).monadic;
    NameSupply names;
    StepOptions step;
    step.asat.prune_trivial = opts.prune_trivial;
    step.asat.prune_outputs = opts.prune_outputs;

    Interpretation cur;
    std::vector<bool> fresh; // facts of `cur` admitted in the last round
    std::size_t k = 0;
    for (;;) {
        if (k >= opts.max_rounds) {
            res.rounds = k;
            res.terminated = false;
            break;
        }
        bool partial = opts.delta && k > 0;
        step.active = partial ? &fresh : nullptr;
        auto records = sp_step(program, cur, names, step);

        std::vector<Fact> all = cur.facts;
        for (const auto& r : records) all.push_back(r.fact);
        auto kept = reduce_indices(all);
        Interpretation next;
        for (auto i : kept) next.facts.push_back(all[i]);

        if (entails_interp(next, cur)) {
            if (partial) {
                // Confirm with a full round before declaring stability.
                step.active = nullptr;
                records = sp_step(program, cur, names, step);
                all = cur.facts;
                for (const auto& r : records) all.push_back(r.fact);
                kept = reduce_indices(all);
                next.facts.clear();
                for (auto i : kept) next.facts.push_back(all[i]);
            }
            if (entails_interp(next, cur)) {
                res.rounds = k;
                res.terminated = true;
                break;
            }
        }

        std::vector<std::size_t> prov;
        std::vector<bool> next_fresh;
        for (auto i : kept) {
            if (i < cur.facts.size()) {
                prov.push_back(res.provenance[i]);
                next_fresh.push_back(false);
            } else {
                ProvenanceRecord r = records[i - cur.facts.size()];
                r.round = k + 1;
                prov.push_back(res.archive.size());
                res.archive.push_back(std::move(r));
                next_fresh.push_back(true);
            }
        }
        cur = std::move(next);
        res.provenance = std::move(prov);
        fresh = std::move(next_fresh);
        ++k;
    }
    res.interpretation = std::move(cur);
    return res;
}

std::optional<GoalWitness> check_goal(const FixpointResult& result, const Goal& goal) {
    NameSupply names;
    for (auto& o : asat(result.interpretation, {goal}, names)) {
        if (!o.out.empty()) continue;
        GoalWitness w;
        for (auto u : o.used) w.used_facts.push_back(result.interpretation.facts[u]);
        w.output = std::move(o);
        return w;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------- monadic fragment

MonadicReport is_monadic(const Program& program) {
    MonadicReport r;
    for (const auto& [f, n] : program.signature.functions) {
        r.monadic = false;
        r.diagnostics.push_back("function symbol " + f + "/" + std::to_string(n));
    }
    for (const auto& [p, n] : program.signature.predicates) {
        if (n <= 1) continue;
        r.monadic = false;
        r.diagnostics.push_back("predicate " + p + "/" + std::to_string(n) +
                                " has arity above one (try --monadize)");
    }
    return r;
}

namespace {

void visit_atoms(const Goal& g, const std::function<void(const Atom&)>& f) {
    if (g.is_atomic()) f(g.atom);
    for (const auto& s : g.sub) visit_atoms(s, f);
}

void visit_atoms(const Program& p, const std::function<void(const Atom&)>& f) {
    for (const auto& c : p.clauses) {
        for (const auto& a : c.head) f(a);
        visit_atoms(c.body, f);
    }
}

std::string folded_name(const MonadizeResult& m, const Atom& a) {
    auto it = m.folded.find(a.predicate);
    if (it == m.folded.end()) return a.predicate;
    std::string name = a.predicate;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!it->second[i]) continue;
        if (a.args[i].kind != TermKind::Constant)
            throw std::invalid_argument("cannot fold " + to_string(a) + ": position " +
                                        std::to_string(i + 1) + " is not a constant");
        name += "_" + a.args[i].name;
    }
    return name;
}

Atom fold_atom(const MonadizeResult& m, const Atom& a, const std::set<std::string>& taken) {
    auto it = m.folded.find(a.predicate);
    if (it == m.folded.end()) return a;
    std::string name = folded_name(m, a);
    while (taken.count(name)) name += "_";
    Atom out(name);
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!it->second[i]) out.args.push_back(a.args[i]);
    return out;
}

std::set<std::string> unfolded_predicates(const MonadizeResult& m, const Program& original) {
    std::set<std::string> out;
    for (const auto& [p, n] : original.signature.predicates)
        if (!m.folded.count(p)) out.insert(p);
    return out;
}

Goal fold_with(const MonadizeResult& m, const Goal& g, const std::set<std::string>& taken) {
    if (g.is_atomic()) return Goal::atomic(fold_atom(m, g.atom, taken));
    Goal out = g;
    for (auto& s : out.sub) s = fold_with(m, s, taken);
    return out;
}

} // namespace

MonadizeResult monadize(const Program& program) {
    MonadizeResult m;
    m.program = program;
    if (is_monadic(program).monadic) {
        m.applicable = true;
        return m;
    }
    if (!program.signature.functions.empty()) {
        m.reason = "function symbol " + program.signature.functions.begin()->first;
        return m;
    }
    std::map<std::string, std::vector<bool>> constant_only;
    for (const auto& [p, n] : program.signature.predicates) constant_only[p].assign(n, true);
    visit_atoms(program, [&](const Atom& a) {
        auto& v = constant_only[a.predicate];
        for (std::size_t i = 0; i < a.args.size(); ++i)
            if (a.args[i].kind != TermKind::Constant) v[i] = false;
    });
    for (const auto& [p, n] : program.signature.predicates) {
        const auto& v = constant_only[p];
        std::size_t remaining = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (v[i]) continue;
            if (++remaining > 1) {
                m.blocking_predicate = p;
                m.blocking_position = i + 1;
                m.reason = "argument " + std::to_string(i + 1) + " of " + p +
                           " is not constant in every occurrence";
                return m;
            }
        }
        if (std::find(v.begin(), v.end(), true) != v.end()) m.folded[p] = v;
    }
    m.applicable = true;
    m.reserved = unfolded_predicates(m, program);
    const auto& taken = m.reserved;
    Program out;
    for (const auto& c : program.clauses) {
        Clause d = c;
        std::vector<Atom> head;
        for (const auto& a : c.head) head.push_back(fold_atom(m, a, taken));
        d.head = Fact(std::move(head));
        d.body = fold_with(m, c.body, taken);
        out.clauses.push_back(std::move(d));
    }
    out.signature = derive_signature(out.clauses);
    out.warnings = program.warnings;
    // Keep constants that only occurred in folded positions: they are still
    // part of the universe seen by ground reasoning.
    out.signature.constants.insert(program.signature.constants.begin(),
                                   program.signature.constants.end());
    m.program = std::move(out);
    return m;
}

Goal fold_goal(const MonadizeResult& m, const Goal& g) {
    if (m.folded.empty()) return g;
    return fold_with(m, g, m.reserved);
}

Fact fold_fact(const MonadizeResult& m, const Fact& f) {
    std::vector<Atom> atoms;
    for (const auto& a : f) atoms.push_back(fold_atom(m, a, m.reserved));
    return Fact(std::move(atoms));
}

// ---------------------------------------------------------------- clusters

Clusters cluster(const Fact& f) {
    std::map<std::string, std::vector<std::string>> by_var;
    Clusters out;
    for (const auto& a : f) {
        if (a.args.size() > 1)
            throw std::invalid_argument("cluster: " + a.predicate + " has arity above one");
        if (a.args.empty()) {
            out.push_back({a.predicate});
            continue;
        }
        const Term& t = a.args[0];
        switch (t.kind) {
        case TermKind::Variable: by_var[t.name].push_back(a.predicate); break;
        case TermKind::Constant:
        case TermKind::Eigen: out.push_back({a.predicate + "_" + t.name}); break;
        case TermKind::Apply:
            throw std::invalid_argument("cluster: function symbol in " + to_string(a));
        }
    }
    for (auto& [v, ps] : by_var) out.push_back(std::move(ps));
    for (auto& c : out) std::sort(c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool entails_cluster(const Clusters& big, const Clusters& small) {
    if (small.size() > big.size()) return false;
    std::vector<std::vector<std::size_t>> adj(small.size());
    for (std::size_t i = 0; i < small.size(); ++i)
        for (std::size_t j = 0; j < big.size(); ++j)
            if (std::includes(big[j].begin(), big[j].end(), small[i].begin(), small[i].end()))
                adj[i].push_back(j);
    std::vector<std::ptrdiff_t> owner(big.size(), -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment =
        [&](std::size_t i, std::vector<bool>& seen) {
            for (auto j : adj[i]) {
                if (seen[j]) continue;
                seen[j] = true;
                if (owner[j] < 0 || augment(static_cast<std::size_t>(owner[j]), seen)) {
                    owner[j] = static_cast<std::ptrdiff_t>(i);
                    return true;
                }
            }
            return false;
        };
    for (std::size_t i = 0; i < small.size(); ++i) {
        std::vector<bool> seen(big.size(), false);
        if (!augment(i, seen)) return false;
    }
    return true;
}

std::string to_string(const Clusters& c) {
    bool short_names = true;
    for (const auto& g : c)
        for (const auto& p : g) short_names = short_names && p.size() == 1;
    std::string out = "{";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ", ";
        for (std::size_t j = 0; j < c[i].size(); ++j) {
            if (j && !short_names) out += "+";
            out += c[i][j];
        }
    }
    return out + "}";
}

} // namespace lo
