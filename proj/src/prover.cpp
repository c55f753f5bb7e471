#include "lo/prover.hpp"

#include <algorithm>
#include <functional>

#include "lo/unify.hpp"

namespace lo {

const char* to_string(Rule r) {
    switch (r) {
    case Rule::Top: return "top";
    case Rule::Par: return "par";
    case Rule::With: return "with";
    case Rule::Bot: return "bot";
    case Rule::Forall: return "forall";
    case Rule::Backchain: return "bc";
    }
    return "?";
}

std::vector<Goal> goals_of(const Fact& f) {
    std::vector<Goal> out;
    for (const auto& a : f) out.push_back(Goal::atomic(a));
    return out;
}

namespace {

void term_eigens(const Term& t, std::set<std::string>& out) {
    if (t.kind == TermKind::Eigen) out.insert(t.name);
    for (const auto& a : t.args) term_eigens(a, out);
}

void goal_eigens(const Goal& g, std::set<std::string>& out) {
    if (g.is_atomic())
        for (const auto& t : g.atom.args) term_eigens(t, out);
    for (const auto& s : g.sub) goal_eigens(s, out);
}

std::size_t first_compound(const std::vector<Goal>& ctx) {
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (!ctx[i].is_atomic()) return i;
    return ctx.size();
}

Fact atoms_of(const std::vector<Goal>& ctx) {
    std::vector<Atom> as;
    for (const auto& g : ctx) as.push_back(g.atom);
    return Fact(std::move(as));
}

std::vector<Goal> without(const std::vector<Goal>& ctx, std::size_t k) {
    std::vector<Goal> out;
    out.reserve(ctx.size());
    for (std::size_t i = 0; i < ctx.size(); ++i)
        if (i != k) out.push_back(ctx[i]);
    return out;
}

// Injective matchings of `head` (a pattern) into the ground atoms `target`.
void head_matchings(const Fact& head, const Fact& target,
                    const std::function<void(const MatchMap&, const std::vector<bool>&)>& each) {
    std::vector<bool> used(target.size(), false);
    std::vector<std::size_t> choice(head.size(), 0);
    MatchMap m;
    std::function<void(std::size_t)> go = [&](std::size_t j) {
        if (j == head.size()) {
            each(m, used);
            return;
        }
        std::size_t start = (j > 0 && head[j] == head[j - 1]) ? choice[j - 1] + 1 : 0;
        const Atom* last = nullptr;
        for (std::size_t i = start; i < target.size(); ++i) {
            if (used[i] || target[i].predicate != head[j].predicate) continue;
            if (last && *last == target[i]) continue;
            last = &target[i];
            MatchMap saved = m;
            if (match_into(m, head[j], target[i])) {
                used[i] = true;
                choice[j] = i;
                go(j + 1);
                used[i] = false;
            }
            m = std::move(saved);
        }
    };
    go(0);
}

} // namespace

// ---------------------------------------------------------------- search

Prover::Prover(const Program& program, ProverOptions opts) : program_(program), opts_(opts) {
    for (const auto& c : program_.clauses) {
        VarSet head = vars_of(c.head);
        std::vector<std::string> only;
        for (const auto& v : free_vars(c.body))
            if (!head.count(v)) only.push_back(v);
        body_only_.push_back(std::move(only));
    }
    // Clauses with a top body close the branch, so try them first.
    for (std::size_t ci = 0; ci < program_.clauses.size(); ++ci)
        if (program_.clauses[ci].body.kind == Goal::Kind::Top) order_.push_back(ci);
    for (std::size_t ci = 0; ci < program_.clauses.size(); ++ci)
        if (program_.clauses[ci].body.kind != Goal::Kind::Top) order_.push_back(ci);
}

std::optional<ProofNode> Prover::prove(const std::vector<Goal>& ctx, std::size_t depth) {
    std::set<std::string> present;
    for (const auto& g : ctx) goal_eigens(g, present);
    std::vector<std::string> eigens(present.begin(), present.end());
    cutoff_ = false;
    return search(ctx, depth, eigens);
}

std::optional<ProofNode> Prover::prove_iterative(const std::vector<Goal>& ctx,
                                                 std::size_t max_depth) {
    for (std::size_t d = 0; d <= max_depth; ++d) {
        if (auto p = prove(ctx, d)) return p;
        // nothing was cut off by the bound, so more depth cannot help
        if (!cutoff_) break;
    }
    return std::nullopt;
}

bool Prover::provable(const std::vector<Goal>& ctx, std::size_t max_depth) {
    decide_ = true;
    bool found = false;
    for (std::size_t d = 0; d <= max_depth && !found; ++d) {
        found = prove(ctx, d).has_value();
        if (!cutoff_) break;
    }
    decide_ = false;
    return found;
}

std::optional<ProofNode> Prover::search(std::vector<Goal> ctx, std::size_t depth,
                                        std::vector<std::string>& eigens) {
    ProofNode node;
    for (const auto& g : ctx) {
        if (g.kind == Goal::Kind::Top) {
            node.rule = Rule::Top;
            node.sequent = std::move(ctx);
            return node;
        }
    }
    std::size_t k = first_compound(ctx);
    if (k == ctx.size()) return backchain(ctx, depth, eigens);

    const Goal g = ctx[k];
    std::vector<Goal> rest = without(ctx, k);
    node.sequent = std::move(ctx);
    switch (g.kind) {
    case Goal::Kind::Bot: {
        node.rule = Rule::Bot;
        auto p = search(std::move(rest), depth, eigens);
        if (!p) return std::nullopt;
        node.premises.push_back(std::move(*p));
        return node;
    }
    case Goal::Kind::Par: {
        node.rule = Rule::Par;
        rest.push_back(g.sub[0]);
        rest.push_back(g.sub[1]);
        auto p = search(std::move(rest), depth, eigens);
        if (!p) return std::nullopt;
        node.premises.push_back(std::move(*p));
        return node;
    }
    case Goal::Kind::Forall: {
        node.rule = Rule::Forall;
        node.eigen = "_e" + std::to_string(eigen_counter_++);
        rest.push_back(apply(g.sub[0], Substitution{{g.var, Term::eigen(node.eigen)}}));
        eigens.push_back(node.eigen);
        auto p = search(std::move(rest), depth, eigens);
        eigens.pop_back();
        if (!p) return std::nullopt;
        node.premises.push_back(std::move(*p));
        return node;
    }
    case Goal::Kind::With: {
        node.rule = Rule::With;
        std::vector<Goal> left = rest;
        left.push_back(g.sub[0]);
        auto p1 = search(std::move(left), depth, eigens);
        if (!p1) return std::nullopt;
        rest.push_back(g.sub[1]);
        auto p2 = search(std::move(rest), depth, eigens);
        if (!p2) return std::nullopt;
        node.premises.push_back(std::move(*p1));
        node.premises.push_back(std::move(*p2));
        return node;
    }
    default:
        return std::nullopt;
    }
}

std::vector<Term> Prover::term_pool(const std::vector<Goal>& ctx,
                                    const std::vector<std::string>& eigens) const {
    std::set<std::string> constants = program_.signature.constants;
    for (const auto& g : ctx)
        for (const auto& t : g.atom.args) collect_constants(t, constants);
    std::vector<Term> pool;
    for (const auto& c : constants) pool.push_back(Term::constant(c));
    // An eigenvariable that does not occur in the context can be swapped for
    // any constant throughout a proof, so only occurring ones are needed.
    std::set<std::string> occurring;
    for (const auto& g : ctx) goal_eigens(g, occurring);
    for (const auto& e : occurring) pool.push_back(Term::eigen(e));
    if (pool.empty() && !eigens.empty()) pool.push_back(Term::eigen(eigens.front()));

    std::size_t level_start = 0;
    for (std::size_t d = 1; d <= opts_.term_depth; ++d) {
        std::size_t level_end = pool.size();
        std::vector<Term> next;
        for (const auto& [f, n] : program_.signature.functions) {
            // Arguments from all earlier levels, at least one from the last one.
            std::vector<Term> args(n);
            std::function<void(std::size_t, bool)> fill = [&](std::size_t i, bool fresh) {
                if (i == n) {
                    if (fresh) next.push_back(Term::apply(f, args));
                    return;
                }
                for (std::size_t t = 0; t < level_end; ++t) {
                    args[i] = pool[t];
                    fill(i + 1, fresh || t >= level_start);
                }
            };
            fill(0, false);
        }
        level_start = level_end;
        for (auto& t : next) pool.push_back(std::move(t));
    }
    return pool;
}

namespace {

void key_term(const Term& t, const std::map<std::string, std::size_t>* eig, std::string& out) {
    if (t.kind == TermKind::Eigen) {
        if (!eig) {
            out += '?';
            return;
        }
        out += '#' + std::to_string(eig->at(t.name));
        return;
    }
    out += t.name;
    if (t.args.empty()) return;
    out += '(';
    for (const auto& a : t.args) {
        key_term(a, eig, out);
        out += ',';
    }
    out += ')';
}

std::string key_atom(const Atom& a, const std::map<std::string, std::size_t>* eig) {
    std::string out = a.predicate + "(";
    for (const auto& t : a.args) {
        key_term(t, eig, out);
        out += ',';
    }
    return out + ")";
}

void number_eigens(const Term& t, std::map<std::string, std::size_t>& eig) {
    if (t.kind == TermKind::Eigen) eig.try_emplace(t.name, eig.size());
    for (const auto& a : t.args) number_eigens(a, eig);
}

} // namespace

// Eigenvariables are numbered by first occurrence after sorting the atoms
// with eigenvariables blanked out. Not a canonical form, but equal keys
// always denote contexts equal up to renaming of eigenvariables.
std::string Prover::memo_key(const std::vector<Goal>& ctx,
                             const std::vector<std::string>& eigens) const {
    std::vector<std::pair<std::string, const Atom*>> order;
    for (const auto& g : ctx) order.emplace_back(key_atom(g.atom, nullptr), &g.atom);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return *a.second < *b.second;
    });
    std::map<std::string, std::size_t> eig;
    for (const auto& [k, a] : order)
        for (const auto& t : a->args) number_eigens(t, eig);
    std::vector<std::string> parts;
    for (const auto& [k, a] : order) parts.push_back(key_atom(*a, &eig));
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + ";";
    // Unused eigenvariables only matter when there is nothing else to
    // instantiate with.
    bool spare = program_.signature.constants.empty() && eig.empty() && !eigens.empty();
    return key + (spare ? "|1" : "|0");
}

std::optional<ProofNode> Prover::backchain(const std::vector<Goal>& ctx, std::size_t depth,
                                           std::vector<std::string>& eigens) {
    if (depth == 0) {
        cutoff_ = true;
        return std::nullopt;
    }
    std::string key = memo_key(ctx, eigens);
    if (auto it = failed_.find(key); it != failed_.end() && it->second >= depth) {
        if (it->second != kUnbounded) cutoff_ = true;
        return std::nullopt;
    }
    if (decide_) {
        if (auto it = proved_.find(key); it != proved_.end() && it->second <= depth)
            return ProofNode{};
    }
    bool outer_cutoff = cutoff_;
    cutoff_ = false;

    Fact atoms = atoms_of(ctx);
    std::optional<std::vector<Term>> pool;
    std::set<std::string> tried;
    std::optional<ProofNode> found;

    for (std::size_t ci : order_) {
        if (found) break;
        const Clause& clause = program_.clauses[ci];
        const auto& only = body_only_[ci];
        if (!only.empty() && !pool) pool = term_pool(ctx, eigens);
        head_matchings(clause.head, atoms, [&](const MatchMap& m, const std::vector<bool>& used) {
            if (found) return;
            if (!only.empty() && pool->empty()) return;
            std::vector<Goal> rest;
            std::string rest_sig;
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (used[i]) continue;
                rest.push_back(Goal::atomic(atoms[i]));
                rest_sig += ',' + to_string(atoms[i]);
            }
            Substitution sigma = to_substitution(m);
            std::vector<std::size_t> idx(only.size(), 0);
            while (!found) {
                Substitution inst = sigma;
                for (std::size_t v = 0; v < only.size(); ++v) inst.bind(only[v], (*pool)[idx[v]]);
                // Keep x := x bindings out of the grounding: a ground match
                // never produces them, so inst is exact.
                Goal body = apply(clause.body, inst);
                if (tried.insert(print(body) + rest_sig).second) {
                    std::vector<Goal> next = rest;
                    next.push_back(std::move(body));
                    if (auto p = search(std::move(next), depth - 1, eigens)) {
                        if (decide_) {
                            found = ProofNode{};
                            return;
                        }
                        ProofNode node;
                        node.rule = Rule::Backchain;
                        node.sequent = ctx;
                        node.clause_index = ci;
                        node.clause_label = clause.label;
                        node.grounding = inst;
                        node.premises.push_back(std::move(*p));
                        found = std::move(node);
                        return;
                    }
                }
                std::size_t v = 0;
                while (v < only.size() && ++idx[v] == pool->size()) idx[v++] = 0;
                if (v == only.size()) break;
            }
        });
    }
    if (found && decide_) {
        auto [it, fresh] = proved_.try_emplace(key, depth);
        if (!fresh) it->second = std::min(it->second, depth);
    }
    if (!found) {
        auto& slot = failed_[key];
        slot = cutoff_ ? std::max(slot, depth) : kUnbounded;
    }
    cutoff_ = cutoff_ || outer_cutoff;
    return found;
}

std::optional<ProofNode> prove(const Program& program, const std::vector<Goal>& ctx,
                               std::size_t depth, ProverOptions opts) {
    Prover p(program, opts);
    return p.prove(ctx, depth);
}

bool check_weakening(Prover& prover, const std::vector<Goal>& small,
                     const std::vector<Goal>& large, std::size_t depth) {
    if (!prover.prove(small, depth)) return true;
    return prover.prove(large, depth).has_value();
}

// ---------------------------------------------------------------- checking

namespace {

std::vector<std::string> sorted_prints(const std::vector<Goal>& ctx) {
    std::vector<std::string> out;
    for (const auto& g : ctx) out.push_back(print(g));
    std::sort(out.begin(), out.end());
    return out;
}

bool same_multiset(const std::vector<Goal>& a, const std::vector<Goal>& b) {
    return sorted_prints(a) == sorted_prints(b);
}

class Checker {
public:
    Checker(const Program& p, Signature sig, const std::set<std::string>& extra)
        : program_(p), sig_(std::move(sig)), extra_(extra) {}

    std::optional<std::string> check(const ProofNode& n, std::set<std::string>& eigens) {
        auto fail = [&](const std::string& why) {
            return std::optional<std::string>(std::string(to_string(n.rule)) + " at " +
                                              print_sequent(n.sequent) + ": " + why);
        };
        const auto& seq = n.sequent;
        switch (n.rule) {
        case Rule::Top:
            if (!n.premises.empty()) return fail("axiom with premises");
            for (const auto& g : seq)
                if (g.kind == Goal::Kind::Top) return std::nullopt;
            return fail("no top in sequent");
        case Rule::Bot:
        case Rule::Par:
        case Rule::With:
        case Rule::Forall:
            return right_rule(n, eigens, fail);
        case Rule::Backchain:
            return backchain(n, eigens, fail);
        }
        return fail("unknown rule");
    }

private:
    template <class Fail>
    std::optional<std::string> right_rule(const ProofNode& n, std::set<std::string>& eigens,
                                          Fail& fail) {
        const auto& seq = n.sequent;
        Goal::Kind want = n.rule == Rule::Bot    ? Goal::Kind::Bot
                          : n.rule == Rule::Par  ? Goal::Kind::Par
                          : n.rule == Rule::With ? Goal::Kind::With
                                                 : Goal::Kind::Forall;
        std::size_t arity = n.rule == Rule::With ? 2 : 1;
        if (n.premises.size() != arity) return fail("wrong number of premises");
        if (n.rule == Rule::Forall) {
            if (n.eigen.empty()) return fail("missing eigenvariable");
            if (eigens.count(n.eigen) || extra_.count(n.eigen) ||
                sig_.declares(n.eigen))
                return fail("eigenvariable " + n.eigen + " is not fresh");
            std::set<std::string> present;
            for (const auto& g : seq) goal_eigens(g, present);
            if (present.count(n.eigen)) return fail("eigenvariable occurs in conclusion");
        }
        bool matched = false;
        for (std::size_t k = 0; k < seq.size() && !matched; ++k) {
            if (seq[k].kind != want) continue;
            std::vector<Goal> rest = without(seq, k);
            std::vector<std::vector<Goal>> expect;
            switch (n.rule) {
            case Rule::Bot: expect.push_back(rest); break;
            case Rule::Par: {
                auto r = rest;
                r.push_back(seq[k].sub[0]);
                r.push_back(seq[k].sub[1]);
                expect.push_back(std::move(r));
                break;
            }
            case Rule::With: {
                auto r1 = rest, r2 = rest;
                r1.push_back(seq[k].sub[0]);
                r2.push_back(seq[k].sub[1]);
                expect.push_back(std::move(r1));
                expect.push_back(std::move(r2));
                break;
            }
            default: {
                auto r = rest;
                r.push_back(apply(seq[k].sub[0],
                                  Substitution{{seq[k].var, Term::eigen(n.eigen)}}));
                expect.push_back(std::move(r));
                break;
            }
            }
            matched = true;
            for (std::size_t i = 0; i < arity; ++i)
                matched = matched && same_multiset(expect[i], n.premises[i].sequent);
        }
        if (!matched) return fail("premise does not follow");
        bool pushed = n.rule == Rule::Forall && eigens.insert(n.eigen).second;
        std::optional<std::string> err;
        for (const auto& p : n.premises) {
            err = check(p, eigens);
            if (err) break;
        }
        if (pushed) eigens.erase(n.eigen);
        return err;
    }

    bool term_ok(const Term& t, const std::set<std::string>& eigens) const {
        switch (t.kind) {
        case TermKind::Variable: return false;
        case TermKind::Constant:
            return sig_.constants.count(t.name) || extra_.count(t.name);
        case TermKind::Eigen: return eigens.count(t.name) > 0;
        case TermKind::Apply: {
            auto it = sig_.functions.find(t.name);
            if (it == sig_.functions.end() || it->second != t.args.size())
                return false;
            return std::all_of(t.args.begin(), t.args.end(),
                               [&](const Term& a) { return term_ok(a, eigens); });
        }
        }
        return false;
    }

    template <class Fail>
    std::optional<std::string> backchain(const ProofNode& n, std::set<std::string>& eigens,
                                         Fail& fail) {
        const auto& seq = n.sequent;
        for (const auto& g : seq)
            if (!g.is_atomic()) return fail("backchaining on a non-atomic sequent");
        if (n.clause_index >= program_.clauses.size()) return fail("no such clause");
        const Clause& c = program_.clauses[n.clause_index];
        if (c.label != n.clause_label) return fail("clause label mismatch");
        if (n.premises.size() != 1) return fail("wrong number of premises");
        if (n.grounding.domain() != free_vars(c)) return fail("grounding does not cover clause");
        for (const auto& [v, t] : n.grounding)
            if (!term_ok(t, eigens)) return fail("term " + to_string(t) + " outside signature");
        Fact head = apply(c.head, n.grounding);
        Fact atoms = atoms_of(seq);
        if (!submultiset(head, atoms)) return fail("head instance not in sequent");
        std::vector<Goal> expect = goals_of(atoms - head);
        expect.push_back(apply(c.body, n.grounding));
        if (!same_multiset(expect, n.premises[0].sequent)) return fail("premise does not follow");
        return check(n.premises[0], eigens);
    }

    const Program& program_;
    Signature sig_;
    const std::set<std::string>& extra_;
};

// Symbols of the end sequent belong to the signature the proof is over.
void add_symbols(const Term& t, Signature& sig) {
    if (t.kind == TermKind::Constant) sig.constants.insert(t.name);
    if (t.kind == TermKind::Apply) sig.functions.emplace(t.name, t.args.size());
    for (const auto& a : t.args) add_symbols(a, sig);
}

void add_symbols(const Goal& g, Signature& sig) {
    if (g.is_atomic())
        for (const auto& t : g.atom.args) add_symbols(t, sig);
    for (const auto& s : g.sub) add_symbols(s, sig);
}

} // namespace

std::optional<std::string> check_proof(const Program& program, const ProofNode& proof,
                                       const std::set<std::string>& extra_constants) {
    std::set<std::string> eigens;
    for (const auto& g : proof.sequent) goal_eigens(g, eigens);
    Signature sig = program.signature;
    for (const auto& g : proof.sequent) add_symbols(g, sig);
    return Checker(program, std::move(sig), extra_constants).check(proof, eigens);
}

std::size_t count_rule(const ProofNode& proof, Rule r) {
    std::size_t n = proof.rule == r ? 1 : 0;
    for (const auto& p : proof.premises) n += count_rule(p, r);
    return n;
}

std::size_t bc_depth(const ProofNode& proof) {
    std::size_t d = 0;
    for (const auto& p : proof.premises) d = std::max(d, bc_depth(p));
    return d + (proof.rule == Rule::Backchain ? 1 : 0);
}

bool single_branch(const ProofNode& proof) {
    if (proof.premises.size() > 1) return false;
    return proof.premises.empty() || single_branch(proof.premises[0]);
}

bool is_uniform(const ProofNode& proof) {
    if (proof.rule == Rule::Backchain)
        for (const auto& g : proof.sequent)
            if (!g.is_atomic()) return false;
    return std::all_of(proof.premises.begin(), proof.premises.end(), is_uniform);
}

std::string print_sequent(const std::vector<Goal>& ctx) {
    std::string out = "|- ";
    for (std::size_t i = 0; i < ctx.size(); ++i) {
        if (i) out += ", ";
        bool wrap = ctx[i].kind == Goal::Kind::Par || ctx[i].kind == Goal::Kind::With ||
                    ctx[i].kind == Goal::Kind::Forall;
        out += wrap ? "(" + print(ctx[i]) + ")" : print(ctx[i]);
    }
    return out;
}

namespace {

void print_node(const ProofNode& n, std::size_t indent, std::string& out) {
    out += std::string(indent * 2, ' ');
    out += to_string(n.rule);
    if (n.rule == Rule::Backchain) out += "(" + n.clause_label + ")";
    if (n.rule == Rule::Forall) out += "(" + n.eigen + ")";
    out += "  " + print_sequent(n.sequent) + "\n";
    for (const auto& p : n.premises) print_node(p, indent + 1, out);
}

} // namespace

std::string print_proof(const ProofNode& proof) {
    std::string out;
    print_node(proof, 0, out);
    return out;
}

} // namespace lo
