// Counterexample replay: walks the provenance archive from a goal back to
// top-bodied clauses, producing a ground proof.

#include <algorithm>
#include <stdexcept>

#include "lo/engine.hpp"
#include "lo/unify.hpp"

namespace lo {

namespace {

class Replayer {
public:
    Replayer(const Program& program, const FixpointResult& result)
        : program_(program), result_(result) {}

    Term fresh_constant() {
        for (;;) {
            std::string name = "k" + std::to_string(next_constant_++);
            if (program_.signature.declares(name)) continue;
            constants_.insert(name);
            return Term::constant(name);
        }
    }

    ProofNode replay(std::vector<Goal> ctx, std::size_t budget) {
        if (budget == 0) throw std::logic_error("trace replay does not terminate");
        ProofNode node;
        node.sequent = ctx;
        for (const auto& g : ctx) {
            if (g.kind == Goal::Kind::Top) {
                node.rule = Rule::Top;
                return node;
            }
        }
        std::size_t k = 0;
        while (k < ctx.size() && ctx[k].is_atomic()) ++k;
        if (k == ctx.size()) return backchain(ctx, budget);

        Goal g = ctx[k];
        ctx.erase(ctx.begin() + static_cast<std::ptrdiff_t>(k));
        switch (g.kind) {
        case Goal::Kind::Bot:
            node.rule = Rule::Bot;
            node.premises.push_back(replay(std::move(ctx), budget));
            break;
        case Goal::Kind::Par:
            node.rule = Rule::Par;
            ctx.push_back(g.sub[0]);
            ctx.push_back(g.sub[1]);
            node.premises.push_back(replay(std::move(ctx), budget));
            break;
        case Goal::Kind::Forall:
            node.rule = Rule::Forall;
            node.eigen = "_r" + std::to_string(next_eigen_++);
            ctx.push_back(apply(g.sub[0], Substitution{{g.var, Term::eigen(node.eigen)}}));
            node.premises.push_back(replay(std::move(ctx), budget));
            break;
        case Goal::Kind::With: {
            node.rule = Rule::With;
            auto left = ctx;
            left.push_back(g.sub[0]);
            ctx.push_back(g.sub[1]);
            node.premises.push_back(replay(std::move(left), budget));
            node.premises.push_back(replay(std::move(ctx), budget));
            break;
        }
        default:
            throw std::logic_error("unexpected goal in replay");
        }
        return node;
    }

private:
    ProofNode backchain(const std::vector<Goal>& ctx, std::size_t budget) {
        std::vector<Atom> as;
        for (const auto& g : ctx) as.push_back(g.atom);
        Fact atoms(std::move(as));

        // The oldest archived fact covering the configuration; its own
        // premises are then covered by strictly older facts.
        const ProvenanceRecord* best = nullptr;
        std::optional<EntailmentWitness> witness;
        for (const auto& r : result_.archive) {
            if (best && r.round >= best->round) continue;
            if (auto w = entails_fact(atoms, r.fact)) {
                best = &r;
                witness = std::move(w);
            }
        }
        if (!best)
            throw std::logic_error("provenance gap at " + print_braced(atoms));

        // Ground every variant variable through theta, the canonical renaming
        // and the entailment witness; leftovers get fresh constants.
        const Clause& clause = program_.clauses[best->clause_index];
        VarSet vvars = free_vars(best->variant);
        Substitution to_ground;
        VarSet leftovers;
        for (const auto& v : vvars) {
            Term t = apply(apply(apply(Term::var(v), best->theta), best->canon), witness->theta);
            if (t.kind == TermKind::Variable && t.name == v) leftovers.insert(v);
            else to_ground.bind(v, t);
        }
        VarSet open = to_ground.range_vars();
        leftovers.insert(open.begin(), open.end());
        Substitution fill;
        for (const auto& v : leftovers) fill.bind(v, fresh_constant());
        to_ground = compose(to_ground, fill);
        Substitution grounding = pair_variables(clause, best->variant, to_ground);

        Fact head = apply(clause.head, grounding);
        if (!submultiset(head, atoms))
            throw std::logic_error("replayed head " + print_braced(head) + " not in " +
                                   print_braced(atoms));
        std::vector<Goal> next = goals_of(atoms - head);
        next.push_back(apply(clause.body, grounding));

        ProofNode node;
        node.rule = Rule::Backchain;
        node.sequent = ctx;
        node.clause_index = best->clause_index;
        node.clause_label = clause.label;
        node.grounding = grounding;
        node.premises.push_back(replay(std::move(next), budget - 1));
        return node;
    }

    // Pulls a grounding of the variant back onto the clause's own variables.
    static Substitution pair_variables(const Clause& clause, const Clause& variant,
                                       const Substitution& ground_variant) {
        Substitution out;
        std::vector<std::pair<const Goal*, const Goal*>> stack{{&clause.body, &variant.body}};
        MatchMap m;
        for (std::size_t i = 0; i < clause.head.size(); ++i) match_into(m, clause.head[i], variant.head[i]);
        while (!stack.empty()) {
            auto [a, b] = stack.back();
            stack.pop_back();
            if (a->is_atomic()) match_into(m, a->atom, b->atom);
            for (std::size_t i = 0; i < a->sub.size(); ++i) stack.push_back({&a->sub[i], &b->sub[i]});
        }
        for (const auto& v : free_vars(clause)) {
            auto it = m.find(v);
            if (it == m.end()) continue;
            out.bind(v, apply(it->second, ground_variant));
        }
        return out;
    }

    const Program& program_;
    const FixpointResult& result_;
    std::set<std::string> constants_;
    std::size_t next_constant_ = 0;
    std::size_t next_eigen_ = 0;

public:
    const std::set<std::string>& constants() const { return constants_; }
};

void linearize(const ProofNode& n, std::size_t depth, std::vector<TraceStep>& out) {
    if (n.rule == Rule::Backchain) out.push_back({n.clause_label, n.grounding, n.sequent, depth});
    std::size_t next = depth + (n.rule == Rule::With ? 1 : 0);
    for (const auto& p : n.premises) linearize(p, next, out);
}

} // namespace

Trace extract_trace(const Program& program, const FixpointResult& result, const Goal& goal) {
    Replayer rp(program, result);
    Substitution close;
    for (const auto& v : free_vars(goal)) close.bind(v, rp.fresh_constant());
    std::size_t budget = 4 * result.archive.size() + 16;
    Trace t;
    t.proof = rp.replay({apply(goal, close)}, budget);
    t.fresh_constants = rp.constants();
    linearize(t.proof, 0, t.steps);
    if (auto err = check_proof(program, t.proof, t.fresh_constants))
        throw std::logic_error("replayed trace rejected: " + *err);
    return t;
}

std::vector<std::string> step_summary(const Trace& trace) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < trace.steps.size()) {
        std::size_t j = i;
        while (j < trace.steps.size() && trace.steps[j].clause_label == trace.steps[i].clause_label &&
               trace.steps[j].depth == trace.steps[i].depth)
            ++j;
        out.push_back(trace.steps[i].clause_label + (j - i > 1 ? "*" : ""));
        i = j;
    }
    return out;
}

} // namespace lo
