#pragma once

// Bottom-up evaluation: the symbolic immediate-consequence operator, subsumption
// reduction, the fixpoint loop with provenance, goal checking, trace replay and
// the monadic fragment.

#include <optional>
#include <string>
#include <vector>

#include "lo/judgment.hpp"
#include "lo/prover.hpp"
#include "lo/syntax.hpp"

namespace lo {

struct ProvenanceRecord {
    Fact fact; // canonical
    std::string clause_label;
    std::size_t clause_index = 0;
    Clause variant;         // fresh variant of the clause that fired
    Substitution theta;     // judgment output substitution
    Fact raw;               // (head + C)·theta before renaming
    Substitution canon;     // raw·canon == fact
    std::vector<Fact> used_facts;
    std::size_t round = 0;  // first interpretation containing the fact
};

struct StepOptions {
    AsatOptions asat;
    /// Restricts clauses whose body needs a single fact to the flagged
    /// interpretation facts.
    const std::vector<bool>* active = nullptr;
};

/// One application of the operator: every (canonical) fact derivable from `interp`.
std::vector<ProvenanceRecord> sp_step(const Program& program, const Interpretation& interp,
                                      NameSupply& names, const StepOptions& opts = {});

/// Removes facts entailed by other facts. Earlier facts win ties.
Interpretation reduce(const Interpretation& interp);

struct FixpointOptions {
    std::size_t max_rounds = 1000;
    bool prune_trivial = true;
    bool prune_outputs = false;
    /// Feed only last round's new facts to single-fact clauses; a full round
    /// confirms stability.
    bool delta = false;
};

struct FixpointResult {
    Interpretation interpretation;
    std::size_t rounds = 0;
    bool terminated = false;
    bool monadic_guarantee = false;
    /// One record per fact ever admitted, in admission order. Facts later
    /// removed by reduce stay here for trace replay.
    std::vector<ProvenanceRecord> archive;
    /// archive index of each fact of `interpretation`.
    std::vector<std::size_t> provenance;
};

FixpointResult fixpoint(const Program& program, const FixpointOptions& opts = {});

struct GoalWitness {
    JudgmentOutput output;
    std::vector<Fact> used_facts;
};

/// Is the goal in the denotation of the fixpoint?
std::optional<GoalWitness> check_goal(const FixpointResult& result, const Goal& goal);

struct TraceStep {
    std::string clause_label;
    Substitution grounding; // original clause variables -> ground terms
    std::vector<Goal> configuration;
    std::size_t depth = 0;  // nesting under & branches
};

struct Trace {
    ProofNode proof;
    std::vector<TraceStep> steps;
    /// Constants invented to ground leftover variables.
    std::set<std::string> fresh_constants;
};

/// Replays provenance from the goal down to top-bodied clauses and returns a
/// proof checked by check_proof. Throws std::logic_error on a provenance gap.
Trace extract_trace(const Program& program, const FixpointResult& result, const Goal& goal);

/// Compresses consecutive steps with the same clause: "1*", "2*", "8".
std::vector<std::string> step_summary(const Trace& trace);

struct MonadicReport {
    bool monadic = true;
    std::vector<std::string> diagnostics;
};

MonadicReport is_monadic(const Program& program);

struct MonadizeResult {
    bool applicable = false;
    Program program;
    /// Folded argument positions (0-based) per original predicate.
    std::map<std::string, std::vector<bool>> folded;
    /// Predicates left untouched; folded names avoid them.
    std::set<std::string> reserved;
    std::string blocking_predicate;
    std::size_t blocking_position = 0; // 1-based
    std::string reason;
};

/// Folds constant-only argument positions into predicate names.
MonadizeResult monadize(const Program& program);
/// Applies the folding of `m` to a goal over the original program.
Goal fold_goal(const MonadizeResult& m, const Goal& g);
Fact fold_fact(const MonadizeResult& m, const Fact& f);

/// Multiset of predicate multisets, each sorted; the outer list is sorted.
using Clusters = std::vector<std::vector<std::string>>;

/// Groups the predicates of a monadic fact by variable. Constant arguments
/// and nullary atoms become singleton groups. Throws std::invalid_argument
/// on non-monadic input.
Clusters cluster(const Fact& f);
/// Injective map from `small` into `big` with inclusion.
bool entails_cluster(const Clusters& big, const Clusters& small);
std::string to_string(const Clusters& c);

} // namespace lo
