#pragma once

// Entailment between facts and interpretations, the abstract satisfiability
// judgment that drives the bottom-up engine, and its concrete counterpart used
// as a test oracle.

#include <optional>
#include <vector>

#include "lo/kernel.hpp"
#include "lo/syntax.hpp"

namespace lo {

struct Interpretation {
    std::vector<Fact> facts;

    std::size_t size() const { return facts.size(); }
    bool empty() const { return facts.empty(); }
};

struct EntailmentWitness {
    Substitution theta; // binds variables of the entailed fact
    Fact rest;          // a = b·theta + rest
};

/// Does `a` entail `b`, i.e. a = b·θ + C? Variables of `a` stay rigid.
std::optional<EntailmentWitness> entails_fact(const Fact& a, const Fact& b);

/// Index of some element of `interp` entailed by `f`.
std::optional<std::size_t> denotation_member(const Interpretation& interp, const Fact& f);

/// Every fact of `i` entails some fact of `j`.
bool entails_interp(const Interpretation& i, const Interpretation& j);

struct JudgmentOutput {
    Fact out;
    Substitution theta;
    /// Indices into the interpretation of the facts used by atom cases.
    std::vector<std::size_t> used;
};

struct AsatOptions {
    /// Skip atom-case selections that match nothing.
    bool prune_trivial = true;
    /// Drop outputs subsumed by another output.
    bool prune_outputs = false;
    /// When set, atom cases only use interpretation facts whose flag is true.
    const std::vector<bool>* active = nullptr;
};

/// All outputs (C, θ) of the judgment ⟨I⟩ ⊢ Δ ⊳ C ; θ, deduplicated up to
/// renaming.
std::vector<JudgmentOutput> asat(const Interpretation& interp, const std::vector<Goal>& ctx,
                                 NameSupply& names, const AsatOptions& opts = {});

/// Concrete judgment over the denotation of `interp`. Δ and C must be ground
/// (eigenvariables allowed).
bool concrete_sat(const Interpretation& interp, const std::vector<Goal>& ctx, const Fact& c,
                  NameSupply& names);

/// Variables of a goal context.
VarSet free_vars(const std::vector<Goal>& ctx);

/// Output (c2, t2) is covered by (c1, t1): some σ with t1·σ = t2 on `vars` and
/// c1·σ ⊑ c2.
bool output_subsumes(const JudgmentOutput& general, const JudgmentOutput& specific,
                     const VarSet& vars);

} // namespace lo
