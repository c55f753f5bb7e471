#pragma once

// Syntactic unification over terms, atoms and multisets of atoms.

#include <optional>
#include <vector>

#include "lo/kernel.hpp"

namespace lo {

/// Adds the equation a = b to the solved form `s`. On failure `s` is left in
/// an unspecified state. Variable-variable equations bind the left variable.
bool unify_into(Substitution& s, const Term& a, const Term& b);
bool unify_into(Substitution& s, const Atom& a, const Atom& b);

std::optional<Substitution> mgu(const Term& a, const Term& b);
std::optional<Substitution> mgu(const Atom& a, const Atom& b);

/// Non-equivalent mgus of every bijection between `a` and `b`.
/// Throws std::invalid_argument when the sizes differ.
std::vector<Substitution> mgu_multisets(const Fact& a, const Fact& b);

/// Most general common instance of two substitutions, if any.
std::optional<Substitution> subst_lub(const Substitution& a, const Substitution& b);

/// Bindings of a one-way match. Unlike Substitution it keeps x := x, which
/// matters when pattern and target share variable names.
using MatchMap = std::map<std::string, Term>;

/// One-way matching: extends `m` so that pattern·m == target. Variables of
/// `target` are treated as constants.
bool match_into(MatchMap& m, const Term& pattern, const Term& target);
bool match_into(MatchMap& m, const Atom& pattern, const Atom& target);
Substitution to_substitution(const MatchMap& m);

/// a ≤ b in the instance ordering: b = compose(a, σ) on the variables in `vars`.
bool more_general(const Substitution& a, const Substitution& b, const VarSet& vars);

} // namespace lo
