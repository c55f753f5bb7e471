#pragma once

// LO∀ abstract syntax, the `.lo` reader and the printer.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lo/kernel.hpp"

namespace lo {

struct Goal {
    enum class Kind : std::uint8_t { Top, Bot, Atomic, Par, With, Forall };

    Kind kind = Kind::Top;
    Atom atom;             // Atomic
    std::string var;       // Forall
    std::vector<Goal> sub; // Par, With: two children; Forall: one

    static Goal top() { return Goal{}; }
    static Goal bot();
    static Goal atomic(Atom a);
    static Goal par(Goal l, Goal r);
    static Goal with(Goal l, Goal r);
    static Goal forall(std::string v, Goal body);

    bool is_atomic() const { return kind == Kind::Atomic; }

    friend bool operator==(const Goal&, const Goal&) = default;
};

struct SourcePos {
    int line = 0;
    int column = 0;
};

struct Clause {
    Fact head; // empty for a bot head
    Goal body;
    std::string label;
    SourcePos pos;
};

enum class ClauseClass { RewriteRule, QuantifiedRewriteRule, General };

struct Program {
    std::vector<Clause> clauses;
    Signature signature;
    std::vector<std::string> warnings;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

Program parse_program(std::string_view text);
Goal parse_goal(std::string_view text);
/// Accepts `a | b`, `{a, b}` and `{}`.
Fact parse_fact(std::string_view text);

std::string print(const Goal& g);
std::string print(const Clause& c);
std::string print(const Program& p);
std::string print(const Fact& f);          // "p(X0) | q(X0)", "{}" when empty
std::string print_braced(const Fact& f);   // "{p(X0), q(X0)}"
std::string print(const Substitution& s);  // "[X := t, ...]"

ClauseClass classify_clause(const Clause& c);
const char* to_string(ClauseClass c);

/// Constants, functions and predicates occurring in the clauses.
Signature derive_signature(const std::vector<Clause>& clauses);

VarSet free_vars(const Goal& g);
VarSet free_vars(const Clause& c);
/// Constants and eigenvariables occurring in a goal.
void collect_symbols(const Goal& g, Signature& out);

/// Capture-avoiding substitution of free variables.
Goal apply(const Goal& g, const Substitution& s);

/// Fresh renaming of the free variables of a clause.
Clause fresh_variant(const Clause& c, NameSupply& names, Substitution* renaming = nullptr);

/// Atoms of a pure par-tree, or nothing when the goal has another shape.
bool par_atoms(const Goal& g, std::vector<Atom>& out);

/// Appends `extra` after `base`, numbering the new clauses after the old ones.
Program merge_programs(const Program& base, const Program& extra);

} // namespace lo
