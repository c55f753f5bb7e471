#pragma once

// Value algebra shared by every module: terms, atoms, facts (multisets of
// atoms), substitutions, signatures and the fresh-name supply.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lo {

enum class TermKind : std::uint8_t { Variable, Constant, Eigen, Apply };

struct Term {
    TermKind kind = TermKind::Constant;
    std::string name;
    std::vector<Term> args;

    static Term var(std::string name);
    static Term constant(std::string name);
    static Term eigen(std::string name);
    static Term apply(std::string function, std::vector<Term> args);

    bool is_var() const { return kind == TermKind::Variable; }
    bool is_ground() const;
    std::size_t depth() const;

    friend bool operator==(const Term& a, const Term& b);
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);
};

struct Atom {
    std::string predicate;
    std::vector<Term> args;

    Atom() = default;
    explicit Atom(std::string pred, std::vector<Term> a = {})
        : predicate(std::move(pred)), args(std::move(a)) {}

    bool is_ground() const;

    friend bool operator==(const Atom& a, const Atom& b);
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

/// A multiset of atoms. Atoms are kept sorted so that equal multisets compare
/// equal element-wise.
class Fact {
public:
    Fact() = default;
    Fact(std::initializer_list<Atom> atoms);
    explicit Fact(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }
    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }
    const Atom& operator[](std::size_t i) const { return atoms_[i]; }

    void insert(Atom atom);
    std::size_t count(const Atom& atom) const;
    bool is_ground() const;

    friend bool operator==(const Fact& a, const Fact& b) = default;
    friend std::strong_ordering operator<=>(const Fact& a, const Fact& b);

private:
    std::vector<Atom> atoms_;
};

// Multiset algebra.
Fact operator+(const Fact& a, const Fact& b);
Fact operator-(const Fact& a, const Fact& b);   // truncated at zero
Fact meet(const Fact& a, const Fact& b);        // pointwise min
Fact merge(const Fact& a, const Fact& b);       // pointwise max
bool submultiset(const Fact& a, const Fact& b); // a ⊑ b

/// All distinct sub-multisets of `f`, largest first.
std::vector<Fact> submultisets(const Fact& f);
/// Distinct sub-multisets of `f` with exactly `k` atoms.
std::vector<Fact> submultisets(const Fact& f, std::size_t k);

using VarSet = std::set<std::string>;

void collect_vars(const Term& t, VarSet& out);
void collect_vars(const Atom& a, VarSet& out);
void collect_vars(const Fact& f, VarSet& out);
VarSet vars_of(const Fact& f);
bool occurs(const std::string& var, const Term& t);
bool mentions_eigen(const Term& t, const std::string& eigen);
bool mentions_eigen(const Fact& f, const std::string& eigen);
void collect_constants(const Term& t, std::set<std::string>& out);

/// Finite map from variable names to terms. Every substitution built by the
/// library is idempotent and never binds a variable to itself.
class Substitution {
public:
    using Map = std::map<std::string, Term>;

    Substitution() = default;
    Substitution(std::initializer_list<std::pair<const std::string, Term>> init);

    const Term* lookup(const std::string& var) const;
    void bind(const std::string& var, Term t);
    void erase(const std::string& var) { map_.erase(var); }

    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }
    VarSet domain() const;
    VarSet range_vars() const;
    bool is_idempotent() const;
    const Map& bindings() const { return map_; }
    auto begin() const { return map_.begin(); }
    auto end() const { return map_.end(); }

    friend bool operator==(const Substitution& a, const Substitution& b) = default;

private:
    Map map_;
};

Term apply(const Term& t, const Substitution& s);
Atom apply(const Atom& a, const Substitution& s);
Fact apply(const Fact& f, const Substitution& s);

/// apply(t, compose(a, b)) == apply(apply(t, a), b).
Substitution compose(const Substitution& a, const Substitution& b);
Substitution restrict(const Substitution& s, const VarSet& vars);

/// Replaces eigenvariable `eigen` by `replacement` everywhere.
Term replace_eigen(const Term& t, const std::string& eigen, const Term& replacement);

struct Signature {
    std::set<std::string> constants;
    std::map<std::string, std::size_t> functions;
    std::map<std::string, std::size_t> predicates;
    std::set<std::string> eigenvariables;

    /// True iff every symbol of this signature is also in `other`.
    bool subset_of(const Signature& other) const;
    bool declares(const std::string& name) const;
};

/// Per-analysis supply of fresh names. Generated names start with '_', which
/// the `.lo` lexer never accepts, so they cannot clash with user names.
class NameSupply {
public:
    std::string fresh_var();
    std::string fresh_eigen();
    std::uint64_t issued() const { return next_; }

private:
    std::uint64_t next_ = 0;
};

/// Renames every variable of `f` apart. Returns the variant and the renaming.
std::pair<Fact, Substitution> fresh_variant(const Fact& f, NameSupply& names);

/// Deterministic representative of the variant class of `f`: variables are
/// renamed X0, X1, ... in the order of the lexicographically least
/// serialization of the atoms.
Fact canonicalize(const Fact& f);
/// Same as canonicalize but returns the renaming applied to `f`.
Fact canonicalize(const Fact& f, Substitution& renaming);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);

} // namespace lo
