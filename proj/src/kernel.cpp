#include "lo/kernel.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace lo {

// ---------------------------------------------------------------- terms

Term Term::var(std::string name) { return Term{TermKind::Variable, std::move(name), {}}; }
Term Term::constant(std::string name) { return Term{TermKind::Constant, std::move(name), {}}; }
Term Term::eigen(std::string name) { return Term{TermKind::Eigen, std::move(name), {}}; }
Term Term::apply(std::string function, std::vector<Term> args) {
    return Term{TermKind::Apply, std::move(function), std::move(args)};
}

bool Term::is_ground() const {
    if (kind == TermKind::Variable) return false;
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

std::size_t Term::depth() const {
    std::size_t d = 0;
    for (const auto& a : args) d = std::max(d, a.depth() + 1);
    return d;
}

bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name && a.args == b.args;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                  b.args.end());
}

bool Atom::is_ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& t) { return t.is_ground(); });
}

bool operator==(const Atom& a, const Atom& b) {
    return a.predicate == b.predicate && a.args == b.args;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                  b.args.end());
}

// ---------------------------------------------------------------- facts

Fact::Fact(std::initializer_list<Atom> atoms) : atoms_(atoms) {
    std::sort(atoms_.begin(), atoms_.end());
}

Fact::Fact(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end());
}

void Fact::insert(Atom atom) {
    auto pos = std::upper_bound(atoms_.begin(), atoms_.end(), atom);
    atoms_.insert(pos, std::move(atom));
}

std::size_t Fact::count(const Atom& atom) const {
    auto [lo, hi] = std::equal_range(atoms_.begin(), atoms_.end(), atom);
    return static_cast<std::size_t>(hi - lo);
}

bool Fact::is_ground() const {
    return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.is_ground(); });
}

std::strong_ordering operator<=>(const Fact& a, const Fact& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

Fact operator+(const Fact& a, const Fact& b) {
    std::vector<Atom> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return Fact(std::move(out));
}

Fact operator-(const Fact& a, const Fact& b) {
    std::vector<Atom> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return Fact(std::move(out));
}

Fact meet(const Fact& a, const Fact& b) {
    std::vector<Atom> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return Fact(std::move(out));
}

Fact merge(const Fact& a, const Fact& b) {
    std::vector<Atom> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return Fact(std::move(out));
}

bool submultiset(const Fact& a, const Fact& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

struct Group {
    const Atom* atom;
    std::size_t count;
};

std::vector<Group> group_atoms(const Fact& f) {
    std::vector<Group> groups;
    for (const auto& a : f) {
        if (!groups.empty() && *groups.back().atom == a) {
            ++groups.back().count;
        } else {
            groups.push_back({&a, 1});
        }
    }
    return groups;
}

void enumerate_sub(const std::vector<Group>& groups, std::size_t gi, std::size_t remaining,
                   bool exact, std::vector<Atom>& cur, std::vector<Fact>& out) {
    if (gi == groups.size()) {
        if (!exact || remaining == 0) out.emplace_back(cur);
        return;
    }
    const auto& g = groups[gi];
    std::size_t max_take = exact ? std::min(g.count, remaining) : g.count;
    for (std::size_t take = max_take + 1; take-- > 0;) {
        for (std::size_t i = 0; i < take; ++i) cur.push_back(*g.atom);
        enumerate_sub(groups, gi + 1, exact ? remaining - take : 0, exact, cur, out);
        cur.resize(cur.size() - take);
    }
}

} // namespace

std::vector<Fact> submultisets(const Fact& f) {
    std::vector<Fact> out;
    std::vector<Atom> cur;
    enumerate_sub(group_atoms(f), 0, 0, false, cur, out);
    std::stable_sort(out.begin(), out.end(),
                     [](const Fact& a, const Fact& b) { return a.size() > b.size(); });
    return out;
}

std::vector<Fact> submultisets(const Fact& f, std::size_t k) {
    std::vector<Fact> out;
    if (k > f.size()) return out;
    std::vector<Atom> cur;
    enumerate_sub(group_atoms(f), 0, k, true, cur, out);
    return out;
}

// ---------------------------------------------------------------- variables

void collect_vars(const Term& t, VarSet& out) {
    if (t.kind == TermKind::Variable) {
        out.insert(t.name);
        return;
    }
    for (const auto& a : t.args) collect_vars(a, out);
}

void collect_vars(const Atom& a, VarSet& out) {
    for (const auto& t : a.args) collect_vars(t, out);
}

void collect_vars(const Fact& f, VarSet& out) {
    for (const auto& a : f) collect_vars(a, out);
}

VarSet vars_of(const Fact& f) {
    VarSet out;
    collect_vars(f, out);
    return out;
}

bool occurs(const std::string& var, const Term& t) {
    if (t.kind == TermKind::Variable) return t.name == var;
    return std::any_of(t.args.begin(), t.args.end(),
                       [&](const Term& a) { return occurs(var, a); });
}

bool mentions_eigen(const Term& t, const std::string& eigen) {
    if (t.kind == TermKind::Eigen) return t.name == eigen;
    return std::any_of(t.args.begin(), t.args.end(),
                       [&](const Term& a) { return mentions_eigen(a, eigen); });
}

bool mentions_eigen(const Fact& f, const std::string& eigen) {
    for (const auto& a : f)
        for (const auto& t : a.args)
            if (mentions_eigen(t, eigen)) return true;
    return false;
}

void collect_constants(const Term& t, std::set<std::string>& out) {
    if (t.kind == TermKind::Constant) out.insert(t.name);
    for (const auto& a : t.args) collect_constants(a, out);
}

// ---------------------------------------------------------------- substitutions

Substitution::Substitution(std::initializer_list<std::pair<const std::string, Term>> init) {
    for (const auto& [v, t] : init) bind(v, t);
}

const Term* Substitution::lookup(const std::string& var) const {
    auto it = map_.find(var);
    return it == map_.end() ? nullptr : &it->second;
}

void Substitution::bind(const std::string& var, Term t) {
    if (t.kind == TermKind::Variable && t.name == var) {
        map_.erase(var);
        return;
    }
    map_.insert_or_assign(var, std::move(t));
}

VarSet Substitution::domain() const {
    VarSet out;
    for (const auto& [v, t] : map_) out.insert(v);
    return out;
}

VarSet Substitution::range_vars() const {
    VarSet out;
    for (const auto& [v, t] : map_) collect_vars(t, out);
    return out;
}

bool Substitution::is_idempotent() const {
    for (const auto& [v, t] : map_) {
        if (t.kind == TermKind::Variable && t.name == v) return false;
        VarSet vs;
        collect_vars(t, vs);
        for (const auto& x : vs)
            if (map_.count(x)) return false;
    }
    return true;
}

Term apply(const Term& t, const Substitution& s) {
    switch (t.kind) {
    case TermKind::Variable:
        if (const Term* b = s.lookup(t.name)) return *b;
        return t;
    case TermKind::Constant:
    case TermKind::Eigen:
        return t;
    case TermKind::Apply: {
        Term out{TermKind::Apply, t.name, {}};
        out.args.reserve(t.args.size());
        for (const auto& a : t.args) out.args.push_back(apply(a, s));
        return out;
    }
    }
    return t;
}

Atom apply(const Atom& a, const Substitution& s) {
    Atom out;
    out.predicate = a.predicate;
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(t, s));
    return out;
}

Fact apply(const Fact& f, const Substitution& s) {
    if (s.empty()) return f;
    std::vector<Atom> out;
    out.reserve(f.size());
    for (const auto& a : f) out.push_back(apply(a, s));
    return Fact(std::move(out));
}

Substitution compose(const Substitution& a, const Substitution& b) {
    Substitution out;
    for (const auto& [v, t] : a) out.bind(v, apply(t, b));
    for (const auto& [v, t] : b)
        if (!a.lookup(v)) out.bind(v, t);
    return out;
}

Substitution restrict(const Substitution& s, const VarSet& vars) {
    Substitution out;
    for (const auto& [v, t] : s)
        if (vars.count(v)) out.bind(v, t);
    return out;
}

Term replace_eigen(const Term& t, const std::string& eigen, const Term& replacement) {
    if (t.kind == TermKind::Eigen) return t.name == eigen ? replacement : t;
    if (t.kind != TermKind::Apply) return t;
    Term out{TermKind::Apply, t.name, {}};
    for (const auto& a : t.args) out.args.push_back(replace_eigen(a, eigen, replacement));
    return out;
}

// ---------------------------------------------------------------- signatures

bool Signature::subset_of(const Signature& other) const {
    for (const auto& c : constants)
        if (!other.constants.count(c)) return false;
    for (const auto& [f, n] : functions) {
        auto it = other.functions.find(f);
        if (it == other.functions.end() || it->second != n) return false;
    }
    for (const auto& [p, n] : predicates) {
        auto it = other.predicates.find(p);
        if (it == other.predicates.end() || it->second != n) return false;
    }
    for (const auto& e : eigenvariables)
        if (!other.eigenvariables.count(e)) return false;
    return true;
}

bool Signature::declares(const std::string& name) const {
    return constants.count(name) || functions.count(name) || predicates.count(name) ||
           eigenvariables.count(name);
}

std::string NameSupply::fresh_var() { return "_" + std::to_string(next_++); }
std::string NameSupply::fresh_eigen() { return "_c" + std::to_string(next_++); }

std::pair<Fact, Substitution> fresh_variant(const Fact& f, NameSupply& names) {
    Substitution renaming;
    for (const auto& v : vars_of(f)) renaming.bind(v, Term::var(names.fresh_var()));
    return {apply(f, renaming), renaming};
}

// ---------------------------------------------------------------- canonical form

namespace {

using VarIndex = std::map<std::string, std::size_t>;

void serialize(const Term& t, VarIndex& vars, std::size_t& next, std::string& out) {
    switch (t.kind) {
    case TermKind::Variable: {
        auto [it, fresh] = vars.try_emplace(t.name, next);
        if (fresh) ++next;
        out += '#';
        out += std::to_string(it->second);
        return;
    }
    case TermKind::Constant:
        out += t.name;
        return;
    case TermKind::Eigen:
        out += '!';
        out += t.name;
        return;
    case TermKind::Apply:
        out += t.name;
        out += '(';
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i) out += ',';
            serialize(t.args[i], vars, next, out);
        }
        out += ')';
        return;
    }
}

std::string serialize(const Atom& a, VarIndex& vars, std::size_t& next) {
    std::string out = a.predicate;
    out += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ',';
        serialize(a.args[i], vars, next, out);
    }
    out += ')';
    return out;
}

// Exhaustive search for the least token sequence, branching only on ties.
// Symmetric facts can make the tie tree large, so the number of completed
// orderings is capped; past the cap the best ordering found so far is used.
class Canonicalizer {
public:
    explicit Canonicalizer(const Fact& f) : atoms_(f.atoms()), used_(f.size(), false) {}

    VarIndex run() {
        VarIndex vars;
        std::vector<std::string> seq;
        search(vars, 0, seq);
        return best_vars_;
    }

private:
    static constexpr std::size_t kLeafCap = 20000;

    void search(VarIndex& vars, std::size_t next, std::vector<std::string>& seq) {
        if (leaves_ >= kLeafCap) return;
        if (seq.size() == atoms_.size()) {
            ++leaves_;
            if (!have_best_ || seq < best_) {
                best_ = seq;
                best_vars_ = vars;
                have_best_ = true;
            }
            return;
        }
        std::vector<std::pair<std::string, std::size_t>> tokens;
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            if (used_[i]) continue;
            VarIndex tmp = vars;
            std::size_t n = next;
            tokens.emplace_back(serialize(atoms_[i], tmp, n), i);
        }
        const std::string& least =
            std::min_element(tokens.begin(), tokens.end())->first;
        if (have_best_) {
            auto depth = seq.size();
            for (std::size_t k = 0; k <= depth; ++k) {
                const std::string& mine = k < depth ? seq[k] : least;
                if (mine < best_[k]) break;
                if (mine > best_[k]) return;
            }
        }
        std::vector<const Atom*> tried;
        for (const auto& [tok, i] : tokens) {
            if (tok != least) continue;
            if (std::any_of(tried.begin(), tried.end(),
                            [&](const Atom* a) { return *a == atoms_[i]; }))
                continue;
            tried.push_back(&atoms_[i]);
            VarIndex saved = vars;
            std::size_t n = next;
            serialize(atoms_[i], vars, n);
            used_[i] = true;
            seq.push_back(tok);
            search(vars, n, seq);
            seq.pop_back();
            used_[i] = false;
            vars = std::move(saved);
        }
    }

    const std::vector<Atom>& atoms_;
    std::vector<bool> used_;
    std::vector<std::string> best_;
    VarIndex best_vars_;
    bool have_best_ = false;
    std::size_t leaves_ = 0;
};

} // namespace

Fact canonicalize(const Fact& f, Substitution& renaming) {
    renaming = Substitution{};
    if (f.is_ground()) return f;
    VarIndex index = Canonicalizer(f).run();
    for (const auto& [v, i] : index) renaming.bind(v, Term::var("X" + std::to_string(i)));
    // Binding X_i -> X_j chains cannot arise: apply is simultaneous.
    return apply(f, renaming);
}

Fact canonicalize(const Fact& f) {
    Substitution ignored;
    return canonicalize(f, ignored);
}

// ---------------------------------------------------------------- printing

std::string to_string(const Term& t) {
    if (t.kind != TermKind::Apply) return t.name;
    std::string out = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ",";
        out += to_string(t.args[i]);
    }
    return out + ")";
}

std::string to_string(const Atom& a) {
    if (a.args.empty()) return a.predicate;
    std::string out = a.predicate + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ",";
        out += to_string(a.args[i]);
    }
    return out + ")";
}

} // namespace lo
