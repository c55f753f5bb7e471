#include "lo/syntax.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace lo {

Goal Goal::bot() {
    Goal g;
    g.kind = Kind::Bot;
    return g;
}

Goal Goal::atomic(Atom a) {
    Goal g;
    g.kind = Kind::Atomic;
    g.atom = std::move(a);
    return g;
}

Goal Goal::par(Goal l, Goal r) {
    Goal g;
    g.kind = Kind::Par;
    g.sub.push_back(std::move(l));
    g.sub.push_back(std::move(r));
    return g;
}

Goal Goal::with(Goal l, Goal r) {
    Goal g;
    g.kind = Kind::With;
    g.sub.push_back(std::move(l));
    g.sub.push_back(std::move(r));
    return g;
}

Goal Goal::forall(std::string v, Goal body) {
    Goal g;
    g.kind = Kind::Forall;
    g.var = std::move(v);
    g.sub.push_back(std::move(body));
    return g;
}

ParseError::ParseError(const std::string& msg, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line), column_(column) {}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { LParen, RParen, LBrace, RBrace, Comma, Dot, Bar, Amp, Arrow, Var, Name, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

const char* describe(Tok t) {
    switch (t) {
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Bar: return "'|'";
    case Tok::Amp: return "'&'";
    case Tok::Arrow: return "'<-'";
    case Tok::Var: return "variable";
    case Tok::Name: return "name";
    case Tok::End: return "end of input";
    }
    return "?";
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '%') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        int l = line, cl = col;
        auto single = [&](Tok t) {
            out.push_back({t, std::string(1, c), l, cl});
            advance(1);
        };
        switch (c) {
        case '(': single(Tok::LParen); continue;
        case ')': single(Tok::RParen); continue;
        case '{': single(Tok::LBrace); continue;
        case '}': single(Tok::RBrace); continue;
        case ',': single(Tok::Comma); continue;
        case '.': single(Tok::Dot); continue;
        case '|': single(Tok::Bar); continue;
        case '&': single(Tok::Amp); continue;
        default: break;
        }
        if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') {
            out.push_back({Tok::Arrow, "<-", l, cl});
            advance(2);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                    src[j] == '\''))
                ++j;
            std::string word(src.substr(i, j - i));
            Tok kind = std::isupper(static_cast<unsigned char>(c)) ? Tok::Var : Tok::Name;
            out.push_back({kind, word, l, cl});
            advance(j - i);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view src) : toks_(lex(src)) {}

    Program program() {
        Program p;
        while (peek().kind != Tok::End) {
            Clause c = clause();
            c.label = std::to_string(p.clauses.size() + 1);
            p.clauses.push_back(std::move(c));
        }
        p.signature = derive_signature(p.clauses);
        p.warnings = std::move(warnings_);
        return p;
    }

    Goal goal_only() {
        Goal g = goal({});
        expect_end();
        return g;
    }

    Fact fact_only() {
        std::vector<Atom> atoms;
        if (accept(Tok::LBrace)) {
            if (!accept(Tok::RBrace)) {
                do {
                    atoms.push_back(atom());
                } while (accept(Tok::Comma));
                expect(Tok::RBrace);
            }
        } else if (peek().kind == Tok::Name && peek().text == "bot") {
            next();
        } else {
            do {
                atoms.push_back(atom());
            } while (accept(Tok::Bar));
        }
        expect_end();
        return Fact(std::move(atoms));
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    bool accept(Tok t) {
        if (peek().kind != t) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, peek().line, peek().column);
    }

    const Token& expect(Tok t) {
        if (peek().kind != t) {
            std::string found = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
            fail(std::string("expected ") + describe(t) + ", found " + found);
        }
        return next();
    }

    void expect_end() {
        accept(Tok::Dot);
        if (peek().kind != Tok::End) fail("trailing input '" + peek().text + "'");
    }

    void check_arity(std::map<std::string, std::size_t>& table, const std::string& kind,
                     const std::string& name, std::size_t n, const Token& at) {
        auto [it, fresh] = table.try_emplace(name, n);
        if (!fresh && it->second != n)
            throw ParseError(kind + " '" + name + "' used with arity " + std::to_string(n) +
                                 " and " + std::to_string(it->second),
                             at.line, at.column);
        for (const auto* other : {&preds_, &funcs_}) {
            if (other == &table) continue;
            if (other->count(name))
                throw ParseError("symbol '" + name + "' used both as predicate and as term",
                                 at.line, at.column);
        }
    }

    Clause clause() {
        Clause c;
        c.pos = {peek().line, peek().column};
        if (peek().kind == Tok::Name && peek().text == "bot") {
            next();
        } else {
            std::vector<Atom> head;
            do {
                head.push_back(atom());
            } while (accept(Tok::Bar));
            c.head = Fact(std::move(head));
        }
        expect(Tok::Arrow);
        VarSet head_vars = vars_of(c.head);
        c.body = goal(head_vars);
        expect(Tok::Dot);
        return c;
    }

    // `scope` holds the variables already meaningful at this point, used only
    // for the shadowing warning.
    Goal goal(const VarSet& scope) {
        Goal g = par_goal(scope);
        while (accept(Tok::Amp)) g = Goal::with(std::move(g), par_goal(scope));
        return g;
    }

    Goal par_goal(const VarSet& scope) {
        Goal g = unit(scope);
        while (accept(Tok::Bar)) g = Goal::par(std::move(g), unit(scope));
        return g;
    }

    Goal unit(const VarSet& scope) {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            next();
            Goal g = goal(scope);
            expect(Tok::RParen);
            return g;
        }
        if (t.kind == Tok::Name && t.text == "top") {
            next();
            return Goal::top();
        }
        if (t.kind == Tok::Name && t.text == "bot") {
            next();
            return Goal::bot();
        }
        if (t.kind == Tok::Name && t.text == "forall") {
            next();
            const Token& v = expect(Tok::Var);
            if (scope.count(v.text))
                warnings_.push_back(std::to_string(v.line) + ":" + std::to_string(v.column) +
                                    ": forall " + v.text + " shadows an outer variable");
            VarSet inner = scope;
            inner.insert(v.text);
            std::string name = v.text;
            expect(Tok::Dot);
            return Goal::forall(std::move(name), goal(inner));
        }
        return Goal::atomic(atom());
    }

    Atom atom() {
        const Token& t = peek();
        if (t.kind != Tok::Name) {
            if (t.kind == Tok::Var) fail("expected atom, found variable '" + t.text + "'");
            expect(Tok::Name);
        }
        if (t.text == "top" || t.text == "bot" || t.text == "forall")
            fail("'" + t.text + "' is reserved");
        const Token& name = next();
        Atom a(name.text);
        if (accept(Tok::LParen)) {
            do {
                a.args.push_back(term());
            } while (accept(Tok::Comma));
            expect(Tok::RParen);
        }
        check_arity(preds_, "predicate", a.predicate, a.args.size(), name);
        return a;
    }

    Term term() {
        const Token& t = peek();
        if (t.kind == Tok::Var) {
            next();
            return Term::var(t.text);
        }
        if (t.kind != Tok::Name) fail("expected term, found " + std::string(describe(t.kind)));
        const Token& name = next();
        if (!accept(Tok::LParen)) {
            check_arity(funcs_, "function", name.text, 0, name);
            return Term::constant(name.text);
        }
        std::vector<Term> args;
        do {
            args.push_back(term());
        } while (accept(Tok::Comma));
        expect(Tok::RParen);
        check_arity(funcs_, "function", name.text, args.size(), name);
        return Term::apply(name.text, std::move(args));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::string> warnings_;
    // Constants are recorded as arity-0 functions while parsing.
    std::map<std::string, std::size_t> preds_, funcs_;
};

} // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }
Goal parse_goal(std::string_view text) { return Parser(text).goal_only(); }
Fact parse_fact(std::string_view text) { return Parser(text).fact_only(); }

// ---------------------------------------------------------------- printing

namespace {

void print_goal(const Goal& g, std::string& out);

void print_child(const Goal& parent, const Goal& child, bool right, std::string& out) {
    bool parens = child.kind == Goal::Kind::Forall ||
                  (parent.kind == Goal::Kind::Par && child.kind == Goal::Kind::With) ||
                  (right && child.kind == parent.kind);
    if (parens) out += '(';
    print_goal(child, out);
    if (parens) out += ')';
}

void print_goal(const Goal& g, std::string& out) {
    switch (g.kind) {
    case Goal::Kind::Top: out += "top"; return;
    case Goal::Kind::Bot: out += "bot"; return;
    case Goal::Kind::Atomic: out += to_string(g.atom); return;
    case Goal::Kind::Par:
    case Goal::Kind::With:
        print_child(g, g.sub[0], false, out);
        out += g.kind == Goal::Kind::Par ? " | " : " & ";
        print_child(g, g.sub[1], true, out);
        return;
    case Goal::Kind::Forall:
        out += "forall " + g.var + ". ";
        print_goal(g.sub[0], out);
        return;
    }
}

} // namespace

std::string print(const Goal& g) {
    std::string out;
    print_goal(g, out);
    return out;
}

std::string print(const Fact& f) {
    if (f.empty()) return "{}";
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += " | ";
        out += to_string(f[i]);
    }
    return out;
}

std::string print_braced(const Fact& f) {
    std::string out = "{";
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += ", ";
        out += to_string(f[i]);
    }
    return out + "}";
}

std::string print(const Clause& c) {
    return (c.head.empty() ? std::string("bot") : print(c.head)) + " <- " + print(c.body) + ".";
}

std::string print(const Program& p) {
    std::string out;
    for (const auto& c : p.clauses) out += print(c) + "\n";
    return out;
}

std::string print(const Substitution& s) {
    std::string out = "[";
    bool first = true;
    for (const auto& [v, t] : s) {
        if (!first) out += ", ";
        first = false;
        out += v + " := " + to_string(t);
    }
    return out + "]";
}

// ---------------------------------------------------------------- analysis

bool par_atoms(const Goal& g, std::vector<Atom>& out) {
    switch (g.kind) {
    case Goal::Kind::Atomic: out.push_back(g.atom); return true;
    case Goal::Kind::Bot: return true;
    case Goal::Kind::Par: return par_atoms(g.sub[0], out) && par_atoms(g.sub[1], out);
    default: return false;
    }
}

namespace {

// Atoms under | and forall only. Such a body can be put in prenex form by
// renaming bound variables apart, e.g. init | forall X. m(X).
bool par_forall_tree(const Goal& g) {
    switch (g.kind) {
    case Goal::Kind::Atomic:
    case Goal::Kind::Bot: return true;
    case Goal::Kind::Par: return par_forall_tree(g.sub[0]) && par_forall_tree(g.sub[1]);
    case Goal::Kind::Forall: return par_forall_tree(g.sub[0]);
    default: return false;
    }
}

} // namespace

ClauseClass classify_clause(const Clause& c) {
    std::vector<Atom> atoms;
    if (par_atoms(c.body, atoms)) return ClauseClass::RewriteRule;
    if (par_forall_tree(c.body)) return ClauseClass::QuantifiedRewriteRule;
    return ClauseClass::General;
}

const char* to_string(ClauseClass c) {
    switch (c) {
    case ClauseClass::RewriteRule: return "rewrite-rule";
    case ClauseClass::QuantifiedRewriteRule: return "quantified-rewrite-rule";
    case ClauseClass::General: return "general";
    }
    return "?";
}

namespace {

void term_symbols(const Term& t, Signature& sig) {
    switch (t.kind) {
    case TermKind::Variable: return;
    case TermKind::Constant: sig.constants.insert(t.name); return;
    case TermKind::Eigen: sig.eigenvariables.insert(t.name); return;
    case TermKind::Apply:
        sig.functions[t.name] = t.args.size();
        for (const auto& a : t.args) term_symbols(a, sig);
        return;
    }
}

void atom_symbols(const Atom& a, Signature& sig) {
    sig.predicates[a.predicate] = a.args.size();
    for (const auto& t : a.args) term_symbols(t, sig);
}

void goal_vars(const Goal& g, VarSet& bound, VarSet& out) {
    switch (g.kind) {
    case Goal::Kind::Atomic: {
        VarSet vs;
        collect_vars(g.atom, vs);
        for (const auto& v : vs)
            if (!bound.count(v)) out.insert(v);
        return;
    }
    case Goal::Kind::Par:
    case Goal::Kind::With:
        goal_vars(g.sub[0], bound, out);
        goal_vars(g.sub[1], bound, out);
        return;
    case Goal::Kind::Forall: {
        bool added = bound.insert(g.var).second;
        goal_vars(g.sub[0], bound, out);
        if (added) bound.erase(g.var);
        return;
    }
    default: return;
    }
}

} // namespace

void collect_symbols(const Goal& g, Signature& out) {
    if (g.kind == Goal::Kind::Atomic) atom_symbols(g.atom, out);
    for (const auto& s : g.sub) collect_symbols(s, out);
}

Signature derive_signature(const std::vector<Clause>& clauses) {
    Signature sig;
    for (const auto& c : clauses) {
        for (const auto& a : c.head) atom_symbols(a, sig);
        collect_symbols(c.body, sig);
    }
    return sig;
}

VarSet free_vars(const Goal& g) {
    VarSet bound, out;
    goal_vars(g, bound, out);
    return out;
}

VarSet free_vars(const Clause& c) {
    VarSet out = vars_of(c.head);
    VarSet body = free_vars(c.body);
    out.insert(body.begin(), body.end());
    return out;
}

Goal apply(const Goal& g, const Substitution& s) {
    if (s.empty()) return g;
    switch (g.kind) {
    case Goal::Kind::Top:
    case Goal::Kind::Bot:
        return g;
    case Goal::Kind::Atomic:
        return Goal::atomic(apply(g.atom, s));
    case Goal::Kind::Par:
        return Goal::par(apply(g.sub[0], s), apply(g.sub[1], s));
    case Goal::Kind::With:
        return Goal::with(apply(g.sub[0], s), apply(g.sub[1], s));
    case Goal::Kind::Forall: {
        Substitution inner;
        VarSet body_free = free_vars(g.sub[0]);
        for (const auto& [v, t] : s)
            if (v != g.var && body_free.count(v)) inner.bind(v, t);
        VarSet range = inner.range_vars();
        if (!range.count(g.var)) return Goal::forall(g.var, apply(g.sub[0], inner));
        // The bound variable would capture a variable of the range: rename it.
        std::string fresh = "_b" + g.var;
        for (int k = 0; range.count(fresh) || body_free.count(fresh); ++k)
            fresh = "_b" + g.var + std::to_string(k);
        inner.bind(g.var, Term::var(fresh));
        return Goal::forall(fresh, apply(g.sub[0], inner));
    }
    }
    return g;
}

Clause fresh_variant(const Clause& c, NameSupply& names, Substitution* renaming) {
    Substitution r;
    for (const auto& v : free_vars(c)) r.bind(v, Term::var(names.fresh_var()));
    Clause out{apply(c.head, r), apply(c.body, r), c.label, c.pos};
    if (renaming) *renaming = std::move(r);
    return out;
}

Program merge_programs(const Program& base, const Program& extra) {
    Program out = base;
    for (auto c : extra.clauses) {
        c.label = std::to_string(out.clauses.size() + 1);
        out.clauses.push_back(std::move(c));
    }
    for (const auto& w : extra.warnings) out.warnings.push_back(w);
    out.signature = derive_signature(out.clauses);
    return out;
}

} // namespace lo
