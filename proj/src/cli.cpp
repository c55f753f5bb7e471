#include "lo/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lo/engine.hpp"

namespace lo {

namespace {

using nlohmann::json;

struct EngineFlags {
    std::vector<std::string> strengthen;
    std::size_t max_rounds = 1000;
    bool no_prune = false;
    bool delta = false;
    bool monadize = false;
    bool json = false;
    std::uint64_t seed = 0;
};

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Usage("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load(const std::string& path) {
    try {
        return parse_program(read_file(path));
    } catch (const ParseError& e) {
        throw Usage(path + ":" + e.what());
    }
}

Goal load_goal(const std::string& text) {
    try {
        return parse_goal(text);
    } catch (const ParseError& e) {
        throw Usage(std::string("goal:") + e.what());
    }
}

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
    cmd->add_option("--strengthen", f.strengthen, "append the clauses of this file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--max-rounds", f.max_rounds, "round cap");
    cmd->add_flag("--no-prune", f.no_prune, "keep trivial selections in the atom case");
    cmd->add_flag("--delta", f.delta, "feed only new facts to single-fact clauses");
    cmd->add_flag("--monadize", f.monadize, "fold constant-only argument positions");
    cmd->add_flag("--json", f.json, "machine-readable output");
    cmd->add_option("--seed", f.seed, "accepted for scripting; the engine is deterministic");
}

struct Prepared {
    Program program;
    std::optional<MonadizeResult> folding;
};

Prepared prepare(const std::string& file, const EngineFlags& f, std::ostream& err) {
    Prepared p;
    p.program = load(file);
    for (const auto& s : f.strengthen) p.program = merge_programs(p.program, load(s));
    for (const auto& w : p.program.warnings) err << "warning: " << w << "\n";
    if (f.monadize) {
        auto m = monadize(p.program);
        if (!m.applicable) {
            err << "monadize: not applicable: " << m.reason << "\n";
        } else {
            p.program = m.program;
            p.folding = std::move(m);
        }
    }
    return p;
}

FixpointOptions fixpoint_options(const EngineFlags& f) {
    FixpointOptions o;
    o.max_rounds = f.max_rounds;
    o.prune_trivial = !f.no_prune;
    o.delta = f.delta;
    return o;
}

json facts_json(const Interpretation& interp) {
    json facts = json::array();
    for (const auto& f : interp.facts) {
        json atoms = json::array();
        for (const auto& a : f) atoms.push_back(to_string(a));
        facts.push_back(std::move(atoms));
    }
    return facts;
}

json trace_json(const Trace& t) {
    json steps = json::array();
    for (const auto& s : t.steps) {
        json grounding = json::object();
        for (const auto& [v, term] : s.grounding) grounding[v] = to_string(term);
        json config = json::array();
        for (const auto& g : s.configuration) config.push_back(print(g));
        steps.push_back({{"clause", s.clause_label},
                         {"grounding", grounding},
                         {"configuration", config},
                         {"depth", s.depth}});
    }
    return steps;
}

void print_facts(std::ostream& out, const FixpointResult& r) {
    for (const auto& f : r.interpretation.facts) out << print_braced(f) << "\n";
    out << "facts: " << r.interpretation.facts.size() << "\n";
    out << "rounds: " << r.rounds << "\n";
    out << "terminated: " << (r.terminated ? "yes" : "no") << "\n";
    out << "monadic: " << (r.monadic_guarantee ? "yes" : "no") << "\n";
}

void print_trace(std::ostream& out, const Trace& t) {
    for (const auto& s : t.steps) {
        out << std::string(2 * (s.depth + 1), ' ') << s.clause_label << "  "
            << print_sequent(s.configuration);
        if (!s.grounding.empty()) out << "  " << print(s.grounding);
        out << "\n";
    }
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
    return out;
}

int cmd_parse(const std::string& file, bool as_json, std::ostream& out, std::ostream& err) {
    Program p = load(file);
    for (const auto& w : p.warnings) err << "warning: " << w << "\n";
    if (as_json) {
        json clauses = json::array();
        for (const auto& c : p.clauses)
            clauses.push_back({{"label", c.label},
                               {"clause", print(c)},
                               {"class", to_string(classify_clause(c))},
                               {"line", c.pos.line}});
        json sig = {{"constants", p.signature.constants},
                    {"functions", p.signature.functions},
                    {"predicates", p.signature.predicates}};
        out << json{{"clauses", clauses}, {"signature", sig}}.dump(2) << "\n";
        return kExitSafe;
    }
    for (const auto& c : p.clauses)
        out << c.label << ": " << print(c) << "    % " << to_string(classify_clause(c)) << "\n";
    return kExitSafe;
}

int cmd_fixpoint(const std::string& file, const EngineFlags& f, std::ostream& out,
                 std::ostream& err) {
    Prepared p = prepare(file, f, err);
    auto r = fixpoint(p.program, fixpoint_options(f));
    if (f.json) {
        json doc = {{"facts", facts_json(r.interpretation)},
                    {"rounds", r.rounds},
                    {"terminated", r.terminated},
                    {"monadic", r.monadic_guarantee},
                    {"trace", json::array()}};
        out << doc.dump(2) << "\n";
    } else {
        print_facts(out, r);
    }
    if (!r.terminated) {
        err << "round cap " << f.max_rounds << " reached; output is partial\n";
        return kExitUnknown;
    }
    return kExitSafe;
}

int cmd_check(const std::string& file, const std::string& goal_text, bool show_trace,
              bool validate, const EngineFlags& f, std::ostream& out, std::ostream& err) {
    Prepared p = prepare(file, f, err);
    Goal goal = load_goal(goal_text);
    if (p.folding) goal = fold_goal(*p.folding, goal);
    auto r = fixpoint(p.program, fixpoint_options(f));
    bool hit = check_goal(r, goal).has_value();

    std::string verdict = hit ? "VIOLATION" : (r.terminated ? "SAFE" : "UNKNOWN");
    std::optional<Trace> trace;
    std::optional<bool> validated;
    if (hit) {
        // The goal is in the denotation of a post-fixpoint prefix, so the
        // violation stands even if the cap was hit.
        trace = extract_trace(p.program, r, goal);
        if (validate) {
            Prover prover(p.program);
            auto ctx = trace->proof.sequent;
            validated = prover.prove(ctx, bc_depth(trace->proof)).has_value();
        }
    }

    if (f.json) {
        json doc = {{"verdict", verdict},
                    {"facts", facts_json(r.interpretation)},
                    {"rounds", r.rounds},
                    {"terminated", r.terminated},
                    {"monadic", r.monadic_guarantee},
                    {"trace", trace ? trace_json(*trace) : json::array()}};
        if (trace) doc["summary"] = step_summary(*trace);
        if (validated) doc["validated"] = *validated;
        out << doc.dump(2) << "\n";
    } else {
        out << verdict << "\n";
        out << "rounds: " << r.rounds << "\n";
        out << "terminated: " << (r.terminated ? "yes" : "no") << "\n";
        if (trace) {
            out << "trace: " << join(step_summary(*trace), ", ") << "\n";
            if (show_trace) print_trace(out, *trace);
        }
        if (validated) out << "validated: " << (*validated ? "yes" : "no") << "\n";
    }
    if (validated && !*validated) err << "trace did not replay through the prover\n";
    if (hit) return kExitViolation;
    return r.terminated ? kExitSafe : kExitUnknown;
}

int cmd_oracle(const std::string& file, const std::string& goal_text, std::size_t depth,
               bool as_json, std::ostream& out, std::ostream& err) {
    Program p = load(file);
    for (const auto& w : p.warnings) err << "warning: " << w << "\n";
    Goal goal = load_goal(goal_text);
    if (!free_vars(goal).empty()) throw Usage("oracle goals must be closed");
    Prover prover(p);
    auto proof = prover.prove_iterative({goal}, depth);
    if (as_json) {
        json doc = {{"found", proof.has_value()}};
        if (proof) {
            doc["proof"] = print_proof(*proof);
            doc["depth"] = bc_depth(*proof);
        }
        out << doc.dump(2) << "\n";
    } else if (proof) {
        out << "proof found\n" << print_proof(*proof);
    } else {
        out << "not found within depth " << depth << "\n";
    }
    return proof ? kExitViolation : kExitUnknown;
}

std::size_t default_rounds(std::ostream& err) {
    if (const char* env = std::getenv("LO_MAX_ROUNDS")) {
        try {
            return static_cast<std::size_t>(std::stoull(env));
        } catch (const std::exception&) {
            err << "warning: ignoring LO_MAX_ROUNDS=" << env << "\n";
        }
    }
    return 1000;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"bottom-up verifier for LO programs with universal goals", "lo"};
    app.require_subcommand(1);

    std::string file, goal;
    std::size_t depth = 8;
    bool show_trace = false, validate = false, parse_json = false, oracle_json = false;
    EngineFlags fix_flags, check_flags;
    fix_flags.max_rounds = check_flags.max_rounds = default_rounds(err);

    auto* parse = app.add_subcommand("parse", "parse and print a program");
    parse->add_option("file", file)->required();
    parse->add_flag("--json", parse_json);

    auto* fix = app.add_subcommand("fixpoint", "compute the reduced least fixpoint");
    fix->add_option("file", file)->required();
    add_engine_flags(fix, fix_flags);

    auto* check = app.add_subcommand("check", "is the goal reachable backwards from the program?");
    check->add_option("file", file)->required();
    check->add_option("--goal", goal)->required();
    check->add_flag("--trace", show_trace, "print the replayed derivation");
    check->add_flag("--validate", validate, "re-prove the trace top-down");
    add_engine_flags(check, check_flags);

    auto* oracle = app.add_subcommand("oracle", "depth-bounded top-down proof search");
    oracle->add_option("file", file)->required();
    oracle->add_option("--goal", goal)->required();
    oracle->add_option("--depth", depth, "backchaining steps per branch");
    oracle->add_flag("--json", oracle_json);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kExitSafe;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*parse) return cmd_parse(file, parse_json, out, err);
        if (*fix) return cmd_fixpoint(file, fix_flags, out, err);
        if (*check) return cmd_check(file, goal, show_trace, validate, check_flags, out, err);
        if (*oracle) return cmd_oracle(file, goal, depth, oracle_json, out, err);
    } catch (const Usage& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace lo
