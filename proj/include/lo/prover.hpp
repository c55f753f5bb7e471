#pragma once

// Depth-bounded top-down search for uniform proofs over ground sequents, and
// an independent checker for proof trees.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lo/kernel.hpp"
#include "lo/syntax.hpp"

namespace lo {

enum class Rule : std::uint8_t { Top, Par, With, Bot, Forall, Backchain };

const char* to_string(Rule r);

struct ProofNode {
    Rule rule = Rule::Top;
    std::vector<Goal> sequent; // right-hand side of the conclusion
    // Backchain only.
    std::size_t clause_index = 0;
    std::string clause_label;
    Substitution grounding; // clause variables -> ground terms
    // Forall only.
    std::string eigen;
    std::vector<ProofNode> premises;
};

struct ProverOptions {
    /// Depth of the ground terms tried for variables that occur only in a
    /// clause body.
    std::size_t term_depth = 2;
};

/// Search state shared across queries on one program. Failures are memoized
/// per (context, remaining depth) and reused by later calls.
class Prover {
public:
    explicit Prover(const Program& program, ProverOptions opts = {});

    /// Proof of the ground context with at most `depth` backchaining steps on
    /// every branch.
    std::optional<ProofNode> prove(const std::vector<Goal>& ctx, std::size_t depth);
    /// Iterative deepening from 0 up to `max_depth`.
    std::optional<ProofNode> prove_iterative(const std::vector<Goal>& ctx, std::size_t max_depth);

    /// Same question as prove_iterative without building the proof. Successes
    /// are memoized too, which keeps `&`-heavy searches polynomial.
    bool provable(const std::vector<Goal>& ctx, std::size_t max_depth);

    std::size_t memo_size() const { return failed_.size(); }

private:
    std::optional<ProofNode> search(std::vector<Goal> ctx, std::size_t depth,
                                    std::vector<std::string>& eigens);
    std::optional<ProofNode> backchain(const std::vector<Goal>& ctx, std::size_t depth,
                                       std::vector<std::string>& eigens);
    std::vector<Term> term_pool(const std::vector<Goal>& ctx,
                                const std::vector<std::string>& eigens) const;
    std::string memo_key(const std::vector<Goal>& ctx,
                         const std::vector<std::string>& eigens) const;

    const Program& program_;
    ProverOptions opts_;
    std::vector<std::vector<std::string>> body_only_; // per clause, sorted
    std::vector<std::size_t> order_;
    // key -> largest depth that failed; kUnbounded when no branch hit the bound
    std::unordered_map<std::string, std::size_t> failed_;
    static constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);
    bool cutoff_ = false;
    bool decide_ = false;
    std::unordered_map<std::string, std::size_t> proved_; // key -> smallest depth that worked
    std::uint64_t eigen_counter_ = 0;
};

/// Convenience wrapper: one-shot prover.
std::optional<ProofNode> prove(const Program& program, const std::vector<Goal>& ctx,
                               std::size_t depth, ProverOptions opts = {});

/// Checks every inference of `proof` against the rules of the proof system.
/// Symbols of the end sequent and `extra_constants` extend the program
/// signature. Returns an error message
/// on the first bad inference.
std::optional<std::string> check_proof(const Program& program, const ProofNode& proof,
                                       const std::set<std::string>& extra_constants = {});

/// Δ ⊑ Δ' and Δ provable within `depth` imply Δ' provable within `depth`.
/// Returns false only when the premise holds and the conclusion fails.
bool check_weakening(Prover& prover, const std::vector<Goal>& small,
                     const std::vector<Goal>& large, std::size_t depth);

std::size_t count_rule(const ProofNode& proof, Rule r);
/// Largest number of backchaining steps on one branch.
std::size_t bc_depth(const ProofNode& proof);
/// No node has more than one premise.
bool single_branch(const ProofNode& proof);
/// Every backchaining node has an all-atomic sequent.
bool is_uniform(const ProofNode& proof);

std::string print_sequent(const std::vector<Goal>& ctx);
std::string print_proof(const ProofNode& proof);

/// Atoms of a ground fact as goals.
std::vector<Goal> goals_of(const Fact& f);

} // namespace lo
