// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "radp/types.hpp"
#include "radp/uncertainty.hpp"

namespace radp {

/**
 * Finite robust MDP.
 *
 * States are dense integer indices. Outcome vectors (distributions and their
 * bounds) run over non-terminal states 0..num_states-1 followed by terminal
 * states num_states..num_states+num_terminals-1. Terminal states have no
 * outgoing transitions and zero value; `terminal_reward` exists so that data
 * files assigning a nonzero reward to a terminal can be reported by
 * validate() rather than silently dropped.
 *
 * Model objects are treated as immutable once built; all solvers take them
 * by const reference and may read them from multiple threads.
 */
struct RobustMdp {
    long num_states = 0;
    long num_terminals = 0;
    long num_actions = 0;
    prec_t discount = 1.0;

    std::vector<numvec> reward;                          // [state][action]
    std::vector<std::vector<UncertaintySet>> uncertainty;  // [state][action]
    numvec terminal_reward;                              // expected all-zero

    // Optional display metadata; indices are authoritative.
    std::vector<std::string> state_names;
    std::vector<std::string> terminal_names;
    std::vector<std::string> action_names;

    long outcome_dim() const { return num_states + num_terminals; }
    bool outcome_is_terminal(long outcome) const { return outcome >= num_states; }
};

/// Allocate a model with zero rewards and empty uncertainty slots.
/// Every (state, action) uncertainty entry must be assigned before use.
RobustMdp make_mdp(long num_states, long num_terminals, long num_actions, prec_t discount);

/// One violated invariant; state/action are -1 for model-wide rules.
struct Violation {
    long state = -1;
    long action = -1;
    std::string rule;

    std::string describe() const;
};

/// Check every model invariant. Reports, never throws.
std::vector<Violation> validate(const RobustMdp& model);

/// Throw ValidationError listing all violations, if any.
void validate_or_throw(const RobustMdp& model);

/**
 * Rule for collapsing each uncertainty-set variant to a single designated
 * distribution. A null handler means the selector is undefined for that
 * variant and nominal_of raises an error naming it.
 */
struct NominalSelector {
    std::function<numvec(const UncertaintySet&)> for_singleton;
    std::function<numvec(const UncertaintySet&)> for_box;
    std::function<numvec(const UncertaintySet&)> for_vertices;

    /// Singleton -> its point; box -> midpoint projected into the feasible
    /// slice; vertex list -> first vertex.
    static NominalSelector defaults();
};

/// Collapse the model's uncertainty sets to one transition table P[x][u].
/// Every returned distribution is a member of its set.
std::vector<std::vector<numvec>> nominal_of(const RobustMdp& model, const NominalSelector& selector);

/// Extend a value vector over non-terminal states with zeros on terminal
/// coordinates, yielding a vector over the full outcome space.
numvec padded_outcome_values(const RobustMdp& model, const numvec& values);

}  // namespace radp
