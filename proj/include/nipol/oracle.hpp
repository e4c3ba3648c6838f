#pragma once

#include <cstdint>

#include "nipol/core.hpp"

namespace nipol {

// Brute-force reference checks used as ground truth in tests. These share no
// code with the analysis modules: purge, ipurge and sources are re-derived
// here with independent recursions so the two sides cannot confirm each
// other's bugs.

inline constexpr std::uint64_t default_oracle_budget = 10'000'000;

struct GeneratorConfig {
    std::size_t max_states = 6;
    std::size_t max_actions = 4;
    std::size_t max_agents = 3;
    double edge_density = 0.4;
    std::size_t obs_alphabet_size = 2;
    std::uint64_t seed = 0;
};

// Largest alpha-length bound whose full enumeration tree fits the budget:
// per_node * sum_{k <= bound} branching^k <= budget. Capped at 64.
std::size_t max_feasible_bound(std::size_t branching, std::uint64_t per_node,
                               std::uint64_t budget);

// Shorthand for the t_definition_oracle cost model (per_node = |S|*|A|).
std::size_t t_oracle_max_bound(const System& sys, std::uint64_t budget);

// Checks the t-security definition by enumeration: for every state s, every
// action a hidden from an agent at s and every continuation alpha with
// |alpha| <= bound, compare the observations of the runs with and without a.
// Sound for any bound; complete for bound >= |S|^2. Stops at the first
// violation found.
Verdict t_definition_oracle(const System& sys, std::size_t bound,
                            std::uint64_t budget = default_oracle_budget);

// Groups every alpha with |alpha| <= bound by its purge value per (agent,
// state) and requires equal observations within each group. A violating
// group is reported in the verdict notes (this check has no single-action
// witness shape).
Verdict purge_equality_oracle(const System& sys, std::size_t bound,
                              std::uint64_t budget = default_oracle_budget);

// Same grouping check with the intransitive purge.
Verdict ipurge_equality_oracle(const System& sys, std::size_t bound,
                               std::uint64_t budget = default_oracle_budget);

// Deterministic-in-seed random system: sizes drawn in [1, max], transition
// targets limited to earlier-plus-current states over a spanning skeleton so
// every state is reachable, observation labels from a small alphabet, policy
// edges by density.
System generate_random_system(const GeneratorConfig& cfg);

// Copy of sys with one shared local policy: the union of all per-state
// edges, installed in every state.
System with_global_policy(const System& sys);

}  // namespace nipol
