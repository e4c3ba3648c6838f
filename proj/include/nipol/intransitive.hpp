#pragma once

#include <cstdint>
#include <span>

#include "nipol/core.hpp"

namespace nipol {

inline constexpr std::size_t default_subset_guard = 16;
inline constexpr std::uint64_t default_intransitive_budget = 10'000'000;

// Agents that may have shaped what u observes after alpha runs from state:
// u itself plus, working backwards, the agent of every action that can pass
// information toward the set collected so far.
AgentSet sources(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                 std::size_t state);

// Keeps exactly the actions whose agent is a source of the remaining
// sequence for u; dropped actions do not advance the tracked state.
ActionSeq ipurge(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                 std::size_t state);

// Variant of ipurge where dropped actions still advance the tracked state.
ActionSeq ipurge_leslie(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                        std::size_t state);

// One element of the relation family: the states both runs have reached and
// the agents that still cannot know about the hidden action.
struct SubsetFamilyEntry {
    AgentSet ds;
    std::size_t with_state = 0;
    std::size_t without_state = 0;
    std::size_t depth = 0;
    std::ptrdiff_t parent = -1;  // entry this one was stepped from, -1 for seeds
    std::size_t action = 0;      // step action; for seeds the hidden action
    std::size_t seed_state = 0;  // where the hidden action fired (seeds only)
};

struct SubsetRelationFamily {
    std::vector<SubsetFamilyEntry> entries;
    Stats stats;
};

// Saturates the agent-set-indexed unwinding relation: seeds pair s.a with s
// carrying the agents dom(a) cannot reach at s, and stepping both runs by b
// shrinks the carried set by whatever dom(b) can reach when it already
// knows. Entries subsumed by a larger set at the same state pair are
// dropped. Throws AnalysisError(ErrorKind::SubsetGuardExceeded) when a seed
// set is larger than subset_guard.
SubsetRelationFamily fpt_unwinding(const System& sys,
                                   std::size_t subset_guard = default_subset_guard);

// Decides security with source-aware information flow for every agent. A
// violating system yields a minimal-length witness.
Verdict check_i_security(const System& sys, std::size_t subset_guard = default_subset_guard);

std::uint64_t i_oracle_max_bound(const System& sys,
                                 std::uint64_t budget = default_intransitive_budget);

// Checks the defining property directly on every run of length at most
// bound via forward source tracking; shares nothing with the relation
// engine above and serves as its cross-check.
Verdict i_security_bounded_oracle(const System& sys, std::size_t bound,
                                  std::uint64_t budget = default_intransitive_budget);

// States u cannot tell apart under source-aware information flow: the
// equivalence generated by the family entries whose carried set contains u.
StatePartition i_similarity(const System& sys, std::size_t u,
                            std::size_t subset_guard = default_subset_guard);

// Edges whose removal leaves every agent's i_similarity partition
// unchanged. Sorted by (state, source, target).
std::vector<PolicyEdge> find_intransitively_useless_edges(
    const System& sys, std::size_t subset_guard = default_subset_guard);

// Repeatedly removes the first currently removable edge until none remain.
System normalize_i(const System& sys, std::size_t subset_guard = default_subset_guard);

// Pair reached from an anchored hidden action when only actions of agents
// the hidden agent cannot reach at the anchor are allowed to follow it.
struct UniformFamilyPair {
    std::size_t anchor_state = 0;  // state where the hidden action fires
    std::size_t anchor_agent = 0;  // agent of the hidden action
    std::size_t with_state = 0;
    std::size_t without_state = 0;
    std::size_t depth = 0;
    std::ptrdiff_t parent = -1;
    std::size_t action = 0;  // step action; for seeds the hidden action
};

struct UniformFamily {
    std::vector<UniformFamilyPair> pairs;
    Stats stats;
};

UniformFamily uniform_unwinding(const System& sys);

// A system is intransitively uniform when, for every anchored family and
// every agent the anchor agent cannot reach there, related states carry
// identical interfering sets for that agent.
UniformVerdict is_intransitively_uniform(const System& sys);

// Security check that is sound for intransitively uniform systems; throws
// AnalysisError(ErrorKind::NonUniformPolicy) otherwise.
Verdict check_i_security_uniform(const System& sys);

// Security under purge semantics that replays dropped actions' state
// changes; meaningful only when every state shares one policy, so throws
// AnalysisError(ErrorKind::NotGlobalPolicy) otherwise.
Verdict check_ip_security(const System& sys);

}  // namespace nipol
