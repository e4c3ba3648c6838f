#pragma once

#include <span>

#include "nipol/core.hpp"

namespace nipol {

// Projection of an action sequence onto what agent u may see when every
// action whose agent cannot currently interfere with u is suppressed.
// Suppressed actions do not advance the tracked state.
ActionSeq purge(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                std::size_t state);

// Least equivalence on states that relates s to s.a whenever dom(a) cannot
// interfere with u at s, and is closed under simultaneous progress by any
// action. Observation-constancy over its classes decides security for u.
StatePartition t_similarity(const System& sys, std::size_t u);

// Decides security against policy-respecting information flow for every
// agent. A violation comes with a minimal-length witness: a hidden action a
// at state s followed by alpha after which agent u observes a difference.
Verdict check_t_security(const System& sys);

// Same question answered by an explicit product-automaton search instead of
// the equivalence-closure engine; used to cross-check check_t_security.
Verdict t_security_pair_oracle(const System& sys);

// Edges v -> u at state s that no run can ever exploit: some state
// indistinguishable from s for u lacks the edge. Sorted by (state, source,
// target).
std::vector<PolicyEdge> find_useless_edges_t(const System& sys);

// Removes every useless edge in one batch. The result has no useless edges
// left and the same security verdict as the input.
System normalize_t(const System& sys);

// A system is transitively uniform when indistinguishable states always
// carry identical interfering sets. Normalized systems are uniform.
UniformVerdict is_uniform_t(const System& sys);

// Security check that only explores runs from the initial state, sound for
// uniform systems only; throws AnalysisError(ErrorKind::NonUniformPolicy)
// otherwise.
Verdict check_t_from_initial(const System& sys);

}  // namespace nipol
