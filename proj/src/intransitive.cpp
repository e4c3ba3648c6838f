#include "nipol/intransitive.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nipol {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::size_t x, std::size_t y) {
        std::size_t rx = find(x);
        std::size_t ry = find(y);
        if (rx == ry) return false;
        if (rx > ry) std::swap(rx, ry);
        parent[ry] = rx;
        return true;
    }
};

StatePartition partition_from(const System& sys, UnionFind& uf, std::size_t u) {
    StatePartition part;
    part.agent = u;
    part.class_of.assign(sys.n_states(), 0);
    std::vector<std::ptrdiff_t> class_of_root(sys.n_states(), -1);
    for (std::size_t s = 0; s < sys.n_states(); ++s) {
        std::size_t r = uf.find(s);
        if (class_of_root[r] < 0) {
            class_of_root[r] = static_cast<std::ptrdiff_t>(part.classes.size());
            part.classes.emplace_back();
        }
        part.class_of[s] = static_cast<std::size_t>(class_of_root[r]);
        part.classes[part.class_of[s]].push_back(s);
    }
    return part;
}

// reach[s][v] = agents v may interfere with at s.
std::vector<std::vector<AgentSet>> reach_tables(const System& sys) {
    std::vector<std::vector<AgentSet>> reach(
        sys.n_states(), std::vector<AgentSet>(sys.n_agents(), AgentSet(sys.n_agents())));
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t u = 0; u < sys.n_agents(); ++u)
            sys.interfering_set(u, s).for_each([&](std::size_t v) { reach[s][v].set(u); });
    return reach;
}

struct FptResult {
    std::vector<SubsetFamilyEntry> entries;
    std::vector<std::size_t> violating;  // entry indices, all at the least violating depth
    Stats stats;
};

FptResult run_fpt(const System& sys, std::size_t guard, bool stop_on_violation) {
    FptResult res;
    std::size_t n = sys.n_states();
    auto reach = reach_tables(sys);
    std::unordered_map<std::size_t, std::vector<AgentSet>> at_pair;
    std::deque<std::size_t> work;
    std::size_t violating_depth = std::numeric_limits<std::size_t>::max();

    auto violates = [&](const SubsetFamilyEntry& e) {
        bool hit = false;
        e.ds.for_each([&](std::size_t u) {
            hit = hit || sys.obs(e.with_state, u) != sys.obs(e.without_state, u);
        });
        return hit;
    };

    auto consider = [&](const SubsetFamilyEntry& e) {
        if (e.with_state == e.without_state || e.ds.none()) return;
        ++res.stats.iterations;
        if (stop_on_violation && violates(e)) {
            res.entries.push_back(e);
            res.violating.push_back(res.entries.size() - 1);
            violating_depth = std::min(violating_depth, e.depth);
            return;
        }
        auto& kept = at_pair[e.with_state * n + e.without_state];
        for (const AgentSet& old : kept)
            if (e.ds.subset_of(old)) return;
        kept.push_back(e.ds);
        res.entries.push_back(e);
        ++res.stats.materialized;
        work.push_back(res.entries.size() - 1);
    };

    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t a = 0; a < sys.n_actions(); ++a) {
            if (sys.step(s, a) == s) continue;
            AgentSet ds = reach[s][sys.dom(a)].complement();
            if (ds.none()) continue;
            if (ds.count() > guard)
                throw AnalysisError(ErrorKind::SubsetGuardExceeded,
                                    "a hidden action at state " + sys.state_names[s] + " leaves " +
                                        std::to_string(ds.count()) +
                                        " agents to track, above the guard of " +
                                        std::to_string(guard));
            consider({ds, sys.step(s, a), s, 0, -1, a, s});
        }

    while (!work.empty()) {
        std::size_t idx = work.front();
        if (res.entries[idx].depth >= violating_depth) break;
        work.pop_front();
        for (std::size_t b = 0; b < sys.n_actions(); ++b) {
            SubsetFamilyEntry cur = res.entries[idx];
            SubsetFamilyEntry next;
            next.ds = cur.ds;
            if (!cur.ds.test(sys.dom(b)))
                next.ds &= reach[cur.with_state][sys.dom(b)].complement();
            next.with_state = sys.step(cur.with_state, b);
            next.without_state = sys.step(cur.without_state, b);
            next.depth = cur.depth + 1;
            next.parent = static_cast<std::ptrdiff_t>(idx);
            next.action = b;
            next.seed_state = cur.seed_state;
            consider(next);
        }
    }
    return res;
}

// Per-anchor cost of the bounded search; saturates instead of overflowing.
constexpr std::uint64_t cost_cap = std::numeric_limits<std::uint64_t>::max() / 4;

std::uint64_t search_cost(const System& sys, std::uint64_t bound) {
    std::uint64_t branching = std::max<std::uint64_t>(sys.n_actions(), 1);
    std::uint64_t nodes = 0;
    std::uint64_t layer = 1;
    for (std::uint64_t k = 0; k <= bound; ++k) {
        nodes = std::min(cost_cap, nodes + layer);
        layer = layer > cost_cap / branching ? cost_cap : layer * branching;
    }
    std::uint64_t anchors =
        std::max<std::uint64_t>(std::uint64_t{1}, sys.n_states() * sys.n_actions());
    return nodes > cost_cap / anchors ? cost_cap : nodes * anchors;
}

}  // namespace

AgentSet sources(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                 std::size_t state) {
    if (alpha.empty()) {
        AgentSet base(sys.n_agents());
        base.set(u);
        return base;
    }
    std::size_t a = alpha.front();
    AgentSet rest = sources(sys, alpha.subspan(1), u, sys.step(state, a));
    bool transmits = false;
    rest.for_each([&](std::size_t v) { transmits = transmits || sys.interferes(sys.dom(a), v, state); });
    if (transmits) rest.set(sys.dom(a));
    return rest;
}

ActionSeq ipurge(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                 std::size_t state) {
    ActionSeq kept;
    std::size_t s = state;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        std::size_t a = alpha[i];
        AgentSet src = sources(sys, alpha.subspan(i + 1), u, sys.step(s, a));
        bool keep = false;
        src.for_each([&](std::size_t v) { keep = keep || sys.interferes(sys.dom(a), v, s); });
        if (keep) {
            kept.push_back(a);
            s = sys.step(s, a);
        }
    }
    return kept;
}

ActionSeq ipurge_leslie(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                        std::size_t state) {
    ActionSeq kept;
    std::size_t s = state;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        std::size_t a = alpha[i];
        AgentSet src = sources(sys, alpha.subspan(i + 1), u, sys.step(s, a));
        bool keep = false;
        src.for_each([&](std::size_t v) { keep = keep || sys.interferes(sys.dom(a), v, s); });
        if (keep) kept.push_back(a);
        s = sys.step(s, a);
    }
    return kept;
}

SubsetRelationFamily fpt_unwinding(const System& sys, std::size_t subset_guard) {
    FptResult res = run_fpt(sys, subset_guard, false);
    return {std::move(res.entries), res.stats};
}

Verdict check_i_security(const System& sys, std::size_t subset_guard) {
    FptResult res = run_fpt(sys, subset_guard, true);
    Verdict v;
    v.stats = res.stats;
    if (res.violating.empty()) return v;

    struct Candidate {
        std::size_t agent = 0;
        std::size_t seed_state = 0;
        std::size_t seed_action = 0;
        ActionSeq alpha;
        std::size_t entry = 0;
    };
    std::optional<Candidate> best;
    auto key = [](const Candidate& c) {
        return std::tie(c.agent, c.seed_state, c.seed_action, c.alpha);
    };
    for (std::size_t idx : res.violating) {
        const SubsetFamilyEntry& e = res.entries[idx];
        std::optional<std::size_t> agent;
        e.ds.for_each([&](std::size_t u) {
            if (!agent && sys.obs(e.with_state, u) != sys.obs(e.without_state, u)) agent = u;
        });
        Candidate c;
        c.agent = *agent;
        c.entry = idx;
        std::size_t i = idx;
        while (res.entries[i].parent >= 0) {
            c.alpha.push_back(res.entries[i].action);
            i = static_cast<std::size_t>(res.entries[i].parent);
        }
        std::reverse(c.alpha.begin(), c.alpha.end());
        c.seed_state = res.entries[i].seed_state;
        c.seed_action = res.entries[i].action;
        if (!best || key(c) < key(*best)) best = std::move(c);
    }

    const SubsetFamilyEntry& e = res.entries[best->entry];
    Witness w;
    w.property = "i-security";
    w.agent = best->agent;
    w.state = best->seed_state;
    w.action = best->seed_action;
    w.alpha = std::move(best->alpha);
    w.obs_with = sys.obs(e.with_state, best->agent);
    w.obs_without = sys.obs(e.without_state, best->agent);
    v.holds = false;
    v.witness = std::move(w);
    return v;
}

std::uint64_t i_oracle_max_bound(const System& sys, std::uint64_t budget) {
    std::uint64_t best = 0;
    for (std::uint64_t b = 0; b <= 64; ++b) {
        if (search_cost(sys, b) > budget) break;
        best = b;
    }
    return best;
}

Verdict i_security_bounded_oracle(const System& sys, std::size_t bound, std::uint64_t budget) {
    if (search_cost(sys, bound) > budget)
        throw AnalysisError(ErrorKind::BudgetExceeded,
                            "bound " + std::to_string(bound) +
                                " exceeds the exploration budget; largest feasible bound is " +
                                std::to_string(i_oracle_max_bound(sys, budget)));
    Verdict v;
    auto reach = reach_tables(sys);

    struct Search {
        const System& sys;
        const std::vector<std::vector<AgentSet>>& reach;
        std::size_t bound;
        Stats& stats;
        ActionSeq alpha;
        std::size_t seed_state = 0;
        std::size_t seed_action = 0;
        std::optional<Witness> found;

        bool visit(const AgentSet& aware, std::size_t p, std::size_t q) {
            ++stats.evaluations;
            for (std::size_t u = 0; u < sys.n_agents(); ++u) {
                if (aware.test(u) || sys.obs(p, u) == sys.obs(q, u)) continue;
                Witness w;
                w.property = "i-security";
                w.agent = u;
                w.state = seed_state;
                w.action = seed_action;
                w.alpha = alpha;
                w.obs_with = sys.obs(p, u);
                w.obs_without = sys.obs(q, u);
                found = std::move(w);
                return true;
            }
            if (p == q || alpha.size() >= bound) return false;
            for (std::size_t b = 0; b < sys.n_actions(); ++b) {
                AgentSet next = aware;
                if (aware.test(sys.dom(b))) next |= reach[p][sys.dom(b)];
                alpha.push_back(b);
                if (visit(next, sys.step(p, b), sys.step(q, b))) return true;
                alpha.pop_back();
            }
            return false;
        }
    };

    Search search{sys, reach, bound, v.stats, {}, 0, 0, std::nullopt};
    for (std::size_t s = 0; s < sys.n_states() && !search.found; ++s)
        for (std::size_t a = 0; a < sys.n_actions() && !search.found; ++a) {
            search.seed_state = s;
            search.seed_action = a;
            search.alpha.clear();
            search.visit(reach[s][sys.dom(a)], sys.step(s, a), s);
        }
    if (search.found) {
        v.holds = false;
        v.witness = std::move(search.found);
    }
    return v;
}

StatePartition i_similarity(const System& sys, std::size_t u, std::size_t subset_guard) {
    SubsetRelationFamily fam = fpt_unwinding(sys, subset_guard);
    UnionFind uf(sys.n_states());
    for (const SubsetFamilyEntry& e : fam.entries)
        if (e.ds.test(u)) uf.unite(e.with_state, e.without_state);
    return partition_from(sys, uf, u);
}

std::vector<PolicyEdge> find_intransitively_useless_edges(const System& sys,
                                                          std::size_t subset_guard) {
    std::vector<StatePartition> base;
    base.reserve(sys.n_agents());
    for (std::size_t u = 0; u < sys.n_agents(); ++u)
        base.push_back(i_similarity(sys, u, subset_guard));
    std::vector<PolicyEdge> out;
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t v = 0; v < sys.n_agents(); ++v)
            for (std::size_t u = 0; u < sys.n_agents(); ++u) {
                if (v == u || !sys.interferes(v, u, s)) continue;
                System trimmed = sys;
                trimmed.interfering[s][u].reset(v);
                bool same = true;
                for (std::size_t w = 0; w < sys.n_agents() && same; ++w)
                    same = i_similarity(trimmed, w, subset_guard).same_blocks(base[w]);
                if (same) out.push_back({s, v, u});
            }
    return out;
}

System normalize_i(const System& sys, std::size_t subset_guard) {
    System cur = sys;
    for (;;) {
        auto edges = find_intransitively_useless_edges(cur, subset_guard);
        if (edges.empty()) return cur;
        cur.interfering[edges.front().state][edges.front().target].reset(edges.front().source);
    }
}

UniformFamily uniform_unwinding(const System& sys) {
    UniformFamily fam;
    std::size_t n = sys.n_states();
    auto reach = reach_tables(sys);
    for (std::size_t anchor = 0; anchor < n; ++anchor)
        for (std::size_t v = 0; v < sys.n_agents(); ++v) {
            std::vector<char> seen(n * n, 0);
            std::deque<std::size_t> work;
            auto push = [&](const UniformFamilyPair& pr) {
                if (pr.with_state == pr.without_state) return;
                if (seen[pr.with_state * n + pr.without_state]) return;
                seen[pr.with_state * n + pr.without_state] = 1;
                fam.pairs.push_back(pr);
                ++fam.stats.materialized;
                work.push_back(fam.pairs.size() - 1);
            };
            for (std::size_t a = 0; a < sys.n_actions(); ++a)
                if (sys.dom(a) == v) push({anchor, v, sys.step(anchor, a), anchor, 0, -1, a});
            while (!work.empty()) {
                std::size_t idx = work.front();
                work.pop_front();
                ++fam.stats.iterations;
                for (std::size_t b = 0; b < sys.n_actions(); ++b) {
                    if (reach[anchor][v].test(sys.dom(b))) continue;
                    UniformFamilyPair cur = fam.pairs[idx];
                    push({anchor, v, sys.step(cur.with_state, b), sys.step(cur.without_state, b),
                          cur.depth + 1, static_cast<std::ptrdiff_t>(idx), b});
                }
            }
        }
    return fam;
}

UniformVerdict is_intransitively_uniform(const System& sys) {
    UniformFamily fam = uniform_unwinding(sys);
    UniformVerdict uv;
    uv.stats = fam.stats;
    std::size_t i = 0;
    for (std::size_t anchor = 0; anchor < sys.n_states(); ++anchor)
        for (std::size_t v = 0; v < sys.n_agents(); ++v) {
            UnionFind uf(sys.n_states());
            bool any = false;
            while (i < fam.pairs.size() && fam.pairs[i].anchor_state == anchor &&
                   fam.pairs[i].anchor_agent == v) {
                uf.unite(fam.pairs[i].with_state, fam.pairs[i].without_state);
                any = true;
                ++i;
            }
            if (!any) continue;
            for (std::size_t u = 0; u < sys.n_agents(); ++u) {
                if (sys.interferes(v, u, anchor)) continue;
                std::vector<std::ptrdiff_t> repr(sys.n_states(), -1);
                for (std::size_t s = 0; s < sys.n_states(); ++s) {
                    std::size_t r = uf.find(s);
                    if (repr[r] < 0) {
                        repr[r] = static_cast<std::ptrdiff_t>(s);
                        continue;
                    }
                    std::size_t rep = static_cast<std::size_t>(repr[r]);
                    if (!(sys.interfering_set(u, s) == sys.interfering_set(u, rep))) {
                        uv.uniform = false;
                        uv.witness = UniformWitness{u, rep, s, sys.interfering_set(u, rep),
                                                    sys.interfering_set(u, s)};
                        return uv;
                    }
                }
            }
        }
    return uv;
}

Verdict check_i_security_uniform(const System& sys) {
    UniformVerdict uv = is_intransitively_uniform(sys);
    if (!uv.uniform)
        throw AnalysisError(ErrorKind::NonUniformPolicy, "policy is not intransitively uniform: " +
                                                             render_uniform_witness(sys, *uv.witness));
    UniformFamily fam = uniform_unwinding(sys);
    Verdict v;
    v.stats = fam.stats;
    for (std::size_t i = 0; i < fam.pairs.size(); ++i) {
        const UniformFamilyPair& pr = fam.pairs[i];
        for (std::size_t u = 0; u < sys.n_agents(); ++u) {
            if (sys.interferes(pr.anchor_agent, u, pr.anchor_state)) continue;
            ++v.stats.evaluations;
            if (sys.obs(pr.with_state, u) == sys.obs(pr.without_state, u)) continue;
            ActionSeq alpha;
            std::size_t j = i;
            while (fam.pairs[j].parent >= 0) {
                alpha.push_back(fam.pairs[j].action);
                j = static_cast<std::size_t>(fam.pairs[j].parent);
            }
            std::reverse(alpha.begin(), alpha.end());
            Witness w;
            w.property = "i-security";
            w.agent = u;
            w.state = fam.pairs[j].anchor_state;
            w.action = fam.pairs[j].action;
            w.alpha = std::move(alpha);
            w.obs_with = sys.obs(pr.with_state, u);
            w.obs_without = sys.obs(pr.without_state, u);
            v.holds = false;
            v.witness = std::move(w);
            return v;
        }
    }
    return v;
}

Verdict check_ip_security(const System& sys) {
    if (!sys.has_global_policy())
        throw AnalysisError(ErrorKind::NotGlobalPolicy,
                            "the policy differs between states; this check needs one policy "
                            "shared by every state");
    Verdict v = check_i_security_uniform(sys);
    if (v.witness) v.witness->property = "ip-security";
    v.notes.push_back(
        "policy is global, so the state-replaying and state-freezing purge variants agree");
    return v;
}

}  // namespace nipol
