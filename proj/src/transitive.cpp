#include "nipol/transitive.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
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

    // The smaller root stays representative, so every class is named by its
    // least member.
    bool unite(std::size_t x, std::size_t y) {
        std::size_t rx = find(x);
        std::size_t ry = find(y);
        if (rx == ry) return false;
        if (rx > ry) std::swap(rx, ry);
        parent[ry] = rx;
        return true;
    }
};

struct GenPair {
    std::size_t x = 0;  // run that contains the hidden action
    std::size_t y = 0;  // run without it
    std::size_t depth = 0;
    std::ptrdiff_t parent = -1;  // record this pair was stepped from, -1 for seeds
    std::size_t action = 0;      // step action; for seeds the hidden action itself
    std::size_t seed_state = 0;
};

// Closure engine behind t_similarity and check_t_security. A pair is
// recorded only when it actually merges two classes; the breadth-first
// worklist keeps recorded depths non-decreasing, so the first recorded pair
// whose observations differ yields a shortest witness.
struct Closure {
    UnionFind uf;
    std::vector<GenPair> records;
    std::uint64_t pops = 0;

    Closure(const System& sys, std::size_t u) : uf(sys.n_states()) {
        std::deque<std::size_t> work;
        auto consider = [&](const GenPair& rec) {
            if (rec.x == rec.y || !uf.unite(rec.x, rec.y)) return;
            records.push_back(rec);
            work.push_back(records.size() - 1);
        };
        for (std::size_t s = 0; s < sys.n_states(); ++s)
            for (std::size_t a = 0; a < sys.n_actions(); ++a)
                if (!sys.interferes(sys.dom(a), u, s))
                    consider({sys.step(s, a), s, 0, -1, a, s});
        while (!work.empty()) {
            std::size_t idx = work.front();
            work.pop_front();
            ++pops;
            for (std::size_t b = 0; b < sys.n_actions(); ++b) {
                GenPair cur = records[idx];
                consider({sys.step(cur.x, b), sys.step(cur.y, b), cur.depth + 1,
                          static_cast<std::ptrdiff_t>(idx), b, cur.seed_state});
            }
        }
    }
};

Witness witness_from(const System& sys, std::size_t u, const std::vector<GenPair>& records,
                     std::size_t idx) {
    ActionSeq alpha;
    std::size_t i = idx;
    while (records[i].parent >= 0) {
        alpha.push_back(records[i].action);
        i = static_cast<std::size_t>(records[i].parent);
    }
    std::reverse(alpha.begin(), alpha.end());
    Witness w;
    w.property = "t-security";
    w.agent = u;
    w.state = records[i].seed_state;
    w.action = records[i].action;
    w.alpha = std::move(alpha);
    w.obs_with = sys.obs(records[idx].x, u);
    w.obs_without = sys.obs(records[idx].y, u);
    return w;
}

// BFS over (real run, purged run) state pairs from the initial state.
// Returns the agent of the first observation mismatch, if any.
std::optional<std::size_t> initial_pair_violation(const System& sys, Stats& stats) {
    std::size_t n = sys.n_states();
    for (std::size_t u = 0; u < sys.n_agents(); ++u) {
        std::vector<char> seen(n * n, 0);
        std::deque<std::pair<std::size_t, std::size_t>> work;
        auto push = [&](std::size_t x, std::size_t y) {
            if (seen[x * n + y]) return;
            seen[x * n + y] = 1;
            work.emplace_back(x, y);
        };
        push(sys.initial, sys.initial);
        while (!work.empty()) {
            auto [x, y] = work.front();
            work.pop_front();
            ++stats.iterations;
            if (sys.obs(x, u) != sys.obs(y, u)) return u;
            for (std::size_t a = 0; a < sys.n_actions(); ++a)
                push(sys.step(x, a),
                     sys.interferes(sys.dom(a), u, y) ? sys.step(y, a) : y);
        }
    }
    return std::nullopt;
}

}  // namespace

ActionSeq purge(const System& sys, std::span<const std::size_t> alpha, std::size_t u,
                std::size_t state) {
    ActionSeq kept;
    std::size_t s = state;
    for (std::size_t a : alpha) {
        if (sys.interferes(sys.dom(a), u, s)) {
            kept.push_back(a);
            s = sys.step(s, a);
        }
    }
    return kept;
}

StatePartition t_similarity(const System& sys, std::size_t u) {
    Closure cl(sys, u);
    StatePartition part;
    part.agent = u;
    part.class_of.assign(sys.n_states(), 0);
    std::vector<std::ptrdiff_t> class_of_root(sys.n_states(), -1);
    for (std::size_t s = 0; s < sys.n_states(); ++s) {
        std::size_t r = cl.uf.find(s);
        if (class_of_root[r] < 0) {
            class_of_root[r] = static_cast<std::ptrdiff_t>(part.classes.size());
            part.classes.emplace_back();
        }
        part.class_of[s] = static_cast<std::size_t>(class_of_root[r]);
        part.classes[part.class_of[s]].push_back(s);
    }
    return part;
}

Verdict check_t_security(const System& sys) {
    Verdict v;
    std::size_t best_depth = std::numeric_limits<std::size_t>::max();
    for (std::size_t u = 0; u < sys.n_agents(); ++u) {
        Closure cl(sys, u);
        v.stats.iterations += cl.pops;
        v.stats.materialized += cl.records.size();
        for (std::size_t i = 0; i < cl.records.size(); ++i) {
            ++v.stats.evaluations;
            const GenPair& r = cl.records[i];
            if (sys.obs(r.x, u) != sys.obs(r.y, u)) {
                if (r.depth < best_depth) {
                    best_depth = r.depth;
                    v.witness = witness_from(sys, u, cl.records, i);
                }
                break;
            }
        }
    }
    v.holds = !v.witness.has_value();
    return v;
}

Verdict t_security_pair_oracle(const System& sys) {
    Verdict v;
    std::size_t n = sys.n_states();
    std::size_t best_depth = std::numeric_limits<std::size_t>::max();
    struct Node {
        std::size_t x = 0;
        std::size_t y = 0;
        std::size_t depth = 0;
        std::ptrdiff_t parent = -1;
        std::size_t action = 0;
        std::size_t seed_state = 0;
    };
    for (std::size_t u = 0; u < sys.n_agents(); ++u) {
        std::vector<char> seen(n * n, 0);
        std::vector<Node> nodes;
        std::deque<std::size_t> work;
        auto push = [&](const Node& nd) {
            if (nd.x == nd.y || seen[nd.x * n + nd.y]) return;
            seen[nd.x * n + nd.y] = 1;
            nodes.push_back(nd);
            work.push_back(nodes.size() - 1);
        };
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t a = 0; a < sys.n_actions(); ++a)
                if (!sys.interferes(sys.dom(a), u, s))
                    push({sys.step(s, a), s, 0, -1, a, s});
        while (!work.empty()) {
            std::size_t idx = work.front();
            work.pop_front();
            ++v.stats.iterations;
            Node cur = nodes[idx];
            if (sys.obs(cur.x, u) != sys.obs(cur.y, u)) {
                if (cur.depth < best_depth) {
                    best_depth = cur.depth;
                    ActionSeq alpha;
                    std::size_t i = idx;
                    while (nodes[i].parent >= 0) {
                        alpha.push_back(nodes[i].action);
                        i = static_cast<std::size_t>(nodes[i].parent);
                    }
                    std::reverse(alpha.begin(), alpha.end());
                    Witness w;
                    w.property = "t-security";
                    w.agent = u;
                    w.state = nodes[i].seed_state;
                    w.action = nodes[i].action;
                    w.alpha = std::move(alpha);
                    w.obs_with = sys.obs(cur.x, u);
                    w.obs_without = sys.obs(cur.y, u);
                    v.witness = w;
                }
                break;
            }
            for (std::size_t b = 0; b < sys.n_actions(); ++b)
                push({sys.step(cur.x, b), sys.step(cur.y, b), cur.depth + 1,
                      static_cast<std::ptrdiff_t>(idx), b, cur.seed_state});
        }
        v.stats.materialized += nodes.size();
    }
    v.holds = !v.witness.has_value();
    return v;
}

std::vector<PolicyEdge> find_useless_edges_t(const System& sys) {
    std::vector<PolicyEdge> out;
    for (std::size_t u = 0; u < sys.n_agents(); ++u) {
        StatePartition part = t_similarity(sys, u);
        for (const auto& cls : part.classes) {
            AgentSet common = sys.interfering_set(u, cls.front());
            for (std::size_t s : cls) common &= sys.interfering_set(u, s);
            for (std::size_t s : cls) {
                AgentSet extra = sys.interfering_set(u, s) & common.complement();
                extra.for_each([&](std::size_t v) { out.push_back({s, v, u}); });
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

System normalize_t(const System& sys) {
    System out = sys;
    for (const PolicyEdge& e : find_useless_edges_t(sys))
        out.interfering[e.state][e.target].reset(e.source);
    return out;
}

UniformVerdict is_uniform_t(const System& sys) {
    UniformVerdict uv;
    for (std::size_t u = 0; u < sys.n_agents(); ++u) {
        StatePartition part = t_similarity(sys, u);
        for (const auto& cls : part.classes) {
            ++uv.stats.iterations;
            for (std::size_t s : cls) {
                if (!(sys.interfering_set(u, s) == sys.interfering_set(u, cls.front()))) {
                    uv.uniform = false;
                    uv.witness = UniformWitness{u, cls.front(), s,
                                                sys.interfering_set(u, cls.front()),
                                                sys.interfering_set(u, s)};
                    return uv;
                }
            }
        }
    }
    return uv;
}

Verdict check_t_from_initial(const System& sys) {
    UniformVerdict uv = is_uniform_t(sys);
    if (!uv.uniform) {
        std::string msg =
            "policy is not transitively uniform: " + render_uniform_witness(sys, *uv.witness);
        Stats scratch;
        if (!initial_pair_violation(sys, scratch) && !check_t_security(sys).holds)
            msg += "; the initial-state check alone would wrongly report the system secure";
        throw AnalysisError(ErrorKind::NonUniformPolicy, msg);
    }
    Verdict v;
    if (initial_pair_violation(sys, v.stats)) {
        v.holds = false;
        Verdict full = check_t_security(sys);
        v.stats.materialized = full.stats.materialized;
        if (full.witness) v.witness = full.witness;
    }
    v.notes.push_back(
        "checked from the initial state only; sound because the policy is transitively uniform");
    return v;
}

}  // namespace nipol
