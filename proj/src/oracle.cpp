#include "nipol/oracle.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <unordered_map>

namespace nipol {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

// sum_{k <= bound} branching^k, saturating
std::uint64_t nodes_up_to(std::size_t branching, std::size_t bound) {
    std::uint64_t total = 0, pow = 1;
    for (std::size_t k = 0; k <= bound; ++k) {
        if (total > kMax - pow) return kMax;
        total += pow;
        if (k < bound && branching > 1) {
            if (pow > kMax / branching) return kMax;
            pow *= branching;
        } else if (k < bound && branching == 0) {
            pow = 0;
        }
    }
    return total;
}

void require_budget(const char* what, std::size_t branching, std::uint64_t per_node,
                    std::size_t bound, std::uint64_t budget) {
    if (per_node == 0) per_node = 1;
    std::uint64_t n = nodes_up_to(branching, bound);
    if (n == kMax || n > budget / per_node)
        throw AnalysisError(ErrorKind::BudgetExceeded,
                            std::string(what) + ": bound " + std::to_string(bound) +
                                " exceeds the evaluation budget " + std::to_string(budget) +
                                "; largest feasible bound is " +
                                std::to_string(max_feasible_bound(branching, per_node, budget)));
}

std::string decode_alpha(const System& sys, const std::string& packed) {
    ActionSeq seq;
    for (char c : packed) seq.push_back(static_cast<unsigned char>(c));
    return render_alpha(sys, seq);
}

}  // namespace

std::size_t max_feasible_bound(std::size_t branching, std::uint64_t per_node,
                               std::uint64_t budget) {
    if (per_node == 0) per_node = 1;
    std::size_t best = 0;
    for (std::size_t b = 0; b <= 64; ++b) {
        std::uint64_t n = nodes_up_to(branching, b);
        if (n == kMax || n > budget / per_node) break;
        best = b;
    }
    return best;
}

std::size_t t_oracle_max_bound(const System& sys, std::uint64_t budget) {
    return max_feasible_bound(sys.n_actions(),
                              std::uint64_t(sys.n_states()) *
                                  std::max<std::size_t>(sys.n_actions(), 1),
                              budget);
}

namespace {

// DFS over the continuation tree for one (state, hidden action) seed,
// stepping the with/without runs in lockstep. Once both runs meet in the
// same state they can never diverge again, so that subtree is skipped.
struct DefinitionWalk {
    const System& sys;
    std::size_t bound;
    const AgentSet& hidden;
    std::size_t seed_state, seed_action;
    Verdict& verdict;
    std::uint64_t& nodes;
    ActionSeq alpha;

    bool walk(std::size_t p, std::size_t q) {  // p = run with action, q = without
        ++nodes;
        bool bad = false;
        hidden.for_each([&](std::size_t u) {
            if (bad) return;
            if (sys.obs(p, u) != sys.obs(q, u)) {
                Witness w;
                w.property = "t-security";
                w.agent = u;
                w.state = seed_state;
                w.action = seed_action;
                w.alpha = alpha;
                w.obs_with = sys.obs(p, u);
                w.obs_without = sys.obs(q, u);
                verdict.witness = w;
                bad = true;
            }
        });
        if (bad) return true;
        if (p == q || alpha.size() == bound) return false;
        for (std::size_t b = 0; b < sys.n_actions(); ++b) {
            alpha.push_back(b);
            if (walk(sys.step(p, b), sys.step(q, b))) return true;
            alpha.pop_back();
        }
        return false;
    }
};

}  // namespace

Verdict t_definition_oracle(const System& sys, std::size_t bound, std::uint64_t budget) {
    require_budget("t-definition-oracle", sys.n_actions(),
                   std::uint64_t(sys.n_states()) * std::max<std::size_t>(sys.n_actions(), 1),
                   bound, budget);
    Verdict v;
    std::uint64_t nodes = 0;
    for (std::size_t s = 0; s < sys.n_states() && v.holds; ++s) {
        for (std::size_t a = 0; a < sys.n_actions() && v.holds; ++a) {
            AgentSet hidden(sys.n_agents());
            bool any = false;
            for (std::size_t u = 0; u < sys.n_agents(); ++u)
                if (!sys.interferes(sys.dom(a), u, s)) {
                    hidden.set(u);
                    any = true;
                }
            if (!any) continue;
            DefinitionWalk walk{sys, bound, hidden, s, a, v, nodes, {}};
            if (walk.walk(sys.step(s, a), s)) v.holds = false;
        }
    }
    v.stats.evaluations = nodes;
    return v;
}

namespace {

// Enumerates continuations from one (agent, state), carrying the purge value
// incrementally: the purge of alpha.b extends the purge of alpha iff dom(b)
// interferes at the state reached by the kept actions only.
struct PurgeGroupWalk {
    const System& sys;
    std::size_t bound;
    std::size_t u, s0;
    Verdict& verdict;
    std::uint64_t& nodes;
    std::uint64_t& groups;
    // purge value (packed action bytes) -> (obs label, rendered alpha)
    std::unordered_map<std::string, std::pair<std::string, std::string>> seen;
    ActionSeq alpha;

    bool walk(std::size_t r, std::size_t ps, const std::string& key) {
        ++nodes;
        auto [it, fresh] = seen.try_emplace(key, sys.obs(r, u), render_alpha(sys, alpha));
        if (fresh) {
            ++groups;
        } else if (it->second.first != sys.obs(r, u)) {
            verdict.notes.push_back(
                "purge-equality violated for agent " + sys.agent_names[u] + " at state " +
                sys.state_names[s0] + ": \"" + it->second.second + "\" and \"" +
                render_alpha(sys, alpha) + "\" share purge \"" + decode_alpha(sys, key) +
                "\" but observe " + it->second.first + " vs " + sys.obs(r, u));
            return true;
        }
        if (alpha.size() == bound) return false;
        for (std::size_t b = 0; b < sys.n_actions(); ++b) {
            alpha.push_back(b);
            bool kept = sys.interferes(sys.dom(b), u, ps);
            bool bad = kept ? walk(sys.step(r, b), sys.step(ps, b),
                                   key + static_cast<char>(b))
                            : walk(sys.step(r, b), ps, key);
            if (bad) return true;
            alpha.pop_back();
        }
        return false;
    }
};

}  // namespace

Verdict purge_equality_oracle(const System& sys, std::size_t bound, std::uint64_t budget) {
    require_budget("purge-equality-oracle", sys.n_actions(),
                   std::uint64_t(sys.n_states()) * std::max<std::size_t>(sys.n_agents(), 1),
                   bound, budget);
    Verdict v;
    std::uint64_t nodes = 0, groups = 0;
    for (std::size_t u = 0; u < sys.n_agents() && v.holds; ++u)
        for (std::size_t s = 0; s < sys.n_states() && v.holds; ++s) {
            PurgeGroupWalk walk{sys, bound, u, s, v, nodes, groups, {}, {}};
            if (walk.walk(s, s, "")) v.holds = false;
        }
    v.stats.evaluations = nodes;
    v.stats.materialized = groups;
    return v;
}

namespace {

// Enumerates sequences right-to-left (each node prepends one action), so the
// sources and ipurge of a node derive from its parent suffix in O(|S|):
// sources(b.beta, u, s) extends sources(beta, u, s.b) with dom(b) iff dom(b)
// interferes with a member at s, and ipurge keeps b exactly in that case
// (dropping b keeps the evaluation state, so the parent value at s itself is
// reused).
struct IpurgeGroupWalk {
    const System& sys;
    std::size_t bound;
    std::size_t u;
    Verdict& verdict;
    std::uint64_t& nodes;
    std::uint64_t& groups;
    std::vector<std::unordered_map<std::string, std::pair<std::string, std::string>>> seen;
    std::vector<std::size_t> prepended;  // edge stack; node sequence = reverse

    struct Layer {
        std::vector<AgentSet> src;       // per start state
        std::vector<std::string> ip;     // per start state, packed action bytes
        std::vector<std::size_t> reach;  // per start state, run target
    };

    std::string rendered() const {
        ActionSeq seq(prepended.rbegin(), prepended.rend());
        return render_alpha(sys, seq);
    }

    bool record(const Layer& layer) {
        for (std::size_t s = 0; s < sys.n_states(); ++s) {
            ++nodes;
            const std::string& label = sys.obs(layer.reach[s], u);
            auto [it, fresh] = seen[s].try_emplace(layer.ip[s], label, rendered());
            if (fresh) {
                ++groups;
            } else if (it->second.first != label) {
                verdict.notes.push_back(
                    "ipurge-equality violated for agent " + sys.agent_names[u] +
                    " at state " + sys.state_names[s] + ": \"" + it->second.second +
                    "\" and \"" + rendered() + "\" share ipurge \"" +
                    decode_alpha(sys, layer.ip[s]) + "\" but observe " +
                    it->second.first + " vs " + label);
                return true;
            }
        }
        return false;
    }

    bool walk(const Layer& layer) {
        if (record(layer)) return true;
        if (prepended.size() == bound) return false;
        for (std::size_t b = 0; b < sys.n_actions(); ++b) {
            Layer next;
            next.src.reserve(sys.n_states());
            next.ip.resize(sys.n_states());
            next.reach.resize(sys.n_states());
            for (std::size_t s = 0; s < sys.n_states(); ++s) {
                std::size_t t = sys.step(s, b);
                bool transmitted = false;
                layer.src[t].for_each([&](std::size_t v) {
                    if (!transmitted && sys.interferes(sys.dom(b), v, s)) transmitted = true;
                });
                AgentSet srcs = layer.src[t];
                if (transmitted) {
                    srcs.set(sys.dom(b));
                    next.ip[s] = static_cast<char>(b) + layer.ip[t];
                } else {
                    next.ip[s] = layer.ip[s];
                }
                next.src.push_back(std::move(srcs));
                next.reach[s] = layer.reach[t];
            }
            prepended.push_back(b);
            if (walk(next)) return true;
            prepended.pop_back();
        }
        return false;
    }
};

}  // namespace

Verdict ipurge_equality_oracle(const System& sys, std::size_t bound, std::uint64_t budget) {
    require_budget("ipurge-equality-oracle", sys.n_actions(),
                   std::uint64_t(sys.n_states()) * std::max<std::size_t>(sys.n_agents(), 1),
                   bound, budget);
    Verdict v;
    std::uint64_t nodes = 0, groups = 0;
    for (std::size_t u = 0; u < sys.n_agents() && v.holds; ++u) {
        IpurgeGroupWalk walk{sys, bound, u, v, nodes, groups, {}, {}, };
        walk.seen.resize(sys.n_states());
        IpurgeGroupWalk::Layer root;
        root.src.assign(sys.n_states(), AgentSet(sys.n_agents()));
        for (auto& set : root.src) set.set(u);
        root.ip.assign(sys.n_states(), "");
        root.reach.resize(sys.n_states());
        for (std::size_t s = 0; s < sys.n_states(); ++s) root.reach[s] = s;
        if (walk.walk(root)) v.holds = false;
    }
    v.stats.evaluations = nodes;
    v.stats.materialized = groups;
    return v;
}

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    // mt19937_64 output is specified exactly, so modulo draws are stable
    // across platforms (uniform_int_distribution is not).
    std::size_t next(std::size_t n) { return n ? static_cast<std::size_t>(gen() % n) : 0; }
    double unit() { return static_cast<double>(gen() >> 11) * (1.0 / 9007199254740992.0); }
};

}  // namespace

System generate_random_system(const GeneratorConfig& cfg) {
    Rng rng(cfg.seed);
    std::size_t n_agents = 1 + rng.next(cfg.max_agents);
    std::size_t n_actions = 1 + rng.next(cfg.max_actions);
    std::size_t n_states = 1 + rng.next(cfg.max_states);

    auto uname = [](std::size_t i) { return "u" + std::to_string(i); };
    auto xname = [](std::size_t i) { return "x" + std::to_string(i); };
    auto sname = [](std::size_t i) { return "s" + std::to_string(i); };

    SystemBuilder builder;
    for (std::size_t u = 0; u < n_agents; ++u) builder.agent(uname(u));
    for (std::size_t a = 0; a < n_actions; ++a) builder.action(xname(a), uname(rng.next(n_agents)));
    for (std::size_t s = 0; s < n_states; ++s) builder.state(sname(s), s == 0);

    // Spanning skeleton: state i is entered from a free slot of an earlier
    // state, so everything stays reachable from s0.
    std::vector<std::vector<int>> target(n_states, std::vector<int>(n_actions, -1));
    for (std::size_t i = 1; i < n_states; ++i) {
        for (;;) {
            std::size_t p = rng.next(i);
            std::size_t a = rng.next(n_actions);
            if (target[p][a] < 0) {
                target[p][a] = static_cast<int>(i);
                break;
            }
        }
    }
    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t a = 0; a < n_actions; ++a) {
            if (target[s][a] < 0) target[s][a] = static_cast<int>(rng.next(s + 1));
            if (static_cast<std::size_t>(target[s][a]) != s)
                builder.step(sname(s), xname(a), sname(target[s][a]));
        }

    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t u = 0; u < n_agents; ++u) {
            std::size_t label = rng.next(std::max<std::size_t>(cfg.obs_alphabet_size, 1));
            if (label != 0) builder.obs(sname(s), uname(u), std::to_string(label));
        }

    for (std::size_t s = 0; s < n_states; ++s)
        for (std::size_t v = 0; v < n_agents; ++v)
            for (std::size_t u = 0; u < n_agents; ++u)
                if (v != u && rng.unit() < cfg.edge_density)
                    builder.edge(sname(s), uname(v), uname(u));

    return builder.build();
}

System with_global_policy(const System& sys) {
    System g = sys;
    std::vector<AgentSet> merged(sys.n_agents(), AgentSet(sys.n_agents()));
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t u = 0; u < sys.n_agents(); ++u) merged[u] |= sys.interfering[s][u];
    for (std::size_t s = 0; s < sys.n_states(); ++s) g.interfering[s] = merged;
    return g;
}

}  // namespace nipol
