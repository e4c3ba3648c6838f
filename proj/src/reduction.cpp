#include "nipol/reduction.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nipol {

namespace {

// Index layout shared by the generator and the decoder. Agents: four per
// vertex (chooser plus one witness per color), then h and L. Actions: six
// per vertex (three color claims, three color denials), then h and l.
// States: s0, dummy, then per branch four states per vertex gadget and
// twenty-five per edge gadget followed by the branch's final state.
constexpr std::size_t agents_per_vertex = 4;
constexpr std::size_t actions_per_vertex = 6;
constexpr std::size_t vertex_gadget_states = 4;
constexpr std::size_t edge_gadget_states = 25;

std::size_t chooser_agent(std::size_t v) { return agents_per_vertex * v; }
std::size_t h_agent(const Graph& g) { return agents_per_vertex * g.vertices.size(); }
std::size_t branch_states(const Graph& g) {
    return vertex_gadget_states * g.vertices.size() + edge_gadget_states * g.edges.size() + 1;
}

const std::array<std::array<std::size_t, 2>, 3> other_colors = {{{1, 2}, {0, 2}, {0, 1}}};

struct GadgetNames {
    std::string chooser;                 // agent of the color-claim actions
    std::array<std::string, 3> witness;  // one agent per color
    std::array<std::string, 3> claim;    // actions claiming a color
    std::array<std::string, 3> deny;     // actions denying a color
};

GadgetNames names_for(const std::string& vertex) {
    GadgetNames n;
    n.chooser = "v_" + vertex;
    for (std::size_t c = 0; c < 3; ++c) {
        n.witness[c] = n.chooser + "_ne" + std::to_string(c);
        n.claim[c] = n.chooser + "_eq" + std::to_string(c);
        n.deny[c] = n.chooser + "_ne" + std::to_string(c);
    }
    return n;
}

}  // namespace

std::optional<Graph> parse_graph(const std::string& text, std::vector<Diagnostic>& diagnostics) {
    Graph g;
    std::unordered_map<std::string, std::size_t> index;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    bool ok = true;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::vector<std::string> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > start) tokens.push_back(line.substr(start, i - start));
        }
        if (tokens.empty()) {
            if (pos > text.size()) break;
            continue;
        }
        SourceSpan span{line_no, 1, static_cast<int>(line.size())};
        auto fail = [&](std::string msg) {
            diagnostics.push_back({true, std::move(msg), span});
            ok = false;
        };
        if (tokens[0] == "vertex") {
            if (tokens.size() != 2) {
                fail("expected: vertex NAME");
            } else if (!index.emplace(tokens[1], g.vertices.size()).second) {
                fail("duplicate vertex '" + tokens[1] + "'");
            } else {
                g.vertices.push_back(tokens[1]);
            }
        } else if (tokens[0] == "edge") {
            if (tokens.size() != 3) {
                fail("expected: edge NAME NAME");
                continue;
            }
            auto a = index.find(tokens[1]);
            auto b = index.find(tokens[2]);
            if (a == index.end() || b == index.end()) {
                fail("edge references undeclared vertex '" +
                     (a == index.end() ? tokens[1] : tokens[2]) + "'");
            } else if (a->second == b->second) {
                fail("self-loop on vertex '" + tokens[1] + "'");
            } else {
                auto key = std::minmax(a->second, b->second);
                if (!seen.insert(key).second)
                    diagnostics.push_back(
                        {false, "duplicate edge '" + tokens[1] + " " + tokens[2] + "'", span});
                else
                    g.edges.emplace_back(a->second, b->second);
            }
        } else {
            fail("unknown directive '" + tokens[0] + "'");
        }
        if (pos > text.size()) break;
    }
    if (!ok) return std::nullopt;
    return g;
}

System generate_3col_system(const Graph& g) {
    SystemBuilder b;
    std::vector<GadgetNames> names;
    names.reserve(g.vertices.size());
    for (const auto& vertex : g.vertices) names.push_back(names_for(vertex));

    for (const auto& n : names) {
        b.agent(n.chooser);
        for (const auto& w : n.witness) b.agent(w);
    }
    b.agent("h");
    b.agent("L");
    for (const auto& n : names) {
        for (std::size_t c = 0; c < 3; ++c) b.action(n.claim[c], n.chooser);
        for (std::size_t c = 0; c < 3; ++c) b.action(n.deny[c], n.witness[c]);
    }
    b.action("h", "h");
    b.action("l", "L");

    b.state("s0", true);
    b.state("dummy");
    for (const auto& n : names) b.edge("s0", n.chooser, "L");
    for (const auto& n : names)
        for (const auto& w : n.witness) b.edge("s0", w, "L");

    // One chain per branch; the primed copy gets the everything-goes policy.
    for (bool primed : {false, true}) {
        std::string px = primed ? "p_" : "";
        std::vector<std::string> states_of_branch;
        auto add_state = [&](const std::string& name) {
            b.state(name);
            states_of_branch.push_back(name);
            return name;
        };
        std::vector<std::string> joints;
        for (const auto& vertex : g.vertices) joints.push_back(px + "col_" + vertex + "_in");
        for (std::size_t e = 0; e < g.edges.size(); ++e)
            joints.push_back(px + "dc" + std::to_string(e) + "_in");
        joints.push_back(px + "last");

        for (std::size_t v = 0; v < g.vertices.size(); ++v) {
            const GadgetNames& n = names[v];
            const std::string& entry = add_state(joints[v]);
            const std::string& exit = joints[v + 1];
            for (std::size_t c = 0; c < 3; ++c) {
                std::string mid = add_state(px + "col_" + g.vertices[v] + "_c" + std::to_string(c));
                b.step(entry, n.claim[c], mid);
                b.step(mid, "h", exit);
                if (!primed) b.edge(mid, "h", n.witness[c]);
            }
        }
        for (std::size_t e = 0; e < g.edges.size(); ++e) {
            const GadgetNames& nu = names[g.edges[e].first];
            const GadgetNames& nv = names[g.edges[e].second];
            std::string tag = px + "dc" + std::to_string(e);
            const std::string entry = add_state(joints[g.vertices.size() + e]);
            const std::string& exit = joints[g.vertices.size() + e + 1];
            for (std::size_t c = 0; c < 3; ++c) {
                std::string ub = add_state(tag + "_u" + std::to_string(c));
                std::string ux = add_state(tag + "_u" + std::to_string(c) + "x");
                std::string uk = add_state(tag + "_u" + std::to_string(c) + "k");
                std::string dead = add_state(tag + "_dead" + std::to_string(c));
                b.step(entry, nu.claim[c], ub);
                b.step(ub, nu.deny[other_colors[c][0]], ux);
                b.step(ux, nu.deny[other_colors[c][1]], uk);
                b.step(uk, nv.claim[c], dead);
                if (!primed)
                    for (std::size_t j : other_colors[c]) {
                        b.edge(ub, nu.witness[j], "L");
                        b.edge(ux, nu.witness[j], "L");
                    }
                for (std::size_t j : other_colors[c]) {
                    std::string vb = add_state(tag + "_u" + std::to_string(c) + "v" +
                                               std::to_string(j));
                    std::string vx = add_state(tag + "_u" + std::to_string(c) + "v" +
                                               std::to_string(j) + "x");
                    b.step(uk, nv.claim[j], vb);
                    b.step(vb, nv.deny[other_colors[j][0]], vx);
                    b.step(vx, nv.deny[other_colors[j][1]], exit);
                    if (!primed)
                        for (std::size_t k : other_colors[j]) {
                            b.edge(vb, nv.witness[k], "L");
                            b.edge(vx, nv.witness[k], "L");
                        }
                }
            }
        }
        add_state(joints.back());

        std::vector<std::string> everyone;
        for (const auto& n : names) {
            everyone.push_back(n.chooser);
            for (const auto& w : n.witness) everyone.push_back(w);
        }
        everyone.push_back("h");
        everyone.push_back("L");
        if (primed)
            for (const auto& state : states_of_branch)
                for (const auto& from : everyone)
                    for (const auto& to : everyone)
                        if (from != to) b.edge(state, from, to);

        std::string chain_entry = joints.front();
        if (primed) {
            for (std::size_t a = 0; a < names.size(); ++a)
                for (std::size_t c = 0; c < 3; ++c) {
                    b.step("s0", names[a].claim[c], chain_entry);
                    b.step("s0", names[a].deny[c], chain_entry);
                }
            b.step("s0", "l", chain_entry);
            b.step("s0", "h", "dummy");
        } else {
            for (std::size_t a = 0; a < names.size(); ++a)
                for (std::size_t c = 0; c < 3; ++c) {
                    b.step("dummy", names[a].claim[c], chain_entry);
                    b.step("dummy", names[a].deny[c], chain_entry);
                }
            b.step("dummy", "l", chain_entry);
        }
    }
    b.obs("p_last", "L", "1");
    return b.build();
}

namespace {

std::optional<Graph> decode_reduction(const System& sys) {
    if (sys.n_agents() < 2 || (sys.n_agents() - 2) % agents_per_vertex != 0) return std::nullopt;
    std::size_t n = (sys.n_agents() - 2) / agents_per_vertex;
    if (sys.agent_names[agents_per_vertex * n] != "h" ||
        sys.agent_names[agents_per_vertex * n + 1] != "L")
        return std::nullopt;
    Graph g;
    for (std::size_t v = 0; v < n; ++v) {
        const std::string& name = sys.agent_names[chooser_agent(v)];
        if (name.rfind("v_", 0) != 0) return std::nullopt;
        g.vertices.push_back(name.substr(2));
    }
    std::size_t per_branch_min = vertex_gadget_states * n + 1;
    if (sys.n_states() < 2 + 2 * per_branch_min) return std::nullopt;
    std::size_t rest = sys.n_states() - 2 - 2 * per_branch_min;
    if (rest % (2 * edge_gadget_states) != 0) return std::nullopt;
    std::size_t m = rest / (2 * edge_gadget_states);

    auto moving_vertex = [&](std::size_t state) -> std::optional<std::size_t> {
        for (std::size_t a = 0; a < sys.n_actions(); ++a)
            if (sys.step(state, a) != state) {
                std::size_t agent = sys.dom(a);
                if (agent % agents_per_vertex != 0 || agent / agents_per_vertex >= n)
                    return std::nullopt;
                return agent / agents_per_vertex;
            }
        return std::nullopt;
    };
    for (std::size_t e = 0; e < m; ++e) {
        std::size_t entry = 2 + vertex_gadget_states * n + edge_gadget_states * e;
        auto u = moving_vertex(entry);
        auto v = moving_vertex(entry + 3);
        if (!u || !v) return std::nullopt;
        g.edges.emplace_back(*u, *v);
    }
    return g;
}

}  // namespace

bool is_reduction_instance(const System& sys) {
    return decode_reduction_instance(sys).has_value();
}

std::optional<Graph> decode_reduction_instance(const System& sys) {
    auto g = decode_reduction(sys);
    if (!g || !(generate_3col_system(*g) == sys)) return std::nullopt;
    return g;
}

HidingPathResult has_hiding_path(const System& sys) {
    auto g = decode_reduction(sys);
    if (!g || !(generate_3col_system(*g) == sys))
        throw AnalysisError(ErrorKind::NotAReductionInstance,
                            "the input does not have the generated chain-of-gadgets shape");

    HidingPathResult res;
    std::size_t n = g->vertices.size();
    std::size_t ha = h_agent(*g);
    std::size_t la = ha + 1;
    std::size_t dummy = 1;
    std::size_t last = 2 + branch_states(*g) - 1;

    struct Node {
        std::size_t state = 0;
        AgentSet know;
        std::ptrdiff_t parent = -1;
        std::size_t action = 0;
    };
    std::vector<Node> nodes;
    std::vector<std::size_t> stack;
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> visited;
    auto push = [&](std::size_t state, const AgentSet& know, std::ptrdiff_t parent,
                    std::size_t action) {
        if (know.intersects(sys.interfering_set(la, state))) return;
        if (!visited.emplace(state, know.elements()).second) return;
        nodes.push_back({state, know, parent, action});
        stack.push_back(nodes.size() - 1);
    };

    AgentSet root(sys.n_agents());
    root.set(ha);
    push(dummy, root, -1, 0);
    while (!stack.empty()) {
        std::size_t idx = stack.back();
        stack.pop_back();
        ++res.stats.iterations;
        if (nodes[idx].state == last) {
            std::size_t i = idx;
            while (nodes[i].parent >= 0) {
                res.path.push_back(nodes[i].action);
                i = static_cast<std::size_t>(nodes[i].parent);
            }
            std::reverse(res.path.begin(), res.path.end());
            res.found = true;
            break;
        }
        for (std::size_t b = 0; b < sys.n_actions(); ++b) {
            Node cur = nodes[idx];
            AgentSet know = cur.know;
            if (know.test(sys.dom(b))) {
                for (std::size_t w = 0; w < sys.n_agents(); ++w)
                    if (sys.interferes(sys.dom(b), w, cur.state)) know.set(w);
            }
            push(sys.step(cur.state, b), know, static_cast<std::ptrdiff_t>(idx), b);
        }
    }
    res.stats.materialized = nodes.size();

    if (res.found) {
        res.coloring.assign(n, 0);
        std::size_t cur = dummy;
        for (std::size_t b : res.path) {
            bool at_choice = cur >= 2 && cur < 2 + vertex_gadget_states * n &&
                             (cur - 2) % vertex_gadget_states == 0;
            if (at_choice && b < actions_per_vertex * n && b % actions_per_vertex < 3)
                res.coloring[b / actions_per_vertex] = b % actions_per_vertex;
            cur = sys.step(cur, b);
        }
    }
    return res;
}

std::optional<std::vector<std::size_t>> brute_force_3coloring(const Graph& g) {
    if (g.vertices.size() > 20)
        throw AnalysisError(ErrorKind::TooLarge,
                            "brute-force coloring is capped at 20 vertices, got " +
                                std::to_string(g.vertices.size()));
    std::vector<std::vector<std::size_t>> earlier(g.vertices.size());
    for (auto [a, b] : g.edges) {
        if (a < b)
            earlier[b].push_back(a);
        else
            earlier[a].push_back(b);
    }
    std::vector<std::size_t> color(g.vertices.size(), 0);
    std::size_t v = 0;
    std::vector<std::size_t> next(g.vertices.size(), 0);
    while (v < g.vertices.size()) {
        bool placed = false;
        for (std::size_t c = next[v]; c < 3 && !placed; ++c) {
            bool clash = false;
            for (std::size_t w : earlier[v]) clash = clash || color[w] == c;
            if (!clash) {
                color[v] = c;
                next[v] = c + 1;
                placed = true;
            }
        }
        if (placed) {
            ++v;
            if (v < g.vertices.size()) next[v] = 0;
        } else {
            if (v == 0) return std::nullopt;
            --v;
        }
    }
    return color;
}

}  // namespace nipol
