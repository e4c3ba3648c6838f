#include "nipol/core.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>

namespace nipol {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonUniformPolicy: return "non-uniform-policy";
        case ErrorKind::NotGlobalPolicy: return "not-global-policy";
        case ErrorKind::SubsetGuardExceeded: return "subset-guard-exceeded";
        case ErrorKind::BudgetExceeded: return "budget-exceeded";
        case ErrorKind::NotAReductionInstance: return "not-a-reduction-instance";
        case ErrorKind::TooLarge: return "too-large";
    }
    return "unknown";
}

std::optional<std::size_t> System::agent_index(std::string_view name) const {
    for (std::size_t i = 0; i < agent_names.size(); ++i)
        if (agent_names[i] == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> System::action_index(std::string_view name) const {
    for (std::size_t i = 0; i < action_names.size(); ++i)
        if (action_names[i] == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> System::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < state_names.size(); ++i)
        if (state_names[i] == name) return i;
    return std::nullopt;
}

bool System::has_global_policy() const {
    for (std::size_t s = 1; s < n_states(); ++s)
        if (interfering[s] != interfering[0]) return false;
    return true;
}

std::optional<System> validate(const RawSystem& raw, std::vector<Diagnostic>& diags) {
    bool ok = true;
    auto error = [&](std::string msg, SourceSpan span) {
        diags.push_back({true, std::move(msg), span});
        ok = false;
    };
    auto warn = [&](std::string msg, SourceSpan span) {
        diags.push_back({false, std::move(msg), span});
    };

    System sys;
    std::unordered_map<std::string, std::size_t> agent_ix, action_ix, state_ix;

    for (const auto& a : raw.agents) {
        if (agent_ix.count(a.name)) {
            error("duplicate agent " + a.name, a.span);
            continue;
        }
        agent_ix.emplace(a.name, sys.agent_names.size());
        sys.agent_names.push_back(a.name);
    }
    for (const auto& a : raw.actions) {
        if (action_ix.count(a.name)) {
            error("duplicate action " + a.name, a.span);
            continue;
        }
        auto it = agent_ix.find(a.agent);
        if (it == agent_ix.end()) {
            error("unknown agent " + a.agent, a.span);
            continue;
        }
        action_ix.emplace(a.name, sys.action_names.size());
        sys.action_names.push_back(a.name);
        sys.action_dom.push_back(it->second);
    }
    std::optional<std::size_t> init;
    for (const auto& s : raw.states) {
        if (state_ix.count(s.name)) {
            error("duplicate state " + s.name, s.span);
            continue;
        }
        state_ix.emplace(s.name, sys.state_names.size());
        sys.state_names.push_back(s.name);
        if (s.initial) {
            if (init)
                error("multiple initial states", s.span);
            else
                init = state_ix[s.name];
        }
    }
    if (raw.states.empty())
        error("no states declared", {});
    else if (!init)
        error("no initial state", {});
    if (init) sys.initial = *init;

    const std::size_t S = sys.state_names.size();
    const std::size_t A = sys.action_names.size();
    const std::size_t D = sys.agent_names.size();

    sys.transition.assign(S, std::vector<std::size_t>(A, 0));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t a = 0; a < A; ++a) sys.transition[s][a] = s;
    sys.observation.assign(S, std::vector<std::string>(D, "0"));
    sys.interfering.assign(S, std::vector<AgentSet>(D, AgentSet(D)));
    for (std::size_t s = 0; s < S; ++s)
        for (std::size_t u = 0; u < D; ++u) sys.interfering[s][u].set(u);

    std::vector<std::vector<int>> step_to(S, std::vector<int>(A, -1));
    for (const auto& st : raw.steps) {
        auto fi = state_ix.find(st.from);
        auto ai = action_ix.find(st.action);
        auto ti = state_ix.find(st.to);
        if (fi == state_ix.end()) { error("unknown state " + st.from, st.span); continue; }
        if (ai == action_ix.end()) { error("unknown action " + st.action, st.span); continue; }
        if (ti == state_ix.end()) { error("unknown state " + st.to, st.span); continue; }
        int& cur = step_to[fi->second][ai->second];
        if (cur < 0) {
            cur = static_cast<int>(ti->second);
            sys.transition[fi->second][ai->second] = ti->second;
        } else if (cur == static_cast<int>(ti->second)) {
            warn("duplicate step " + st.from + " " + st.action, st.span);
        } else {
            error("conflicting step for " + st.from + " " + st.action, st.span);
        }
    }

    std::vector<std::vector<char>> obs_declared(S, std::vector<char>(D, 0));
    for (const auto& ob : raw.observations) {
        auto si = state_ix.find(ob.state);
        auto ui = agent_ix.find(ob.agent);
        if (si == state_ix.end()) { error("unknown state " + ob.state, ob.span); continue; }
        if (ui == agent_ix.end()) { error("unknown agent " + ob.agent, ob.span); continue; }
        std::string& cur = sys.observation[si->second][ui->second];
        if (!obs_declared[si->second][ui->second]) {
            obs_declared[si->second][ui->second] = 1;
            cur = ob.label;
        } else if (cur == ob.label) {
            warn("duplicate obs " + ob.state + " " + ob.agent, ob.span);
        } else {
            error("conflicting obs for " + ob.state + " " + ob.agent, ob.span);
        }
    }

    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen_edges;
    for (const auto& e : raw.edges) {
        auto si = state_ix.find(e.state);
        auto vi = agent_ix.find(e.source);
        auto ui = agent_ix.find(e.target);
        if (si == state_ix.end()) { error("unknown state " + e.state, e.span); continue; }
        if (vi == agent_ix.end()) { error("unknown agent " + e.source, e.span); continue; }
        if (ui == agent_ix.end()) { error("unknown agent " + e.target, e.span); continue; }
        if (!seen_edges.insert({si->second, vi->second, ui->second}).second) {
            warn("duplicate edge " + e.state + " " + e.source + " " + e.target, e.span);
            continue;
        }
        sys.interfering[si->second][ui->second].set(vi->second);
    }

    if (!ok) return std::nullopt;

    std::vector<char> reachable(S, 0);
    std::vector<std::size_t> stack{sys.initial};
    reachable[sys.initial] = 1;
    while (!stack.empty()) {
        std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t a = 0; a < A; ++a) {
            std::size_t t = sys.transition[s][a];
            if (!reachable[t]) {
                reachable[t] = 1;
                stack.push_back(t);
            }
        }
    }
    if (std::find(reachable.begin(), reachable.end(), 0) != reachable.end()) {
        std::string removed;
        std::vector<std::size_t> remap(S, 0);
        System trimmed;
        trimmed.agent_names = sys.agent_names;
        trimmed.action_names = sys.action_names;
        trimmed.action_dom = sys.action_dom;
        for (std::size_t s = 0; s < S; ++s) {
            if (!reachable[s]) {
                if (!removed.empty()) removed += ", ";
                removed += sys.state_names[s];
                continue;
            }
            remap[s] = trimmed.state_names.size();
            trimmed.state_names.push_back(sys.state_names[s]);
            trimmed.transition.push_back(std::move(sys.transition[s]));
            trimmed.observation.push_back(std::move(sys.observation[s]));
            trimmed.interfering.push_back(std::move(sys.interfering[s]));
        }
        for (auto& row : trimmed.transition)
            for (auto& t : row) t = remap[t];
        trimmed.initial = remap[sys.initial];
        warn("removed unreachable states: " + removed, {});
        return trimmed;
    }

    return sys;
}

SystemBuilder& SystemBuilder::agent(std::string name) {
    raw_.agents.push_back({std::move(name), {}});
    return *this;
}
SystemBuilder& SystemBuilder::agents(std::initializer_list<const char*> names) {
    for (const char* n : names) agent(n);
    return *this;
}
SystemBuilder& SystemBuilder::action(std::string name, std::string agent) {
    raw_.actions.push_back({std::move(name), std::move(agent), {}});
    return *this;
}
SystemBuilder& SystemBuilder::state(std::string name, bool initial) {
    raw_.states.push_back({std::move(name), initial, {}});
    return *this;
}
SystemBuilder& SystemBuilder::step(std::string from, std::string action, std::string to) {
    raw_.steps.push_back({std::move(from), std::move(action), std::move(to), {}});
    return *this;
}
SystemBuilder& SystemBuilder::obs(std::string state, std::string agent, std::string label) {
    raw_.observations.push_back({std::move(state), std::move(agent), std::move(label), {}});
    return *this;
}
SystemBuilder& SystemBuilder::edge(std::string state, std::string source, std::string target) {
    raw_.edges.push_back({std::move(state), std::move(source), std::move(target), {}});
    return *this;
}

System SystemBuilder::build() const {
    std::vector<Diagnostic> diags;
    auto sys = validate(raw_, diags);
    if (!sys) {
        for (const auto& d : diags)
            if (d.is_error) throw std::invalid_argument("invalid system: " + d.message);
        throw std::invalid_argument("invalid system");
    }
    return *std::move(sys);
}

std::string render_alpha(const System& sys, const ActionSeq& alpha) {
    std::string r;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (i) r += ' ';
        r += sys.action_names[alpha[i]];
    }
    return r;
}

std::string render_agent_set(const System& sys, const AgentSet& set) {
    std::string r = "{";
    bool first = true;
    set.for_each([&](std::size_t v) {
        if (!first) r += ", ";
        first = false;
        r += sys.agent_names[v];
    });
    return r + "}";
}

std::string render_witness(const System& sys, const Witness& w) {
    std::string a = render_alpha(sys, w.alpha);
    std::string r = w.property + " violated for agent " + sys.agent_names[w.agent] +
                    ": at state " + sys.state_names[w.state] + ", hidden action " +
                    sys.action_names[w.action];
    if (a.empty())
        r += " changes the observation immediately: ";
    else
        r += " followed by \"" + a + "\" changes the observation: ";
    r += w.obs_with + " with vs " + w.obs_without + " without";
    return r;
}

std::string render_uniform_witness(const System& sys, const UniformWitness& w) {
    return "agent " + sys.agent_names[w.agent] + " cannot distinguish states " +
           sys.state_names[w.state_a] + " and " + sys.state_names[w.state_b] +
           " but its interfering sets differ: " + render_agent_set(sys, w.set_a) +
           " vs " + render_agent_set(sys, w.set_b);
}

}  // namespace nipol
