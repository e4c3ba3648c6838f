#include "nipol/specio.hpp"

#include <cstdio>
#include <map>

namespace nipol {

namespace {

struct Token {
    std::string text;
    int col_begin = 0;
    int col_end = 0;
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '#') ++j;
        toks.push_back({std::string(line.substr(i, j - i)),
                        static_cast<int>(i + 1), static_cast<int>(j)});
        i = j;
    }
    return toks;
}

}  // namespace

std::optional<System> parse(std::string_view text, std::vector<Diagnostic>& diags) {
    RawSystem raw;
    bool ok = true;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                     ? text.size() - pos
                                                     : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        auto toks = tokenize(line);
        if (toks.empty()) continue;
        SourceSpan span{lineno, toks.front().col_begin, toks.back().col_end};
        auto usage = [&](const char* expected) {
            diags.push_back({true, std::string("expected: ") + expected, span});
            ok = false;
        };
        const std::string& kw = toks[0].text;
        if (kw == "agents") {
            if (toks.size() < 2) { usage("agents NAME+"); continue; }
            for (std::size_t i = 1; i < toks.size(); ++i)
                raw.agents.push_back({toks[i].text,
                                      {lineno, toks[i].col_begin, toks[i].col_end}});
        } else if (kw == "action") {
            if (toks.size() != 3) { usage("action NAME AGENT"); continue; }
            raw.actions.push_back({toks[1].text, toks[2].text, span});
        } else if (kw == "state") {
            if (toks.size() == 2) {
                raw.states.push_back({toks[1].text, false, span});
            } else if (toks.size() == 3 && toks[2].text == "init") {
                raw.states.push_back({toks[1].text, true, span});
            } else {
                usage("state NAME [init]");
            }
        } else if (kw == "step") {
            if (toks.size() != 4) { usage("step FROM ACTION TO"); continue; }
            raw.steps.push_back({toks[1].text, toks[2].text, toks[3].text, span});
        } else if (kw == "obs") {
            if (toks.size() != 4) { usage("obs STATE AGENT LABEL"); continue; }
            raw.observations.push_back({toks[1].text, toks[2].text, toks[3].text, span});
        } else if (kw == "edge") {
            if (toks.size() != 4) { usage("edge STATE SOURCE TARGET"); continue; }
            raw.edges.push_back({toks[1].text, toks[2].text, toks[3].text, span});
        } else {
            diags.push_back({true, "unknown directive " + kw,
                             {lineno, toks[0].col_begin, toks[0].col_end}});
            ok = false;
        }
    }
    if (!ok) return std::nullopt;
    return validate(raw, diags);
}

std::string serialize(const System& sys) {
    std::string out;
    if (!sys.agent_names.empty()) {
        out += "agents";
        for (const auto& n : sys.agent_names) {
            out += ' ';
            out += n;
        }
        out += '\n';
    }
    for (std::size_t a = 0; a < sys.n_actions(); ++a)
        out += "action " + sys.action_names[a] + ' ' +
               sys.agent_names[sys.action_dom[a]] + '\n';
    for (std::size_t s = 0; s < sys.n_states(); ++s) {
        out += "state " + sys.state_names[s];
        if (s == sys.initial) out += " init";
        out += '\n';
    }
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t a = 0; a < sys.n_actions(); ++a)
            if (sys.transition[s][a] != s)
                out += "step " + sys.state_names[s] + ' ' + sys.action_names[a] +
                       ' ' + sys.state_names[sys.transition[s][a]] + '\n';
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t u = 0; u < sys.n_agents(); ++u)
            if (sys.observation[s][u] != "0")
                out += "obs " + sys.state_names[s] + ' ' + sys.agent_names[u] +
                       ' ' + sys.observation[s][u] + '\n';
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t v = 0; v < sys.n_agents(); ++v)
            for (std::size_t u = 0; u < sys.n_agents(); ++u)
                if (v != u && sys.interferes(v, u, s))
                    out += "edge " + sys.state_names[s] + ' ' + sys.agent_names[v] +
                           ' ' + sys.agent_names[u] + '\n';
    return out;
}

namespace {

std::string html_escape(const std::string& s) {
    std::string r;
    for (char c : s) {
        switch (c) {
            case '&': r += "&amp;"; break;
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            default: r += c;
        }
    }
    return r;
}

}  // namespace

std::string to_dot(const System& sys, const std::vector<PolicyEdge>& faded) {
    auto is_faded = [&](std::size_t s, std::size_t v, std::size_t u) {
        for (const auto& e : faded)
            if (e.state == s && e.source == v && e.target == u) return true;
        return false;
    };

    std::string out = "digraph system {\n  rankdir=LR;\n  node [shape=plain];\n";
    for (std::size_t s = 0; s < sys.n_states(); ++s) {
        out += "  s" + std::to_string(s) +
               " [label=<<TABLE BORDER=\"1\" CELLBORDER=\"0\" CELLSPACING=\"0\""
               " CELLPADDING=\"4\" STYLE=\"ROUNDED\">";
        out += "<TR><TD><B>" + html_escape(sys.state_names[s]) + "</B>" +
               (s == sys.initial ? " (init)" : "") + "</TD></TR>";
        for (std::size_t u = 0; u < sys.n_agents(); ++u)
            out += "<TR><TD>obs " + html_escape(sys.agent_names[u]) + ": " +
                   html_escape(sys.observation[s][u]) + "</TD></TR>";
        for (std::size_t v = 0; v < sys.n_agents(); ++v)
            for (std::size_t u = 0; u < sys.n_agents(); ++u) {
                if (v == u || !sys.interferes(v, u, s)) continue;
                std::string row = html_escape(sys.agent_names[v]) + " -&gt; " +
                                  html_escape(sys.agent_names[u]);
                if (is_faded(s, v, u))
                    row = "<FONT COLOR=\"gray50\"><I>" + row + " (useless)</I></FONT>";
                out += "<TR><TD>" + row + "</TD></TR>";
            }
        out += "</TABLE>>];\n";
    }

    std::map<std::pair<std::size_t, std::size_t>, std::string> merged;
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t a = 0; a < sys.n_actions(); ++a) {
            std::size_t t = sys.transition[s][a];
            if (t == s) continue;
            std::string& label = merged[{s, t}];
            if (!label.empty()) label += ", ";
            label += sys.action_names[a];
        }
    for (const auto& [key, label] : merged)
        out += "  s" + std::to_string(key.first) + " -> s" + std::to_string(key.second) +
               " [label=\"" + label + "\"];\n";
    out += "}\n";
    return out;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

}  // namespace nipol
