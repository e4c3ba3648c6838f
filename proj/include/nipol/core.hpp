#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nipol {

// Small dynamic bitset over agent indices. Word-packed; all operations keep
// bits above size() clear so default equality is structural.
class AgentSet {
public:
    AgentSet() = default;
    explicit AgentSet(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i) {
        words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
    void reset(std::size_t i) {
        words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool none() const {
        for (auto w : words_) if (w) return false;
        return true;
    }
    bool any() const { return !none(); }

    bool subset_of(const AgentSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    bool intersects(const AgentSet& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }

    AgentSet& operator|=(const AgentSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    AgentSet& operator&=(const AgentSet& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    friend AgentSet operator|(AgentSet a, const AgentSet& b) { a |= b; return a; }
    friend AgentSet operator&(AgentSet a, const AgentSet& b) { a &= b; return a; }

    // Complement within size(); tail bits stay clear.
    AgentSet complement() const {
        AgentSet r(nbits_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
        if (nbits_ & 63)
            r.words_.back() &= (std::uint64_t{1} << (nbits_ & 63)) - 1;
        return r;
    }

    bool operator==(const AgentSet&) const = default;

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t wi = 0; wi < words_.size(); ++wi) {
            std::uint64_t w = words_[wi];
            while (w) {
                auto b = static_cast<std::size_t>(std::countr_zero(w));
                f(wi * 64 + b);
                w &= w - 1;
            }
        }
    }
    std::vector<std::size_t> elements() const {
        std::vector<std::size_t> r;
        for_each([&](std::size_t i) { r.push_back(i); });
        return r;
    }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

enum class ErrorKind {
    NonUniformPolicy,
    NotGlobalPolicy,
    SubsetGuardExceeded,
    BudgetExceeded,
    NotAReductionInstance,
    TooLarge,
};

const char* to_string(ErrorKind kind);

class AnalysisError : public std::runtime_error {
public:
    AnalysisError(ErrorKind kind, std::string msg)
        : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// 1-based source position; line 0 means "no position" (programmatic input).
struct SourceSpan {
    int line = 0;
    int col_begin = 0;
    int col_end = 0;
    bool operator==(const SourceSpan&) const = default;
};

struct Diagnostic {
    bool is_error = false;
    std::string message;
    SourceSpan span;
};

// Declaration-order description of a system before validation. Produced by
// the parser or SystemBuilder; validate() turns it into a System.
struct RawAgent {
    std::string name;
    SourceSpan span;
};
struct RawAction {
    std::string name;
    std::string agent;
    SourceSpan span;
};
struct RawState {
    std::string name;
    bool initial = false;
    SourceSpan span;
};
struct RawStep {
    std::string from, action, to;
    SourceSpan span;
};
struct RawObs {
    std::string state, agent, label;
    SourceSpan span;
};
struct RawEdge {
    std::string state, source, target;
    SourceSpan span;
};

struct RawSystem {
    std::vector<RawAgent> agents;
    std::vector<RawAction> actions;
    std::vector<RawState> states;
    std::vector<RawStep> steps;
    std::vector<RawObs> observations;
    std::vector<RawEdge> edges;
};

using ActionSeq = std::vector<std::size_t>;

// Deterministic finite-state system with one observation per (state, agent)
// and one local policy per state. Indices are positions in the name tables;
// all iteration follows declaration order. Instances are built via validate()
// or SystemBuilder and treated as immutable afterwards (analyses that change
// the policy copy the system first).
struct System {
    std::vector<std::string> agent_names;
    std::vector<std::string> action_names;
    std::vector<std::string> state_names;
    std::vector<std::size_t> action_dom;                // [action] -> agent
    std::size_t initial = 0;
    std::vector<std::vector<std::size_t>> transition;   // [state][action] -> state
    std::vector<std::vector<std::string>> observation;  // [state][agent] -> label
    std::vector<std::vector<AgentSet>> interfering;     // [state][agent u] -> {v | v flows-to u at s}

    std::size_t n_agents() const { return agent_names.size(); }
    std::size_t n_actions() const { return action_names.size(); }
    std::size_t n_states() const { return state_names.size(); }

    std::size_t dom(std::size_t a) const { return action_dom[a]; }
    std::size_t step(std::size_t s, std::size_t a) const { return transition[s][a]; }
    const std::string& obs(std::size_t s, std::size_t u) const { return observation[s][u]; }

    // v may interfere with u in s
    bool interferes(std::size_t v, std::size_t u, std::size_t s) const {
        return interfering[s][u].test(v);
    }
    const AgentSet& interfering_set(std::size_t u, std::size_t s) const {
        return interfering[s][u];
    }

    std::size_t run(std::size_t s, std::span<const std::size_t> alpha) const {
        for (auto a : alpha) s = transition[s][a];
        return s;
    }

    std::optional<std::size_t> agent_index(std::string_view name) const;
    std::optional<std::size_t> action_index(std::string_view name) const;
    std::optional<std::size_t> state_index(std::string_view name) const;

    bool has_global_policy() const;

    bool operator==(const System&) const = default;
};

// Security-violation witness: dom(a) may not flow to `agent` at `state`, yet
// obs_agent(state . a alpha) != obs_agent(state . alpha).
struct Witness {
    std::string property;  // "t-security", "i-security", ...
    std::size_t agent = 0;
    std::size_t state = 0;
    std::size_t action = 0;
    ActionSeq alpha;
    std::string obs_with;     // obs at state . a alpha
    std::string obs_without;  // obs at state . alpha
    bool operator==(const Witness&) const = default;
};

// One local-policy edge: source flows-to target at state.
struct PolicyEdge {
    std::size_t state = 0;
    std::size_t source = 0;
    std::size_t target = 0;
    auto operator<=>(const PolicyEdge&) const = default;
};

// Uniformity violation: two states an agent cannot tell apart carry
// different interfering sets for it.
struct UniformWitness {
    std::size_t agent = 0;
    std::size_t state_a = 0;
    std::size_t state_b = 0;
    AgentSet set_a, set_b;
    bool operator==(const UniformWitness&) const = default;
};

struct Stats {
    std::uint64_t iterations = 0;    // worklist / fixpoint steps
    std::uint64_t materialized = 0;  // pairs / entries stored
    std::uint64_t evaluations = 0;   // observation probes (oracles)
};

// Partition of all states for one agent. Classes are listed by their least
// member and hold members in ascending order, so equal partitions compare
// equal structurally.
struct StatePartition {
    std::size_t agent = 0;
    std::vector<std::size_t> class_of;              // [state] -> class index
    std::vector<std::vector<std::size_t>> classes;  // [class] -> members
    bool same_blocks(const StatePartition& o) const { return classes == o.classes; }
};

struct Verdict {
    bool holds = true;
    std::optional<Witness> witness;
    Stats stats;
    std::vector<std::string> notes;
};

struct UniformVerdict {
    bool uniform = true;
    std::optional<UniformWitness> witness;
    Stats stats;
};

// Checks a raw description and builds the System: resolves names, rejects
// duplicates/conflicts, requires exactly one initial state, fills defaults
// (self-loop steps, "0" observations, reflexive-only policies) and drops
// unreachable states with a warning. Returns nothing if any error was pushed.
std::optional<System> validate(const RawSystem& raw, std::vector<Diagnostic>& diags);

// Convenience wrapper over RawSystem + validate for programmatic fixtures.
// build() throws std::invalid_argument on the first validation error.
class SystemBuilder {
public:
    SystemBuilder& agent(std::string name);
    SystemBuilder& agents(std::initializer_list<const char*> names);
    SystemBuilder& action(std::string name, std::string agent);
    SystemBuilder& state(std::string name, bool initial = false);
    SystemBuilder& step(std::string from, std::string action, std::string to);
    SystemBuilder& obs(std::string state, std::string agent, std::string label);
    SystemBuilder& edge(std::string state, std::string source, std::string target);
    System build() const;

private:
    RawSystem raw_;
};

// Rendering helpers shared by tests and the CLI.
std::string render_alpha(const System& sys, const ActionSeq& alpha);
std::string render_agent_set(const System& sys, const AgentSet& set);
std::string render_witness(const System& sys, const Witness& w);
std::string render_uniform_witness(const System& sys, const UniformWitness& w);

}  // namespace nipol
