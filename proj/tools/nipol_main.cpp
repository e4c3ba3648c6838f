#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nipol/core.hpp"
#include "nipol/intransitive.hpp"
#include "nipol/oracle.hpp"
#include "nipol/reduction.hpp"
#include "nipol/specio.hpp"
#include "nipol/transitive.hpp"

using json = nlohmann::ordered_json;
using namespace nipol;

namespace {

constexpr const char* kVersion = "1.0.0";

int exit_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SubsetGuardExceeded:
        case ErrorKind::BudgetExceeded:
            return 3;
        default:
            return 2;
    }
}

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        return std::nullopt;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_diagnostics(const std::string& path, const std::vector<Diagnostic>& diags) {
    std::size_t shown = 0;
    for (const auto& d : diags) {
        if (shown == 20) {
            std::cerr << path << ": further diagnostics suppressed\n";
            break;
        }
        std::cerr << path;
        if (d.span.line > 0) std::cerr << ":" << d.span.line << ":" << d.span.col_begin;
        std::cerr << ": " << (d.is_error ? "error" : "warning") << ": " << d.message << "\n";
        ++shown;
    }
}

struct LoadedSystem {
    System sys;
    std::vector<std::string> warnings;
};

std::optional<LoadedSystem> load_system(const std::string& path) {
    auto text = read_file(path);
    if (!text) return std::nullopt;
    std::vector<Diagnostic> diags;
    auto sys = parse(*text, diags);
    print_diagnostics(path, diags);
    if (!sys) return std::nullopt;
    LoadedSystem out{*sys, {}};
    for (const auto& d : diags)
        if (!d.is_error) out.warnings.push_back(d.message);
    return out;
}

json stats_json(const Stats& stats) {
    return json{{"iterations", stats.iterations},
                {"materialized", stats.materialized},
                {"evaluations", stats.evaluations}};
}

json names_json(const System& sys, const AgentSet& set) {
    json arr = json::array();
    set.for_each([&](std::size_t v) { arr.push_back(sys.agent_names[v]); });
    return arr;
}

json witness_json(const System& sys, const Witness& w) {
    return json{{"property", w.property},
                {"agent", sys.agent_names[w.agent]},
                {"state", sys.state_names[w.state]},
                {"action", sys.action_names[w.action]},
                {"alpha", render_alpha(sys, w.alpha)},
                {"obs_with", w.obs_with},
                {"obs_without", w.obs_without},
                {"text", render_witness(sys, w)}};
}

json uniform_witness_json(const System& sys, const UniformWitness& w) {
    return json{{"agent", sys.agent_names[w.agent]},
                {"state_a", sys.state_names[w.state_a]},
                {"state_b", sys.state_names[w.state_b]},
                {"set_a", names_json(sys, w.set_a)},
                {"set_b", names_json(sys, w.set_b)},
                {"text", render_uniform_witness(sys, w)}};
}

json edges_json(const System& sys, const std::vector<PolicyEdge>& edges) {
    json arr = json::array();
    for (const auto& e : edges)
        arr.push_back(json{{"state", sys.state_names[e.state]},
                           {"source", sys.agent_names[e.source]},
                           {"target", sys.agent_names[e.target]}});
    return arr;
}

json partition_json(const System& sys, const StatePartition& p) {
    json arr = json::array();
    for (const auto& cls : p.classes) {
        json names = json::array();
        for (std::size_t s : cls) names.push_back(sys.state_names[s]);
        arr.push_back(names);
    }
    return arr;
}

json report_base(const std::string& command, const std::string& mode,
                 const std::string& input, const System& sys,
                 const std::vector<std::string>& warnings) {
    json r{{"tool", "nipol"}, {"version", kVersion}, {"command", command}};
    if (!mode.empty()) r["mode"] = mode;
    r["input"] = input;
    r["digest"] = fnv1a64_hex(serialize(sys));
    r["warnings"] = warnings;
    return r;
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

int emit_analysis_error(json report, const AnalysisError& err) {
    report["error"] = json{{"kind", to_string(err.kind())}, {"message", err.what()}};
    emit(report);
    std::cerr << "error: " << err.what() << "\n";
    return exit_for(err.kind());
}

void fill_verdict(json& report, const System& sys, const Verdict& v) {
    report["verdict"] = v.holds ? "secure" : "insecure";
    if (v.witness)
        report["witness"] = witness_json(sys, *v.witness);
    else
        report["witness"] = nullptr;
    report["notes"] = v.notes;
    report["stats"] = stats_json(v.stats);
}

std::uint64_t resolve_budget(std::uint64_t flag_value, bool flag_given) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("NIPOL_BUDGET")) {
        char* end = nullptr;
        unsigned long long parsed = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && parsed > 0) return parsed;
        std::cerr << "warning: ignoring invalid NIPOL_BUDGET value '" << env << "'\n";
    }
    return default_oracle_budget;
}

Witness hiding_path_witness(const System& sys, const ActionSeq& path) {
    Witness w;
    w.property = "i-security";
    w.agent = *sys.agent_index("L");
    w.state = sys.initial;
    w.action = *sys.action_index("h");
    w.alpha = path;
    w.obs_with = sys.obs(sys.run(sys.step(sys.initial, w.action), path), w.agent);
    w.obs_without = sys.obs(sys.run(sys.initial, path), w.agent);
    return w;
}

// ---- check ----------------------------------------------------------------

int run_check(const std::string& file, const std::string& mode, bool force) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    json report = report_base("check", mode, file, sys, loaded->warnings);
    try {
        Verdict v;
        if (mode == "t") {
            v = check_t_security(sys);
        } else if (mode == "i") {
            try {
                v = check_i_security(sys);
            } catch (const AnalysisError& err) {
                if (err.kind() != ErrorKind::SubsetGuardExceeded) throw;
                if (force) {
                    std::size_t words = (sys.n_agents() + 63) / 64;
                    double entry = double(sizeof(SubsetFamilyEntry)) + 8.0 * double(words);
                    double sets = std::pow(2.0, double(sys.n_agents()));
                    double cells = double(sys.n_states()) * double(sys.n_states());
                    std::ostringstream est;
                    est << std::fixed << std::setprecision(1)
                        << sets * cells * entry / (1024.0 * 1024.0);
                    std::cerr << "warning: lifting the tracking guard; worst case "
                              << est.str() << " MiB for the relation family\n";
                    v = check_i_security(sys, sys.n_agents());
                } else if (is_reduction_instance(sys)) {
                    HidingPathResult hp = has_hiding_path(sys);
                    v.stats = hp.stats;
                    if (hp.found) {
                        v.holds = false;
                        v.witness = hiding_path_witness(sys, hp.path);
                        v.notes.push_back(
                            "the tracking guard tripped, but the input has the generated "
                            "chain-of-gadgets shape; the hiding-path search found a "
                            "violating run");
                    } else {
                        v.holds = true;
                        v.notes.push_back(
                            "the tracking guard tripped, but the input has the generated "
                            "chain-of-gadgets shape; no hiding path exists, so the system "
                            "is secure");
                    }
                } else {
                    throw;
                }
            }
        } else if (mode == "i-uniform") {
            v = check_i_security_uniform(sys);
        } else {
            v = check_ip_security(sys);
        }
        fill_verdict(report, sys, v);
        emit(report);
        return v.holds ? 0 : 1;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

// ---- oracle ---------------------------------------------------------------

int run_oracle(const std::string& file, const std::string& mode, std::int64_t bound_flag,
               std::uint64_t budget_flag, bool budget_given) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    std::uint64_t budget = resolve_budget(budget_flag, budget_given);
    json report = report_base("oracle", mode, file, sys, loaded->warnings);
    report["budget"] = budget;
    try {
        std::size_t complete = sys.n_states() * sys.n_states();
        std::size_t bound;
        std::vector<std::string> bound_notes;
        if (bound_flag >= 0) {
            bound = static_cast<std::size_t>(bound_flag);
        } else {
            auto feasible = static_cast<std::size_t>(mode == "t"
                                                         ? t_oracle_max_bound(sys, budget)
                                                         : i_oracle_max_bound(sys, budget));
            bound = std::min(complete, feasible);
            if (bound == complete)
                bound_notes.push_back("bound defaulted to " + std::to_string(bound) +
                                      ", which fully decides the property");
            else
                bound_notes.push_back(
                    "bound defaulted to " + std::to_string(bound) +
                    ", the largest the budget allows; a clean run below the complete "
                    "bound " +
                    std::to_string(complete) + " is not a proof");
        }
        report["bound"] = bound;
        Verdict v = mode == "t" ? t_definition_oracle(sys, bound, budget)
                                : i_security_bounded_oracle(sys, bound, budget);
        v.notes.insert(v.notes.begin(), bound_notes.begin(), bound_notes.end());
        fill_verdict(report, sys, v);
        emit(report);
        return v.holds ? 0 : 1;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

// ---- similarity / useless / normalize / uniform ----------------------------

int run_similarity(const std::string& file, const std::string& mode,
                   const std::string& agent) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    auto u = sys.agent_index(agent);
    if (!u) {
        std::cerr << "error: unknown agent " << agent << "\n";
        return 2;
    }
    json report = report_base("similarity", mode, file, sys, loaded->warnings);
    report["agent"] = agent;
    try {
        StatePartition p = mode == "t" ? t_similarity(sys, *u) : i_similarity(sys, *u);
        report["classes"] = p.classes.size();
        report["partition"] = partition_json(sys, p);
        emit(report);
        return 0;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

int run_useless(const std::string& file, const std::string& mode) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    json report = report_base("useless", mode, file, sys, loaded->warnings);
    try {
        auto edges =
            mode == "t" ? find_useless_edges_t(sys) : find_intransitively_useless_edges(sys);
        report["count"] = edges.size();
        report["edges"] = edges_json(sys, edges);
        emit(report);
        return 0;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

std::size_t policy_edge_count(const System& sys) {
    std::size_t n = 0;
    for (std::size_t s = 0; s < sys.n_states(); ++s)
        for (std::size_t u = 0; u < sys.n_agents(); ++u)
            n += sys.interfering_set(u, s).count() - 1;  // reflexive edge does not count
    return n;
}

int run_normalize(const std::string& file, const std::string& mode, const std::string& out) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    json report = report_base("normalize", mode, file, sys, loaded->warnings);
    try {
        System norm = mode == "t" ? normalize_t(sys) : normalize_i(sys);
        report["removed"] = policy_edge_count(sys) - policy_edge_count(norm);
        std::string text = serialize(norm);
        if (!out.empty()) {
            std::ofstream dest(out, std::ios::binary);
            if (!dest) {
                std::cerr << "error: cannot write " << out << "\n";
                return 2;
            }
            dest << text;
            report["output"] = out;
        } else {
            report["system"] = text;
        }
        emit(report);
        return 0;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

int run_uniform(const std::string& file, const std::string& mode) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    json report = report_base("uniform", mode, file, sys, loaded->warnings);
    try {
        UniformVerdict uv = mode == "t" ? is_uniform_t(sys) : is_intransitively_uniform(sys);
        report["verdict"] = uv.uniform ? "uniform" : "not-uniform";
        if (uv.witness)
            report["witness"] = uniform_witness_json(sys, *uv.witness);
        else
            report["witness"] = nullptr;
        report["stats"] = stats_json(uv.stats);
        emit(report);
        return uv.uniform ? 0 : 1;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

// ---- gen-3col / hiding-path / export-dot ------------------------------------

int run_gen3col(const std::string& file, const std::string& out) {
    auto text = read_file(file);
    if (!text) return 2;
    std::vector<Diagnostic> diags;
    auto g = parse_graph(*text, diags);
    print_diagnostics(file, diags);
    if (!g) return 2;
    System sys = generate_3col_system(*g);
    json report{{"tool", "nipol"}, {"version", kVersion}, {"command", "gen-3col"}};
    report["input"] = file;
    report["vertices"] = g->vertices.size();
    report["edges"] = g->edges.size();
    report["agents"] = sys.n_agents();
    report["actions"] = sys.n_actions();
    report["states"] = sys.n_states();
    report["digest"] = fnv1a64_hex(serialize(sys));
    json warnings = json::array();
    for (const auto& d : diags)
        if (!d.is_error) warnings.push_back(d.message);
    report["warnings"] = warnings;
    std::string body = serialize(sys);
    if (!out.empty()) {
        std::ofstream dest(out, std::ios::binary);
        if (!dest) {
            std::cerr << "error: cannot write " << out << "\n";
            return 2;
        }
        dest << body;
        report["output"] = out;
    } else {
        report["system"] = body;
    }
    emit(report);
    return 0;
}

int run_hiding_path(const std::string& file) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    json report = report_base("hiding-path", "", file, sys, loaded->warnings);
    try {
        HidingPathResult hp = has_hiding_path(sys);
        report["found"] = hp.found;
        if (hp.found) {
            report["path"] = render_alpha(sys, hp.path);
            json coloring = json::object();
            if (auto g = decode_reduction_instance(sys))
                for (std::size_t v = 0; v < g->vertices.size() && v < hp.coloring.size(); ++v)
                    coloring[g->vertices[v]] = hp.coloring[v];
            report["coloring"] = coloring;
            report["witness"] = witness_json(sys, hiding_path_witness(sys, hp.path));
        } else {
            report["path"] = nullptr;
            report["coloring"] = nullptr;
            report["witness"] = nullptr;
            report["notes"] =
                json::array({"no run can keep the initial hidden action unknown to L, so "
                             "the encoded graph is not 3-colorable"});
        }
        report["stats"] = stats_json(hp.stats);
        emit(report);
        return hp.found ? 1 : 0;
    } catch (const AnalysisError& err) {
        return emit_analysis_error(report, err);
    }
}

int run_export_dot(const std::string& file, const std::string& annotate) {
    auto loaded = load_system(file);
    if (!loaded) return 2;
    const System& sys = loaded->sys;
    try {
        std::vector<PolicyEdge> faded;
        if (annotate == "useless-t")
            faded = find_useless_edges_t(sys);
        else if (annotate == "useless-i")
            faded = find_intransitively_useless_edges(sys);
        std::cout << to_dot(sys, faded);
        return 0;
    } catch (const AnalysisError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_for(err.kind());
    }
}

// ---- crosscheck -------------------------------------------------------------

struct CrosscheckTally {
    std::uint64_t checks = 0;
    std::vector<std::string> disagreements;            // "seed N: name"
    std::optional<std::uint64_t> uniform_with_useless; // seed numbers
    std::optional<std::uint64_t> nonuniform_without_useless;
};

// A probe that explores runs up to `bound` only proves violations; a clean
// probe result refutes the exact checker only when the checker's own witness
// fits inside the probe's horizon.
bool bounded_agreement(const Verdict& exact, const Verdict& probe, std::size_t horizon) {
    if (!probe.holds && exact.holds) return false;
    if (!exact.holds && probe.holds && exact.witness &&
        exact.witness->alpha.size() <= horizon)
        return false;
    return true;
}

void crosscheck_seed(std::uint64_t seed, const GeneratorConfig& shape, std::size_t bound,
                     std::uint64_t budget, CrosscheckTally& tally) {
    GeneratorConfig cfg = shape;
    cfg.seed = seed;
    System sys = generate_random_system(cfg);
    auto flag = [&](const char* name) {
        tally.disagreements.push_back("seed " + std::to_string(seed) + ": " + name);
    };
    auto probe_bound = [&](std::size_t want, std::size_t feasible) {
        return std::min(want, feasible);
    };

    Verdict exact_t = check_t_security(sys);
    Verdict pair = t_security_pair_oracle(sys);
    ++tally.checks;
    if (exact_t.holds != pair.holds ||
        (!exact_t.holds && exact_t.witness && pair.witness &&
         exact_t.witness->alpha.size() != pair.witness->alpha.size()))
        flag("t-pair-oracle");

    std::size_t bt = probe_bound(bound, t_oracle_max_bound(sys, budget));
    ++tally.checks;
    if (!bounded_agreement(exact_t, t_definition_oracle(sys, bt, budget), bt))
        flag("t-definition-oracle");

    std::size_t bp = probe_bound(bound + 1, max_feasible_bound(
                                                sys.n_actions(),
                                                std::uint64_t(sys.n_states()) *
                                                    std::max<std::size_t>(sys.n_agents(), 1),
                                                budget));
    ++tally.checks;
    if (!bounded_agreement(exact_t, purge_equality_oracle(sys, bp, budget),
                           bp > 0 ? bp - 1 : 0))
        flag("purge-equality-oracle");

    Verdict exact_i = check_i_security(sys, sys.n_agents());
    std::size_t bi = probe_bound(bound, i_oracle_max_bound(sys, budget));
    ++tally.checks;
    if (!bounded_agreement(exact_i, i_security_bounded_oracle(sys, bi, budget), bi))
        flag("i-bounded-oracle");

    ++tally.checks;
    if (!bounded_agreement(exact_i, ipurge_equality_oracle(sys, bp, budget),
                           bp > 0 ? bp - 1 : 0))
        flag("ipurge-equality-oracle");

    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ull);
    bool algebra_ok = true;
    for (int i = 0; i < 20 && algebra_ok; ++i) {
        std::size_t u = gen() % sys.n_agents();
        std::size_t s = gen() % sys.n_states();
        ActionSeq a, b;
        for (std::size_t k = gen() % 5; k > 0; --k) a.push_back(gen() % sys.n_actions());
        for (std::size_t k = gen() % 5; k > 0; --k) b.push_back(gen() % sys.n_actions());
        ActionSeq pa = purge(sys, a, u, s);
        if (purge(sys, pa, u, s) != pa) algebra_ok = false;
        ActionSeq ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        ActionSeq expect = pa;
        ActionSeq pb = purge(sys, b, u, sys.run(s, pa));
        expect.insert(expect.end(), pb.begin(), pb.end());
        if (purge(sys, ab, u, s) != expect) algebra_ok = false;
    }
    ++tally.checks;
    if (!algebra_ok) flag("purge-algebra");

    ++tally.checks;
    if (check_t_security(normalize_t(sys)).holds != exact_t.holds) flag("normalize-t");
    ++tally.checks;
    if (check_i_security(normalize_i(sys, sys.n_agents()), sys.n_agents()).holds !=
        exact_i.holds)
        flag("normalize-i");

    std::vector<Diagnostic> diags;
    auto round = parse(serialize(sys), diags);
    ++tally.checks;
    if (!round || !(*round == sys)) flag("round-trip");

    if (is_uniform_t(sys).uniform) {
        ++tally.checks;
        if (check_t_from_initial(sys).holds != exact_t.holds) flag("t-from-initial");
    }

    bool iuniform = is_intransitively_uniform(sys).uniform;
    if (iuniform) {
        ++tally.checks;
        if (check_i_security_uniform(sys).holds != exact_i.holds) flag("i-uniform-check");
        bool leslie_ok = true;
        for (int i = 0; i < 20 && leslie_ok; ++i) {
            std::size_t u = gen() % sys.n_agents();
            std::size_t s = gen() % sys.n_states();
            ActionSeq a;
            for (std::size_t k = gen() % 7; k > 0; --k) a.push_back(gen() % sys.n_actions());
            if (ipurge(sys, a, u, s) != ipurge_leslie(sys, a, u, s)) leslie_ok = false;
        }
        ++tally.checks;
        if (!leslie_ok) flag("ipurge-leslie");
    }

    System global = with_global_policy(sys);
    ++tally.checks;
    if (check_ip_security(global).holds != check_i_security(global, sys.n_agents()).holds)
        flag("ip-vs-i");

    auto useless = find_intransitively_useless_edges(sys, sys.n_agents());
    if (iuniform && !useless.empty() && !tally.uniform_with_useless)
        tally.uniform_with_useless = seed;
    if (!iuniform && useless.empty() && !tally.nonuniform_without_useless)
        tally.nonuniform_without_useless = seed;
}

int run_crosscheck(std::uint64_t seeds, const std::string& shape_text, std::size_t bound,
                   std::uint64_t budget_flag, bool budget_given, unsigned jobs,
                   const std::string& archive_dir) {
    GeneratorConfig shape;
    if (!shape_text.empty()) {
        unsigned s = 0, a = 0, d = 0;
        if (std::sscanf(shape_text.c_str(), "%u,%u,%u", &s, &a, &d) != 3 || s == 0 ||
            a == 0 || d == 0) {
            std::cerr << "error: --shape wants S,A,D with three positive numbers\n";
            return 2;
        }
        shape.max_states = s;
        shape.max_actions = a;
        shape.max_agents = d;
    }
    std::uint64_t budget = resolve_budget(budget_flag, budget_given);
    if (jobs == 0) jobs = 1;

    std::vector<CrosscheckTally> parts(jobs);
    std::vector<std::string> failures(jobs);
    auto worker = [&](unsigned j) {
        try {
            for (std::uint64_t seed = 1 + j; seed <= seeds; seed += jobs)
                crosscheck_seed(seed, shape, bound, budget, parts[j]);
        } catch (const std::exception& e) {
            failures[j] = e.what();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker, j);
        for (auto& t : pool) t.join();
    }
    for (const auto& f : failures)
        if (!f.empty()) {
            std::cerr << "error: " << f << "\n";
            return 2;
        }

    CrosscheckTally total;
    for (auto& p : parts) {
        total.checks += p.checks;
        total.disagreements.insert(total.disagreements.end(), p.disagreements.begin(),
                                   p.disagreements.end());
        auto keep_min = [](std::optional<std::uint64_t>& into,
                           const std::optional<std::uint64_t>& from) {
            if (from && (!into || *from < *into)) into = from;
        };
        keep_min(total.uniform_with_useless, p.uniform_with_useless);
        keep_min(total.nonuniform_without_useless, p.nonuniform_without_useless);
    }
    std::sort(total.disagreements.begin(), total.disagreements.end());

    json report{{"tool", "nipol"}, {"version", kVersion}, {"command", "crosscheck"}};
    report["seeds"] = seeds;
    report["shape"] = json{{"max_states", shape.max_states},
                           {"max_actions", shape.max_actions},
                           {"max_agents", shape.max_agents}};
    report["bound"] = bound;
    report["budget"] = budget;
    report["checks"] = total.checks;
    report["disagreements"] = total.disagreements;

    json open_question = json::object();
    auto archive = [&](const char* label, const std::optional<std::uint64_t>& seed) {
        json entry = json::object();
        entry["found"] = seed.has_value();
        if (seed) {
            entry["seed"] = *seed;
            GeneratorConfig cfg = shape;
            cfg.seed = *seed;
            System sys = generate_random_system(cfg);
            entry["digest"] = fnv1a64_hex(serialize(sys));
            if (!archive_dir.empty()) {
                std::string path = archive_dir + "/" + label + "_seed" +
                                   std::to_string(*seed) + ".nipol";
                std::ofstream dest(path, std::ios::binary);
                if (dest) {
                    dest << serialize(sys);
                    entry["file"] = path;
                } else {
                    std::cerr << "error: cannot write " << path << "\n";
                }
            }
        }
        open_question[label] = entry;
    };
    archive("uniform_with_useless", total.uniform_with_useless);
    archive("nonuniform_without_useless", total.nonuniform_without_useless);
    report["open_question"] = open_question;

    emit(report);
    return total.disagreements.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification toolkit for state-based noninterference with local policies"};
    app.require_subcommand(1);

    std::string file, mode = "t", agent, out, annotate, shape_text, archive_dir;
    bool force = false;
    std::int64_t bound = -1;
    std::uint64_t budget = 0;
    std::uint64_t seeds = 100;
    std::size_t cc_bound = 6;
    unsigned jobs = 1;

    auto* check = app.add_subcommand("check", "decide a security property");
    check->add_option("file", file)->required();
    check->add_option("--mode", mode)
        ->check(CLI::IsMember({"t", "i", "i-uniform", "ip"}))
        ->capture_default_str();
    check->add_flag("--force", force, "lift the subset tracking guard");

    auto* oracle = app.add_subcommand("oracle", "bounded brute-force exploration");
    oracle->add_option("file", file)->required();
    oracle->add_option("--mode", mode)->check(CLI::IsMember({"t", "i"}))->capture_default_str();
    oracle->add_option("--bound", bound, "continuation length bound");
    auto* oracle_budget = oracle->add_option("--budget", budget, "node evaluation budget");

    auto* similarity = app.add_subcommand("similarity", "indistinguishability partition");
    similarity->add_option("file", file)->required();
    similarity->add_option("--mode", mode)->check(CLI::IsMember({"t", "i"}))->capture_default_str();
    similarity->add_option("--agent", agent)->required();

    auto* useless = app.add_subcommand("useless", "list never-exploitable policy edges");
    useless->add_option("file", file)->required();
    useless->add_option("--mode", mode)->check(CLI::IsMember({"t", "i"}))->capture_default_str();

    auto* normalize = app.add_subcommand("normalize", "remove useless policy edges");
    normalize->add_option("file", file)->required();
    normalize->add_option("--mode", mode)->check(CLI::IsMember({"t", "i"}))->capture_default_str();
    normalize->add_option("-o,--output", out, "write the normalized system here");

    auto* uniform = app.add_subcommand("uniform", "check policy uniformity");
    uniform->add_option("file", file)->required();
    uniform->add_option("--mode", mode)->check(CLI::IsMember({"t", "i"}))->capture_default_str();

    auto* crosscheck = app.add_subcommand("crosscheck", "fuzz all characterizations");
    crosscheck->add_option("--seeds", seeds)->capture_default_str();
    crosscheck->add_option("--shape", shape_text, "generator limits as S,A,D");
    crosscheck->add_option("--bound", cc_bound, "probe exploration bound")->capture_default_str();
    auto* cc_budget = crosscheck->add_option("--budget", budget, "node evaluation budget");
    crosscheck->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    crosscheck->add_option("--archive-dir", archive_dir,
                           "write open-question witness systems here");

    auto* gen3col = app.add_subcommand("gen-3col", "build a hardness instance from a graph");
    gen3col->add_option("file", file)->required();
    gen3col->add_option("-o,--output", out, "write the system here");

    auto* hiding = app.add_subcommand("hiding-path", "search a hardness instance");
    hiding->add_option("file", file)->required();

    auto* exportdot = app.add_subcommand("export-dot", "emit Graphviz text");
    exportdot->add_option("file", file)->required();
    exportdot->add_option("--annotate", annotate)
        ->check(CLI::IsMember({"useless-t", "useless-i"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (check->parsed()) return run_check(file, mode, force);
    if (oracle->parsed())
        return run_oracle(file, mode, bound, budget, oracle_budget->count() > 0);
    if (similarity->parsed()) return run_similarity(file, mode, agent);
    if (useless->parsed()) return run_useless(file, mode);
    if (normalize->parsed()) return run_normalize(file, mode, out);
    if (uniform->parsed()) return run_uniform(file, mode);
    if (crosscheck->parsed())
        return run_crosscheck(seeds, shape_text, cc_bound, budget, cc_budget->count() > 0,
                              jobs, archive_dir);
    if (gen3col->parsed()) return run_gen3col(file, out);
    if (hiding->parsed()) return run_hiding_path(file);
    if (exportdot->parsed()) return run_export_dot(file, annotate);
    return 2;
}
