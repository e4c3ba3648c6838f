#include "nipol/reduction.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "nipol/intransitive.hpp"

using namespace nipol;

namespace {

Graph load_graph(const std::string& name) {
    std::vector<Diagnostic> diags;
    auto g = parse_graph(fixtures::read_file(fixtures::fixture_path(name)), diags);
    REQUIRE(g.has_value());
    return *g;
}

bool proper(const Graph& g, const std::vector<std::size_t>& coloring) {
    if (coloring.size() != g.vertices.size()) return false;
    for (auto [a, b] : g.edges) {
        if (coloring[a] > 2 || coloring[b] > 2) return false;
        if (coloring[a] == coloring[b]) return false;
    }
    return true;
}

Graph random_graph(std::mt19937_64& gen, std::size_t max_vertices) {
    Graph g;
    std::size_t n = 1 + gen() % max_vertices;
    for (std::size_t i = 0; i < n; ++i) g.vertices.push_back("v" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (gen() % 100 < 45) g.edges.emplace_back(i, j);
    return g;
}

}  // namespace

TEST_CASE("graph parsing accepts the fixture files") {
    Graph k3 = load_graph("k3.graph");
    CHECK(k3.vertices == std::vector<std::string>{"a", "b", "c"});
    CHECK(k3.edges.size() == 3);

    Graph k4 = load_graph("k4.graph");
    CHECK(k4.vertices.size() == 4);
    CHECK(k4.edges.size() == 6);

    Graph v1 = load_graph("v1.graph");
    CHECK(v1.vertices.size() == 1);
    CHECK(v1.edges.empty());
}

TEST_CASE("graph parsing reports malformed lines") {
    std::vector<Diagnostic> diags;
    auto g = parse_graph(
        "vertex\n"
        "vertex a\n"
        "vertex a\n"
        "edge a\n"
        "edge a zz\n"
        "edge a a\n"
        "mystery\n",
        diags);
    CHECK_FALSE(g.has_value());
    REQUIRE(diags.size() == 6);
    CHECK(diags[0].message == "expected: vertex NAME");
    CHECK(diags[1].message == "duplicate vertex 'a'");
    CHECK(diags[2].message == "expected: edge NAME NAME");
    CHECK(diags[3].message == "edge references undeclared vertex 'zz'");
    CHECK(diags[4].message == "self-loop on vertex 'a'");
    CHECK(diags[5].message == "unknown directive 'mystery'");
    CHECK(diags[1].span.line == 3);
}

TEST_CASE("graph parsing stores a repeated edge once with a warning") {
    std::vector<Diagnostic> diags;
    auto g = parse_graph(
        "# comment line\r\n"
        "vertex a\r\n"
        "vertex b  # trailing\n"
        "edge a b\n"
        "edge b a\n",
        diags);
    REQUIRE(g.has_value());
    CHECK(g->edges.size() == 1);
    REQUIRE(diags.size() == 1);
    CHECK_FALSE(diags[0].is_error);
    CHECK(diags[0].message == "duplicate edge 'b a'");
}

TEST_CASE("generated systems have the arithmetic shape") {
    Graph empty;
    System s0 = generate_3col_system(empty);
    CHECK(s0.n_states() == 4);
    CHECK(s0.n_agents() == 2);
    CHECK(s0.n_actions() == 2);

    System v1 = generate_3col_system(load_graph("v1.graph"));
    CHECK(v1.n_states() == 12);
    CHECK(v1.n_agents() == 6);
    CHECK(v1.n_actions() == 8);

    System k3 = generate_3col_system(load_graph("k3.graph"));
    CHECK(k3.n_states() == 178);
    CHECK(k3.n_agents() == 14);
    CHECK(k3.n_actions() == 20);

    System k4 = generate_3col_system(load_graph("k4.graph"));
    CHECK(k4.n_states() == 336);
    CHECK(k4.n_agents() == 18);
    CHECK(k4.n_actions() == 26);

    // Only the far end of the front chain shows L anything.
    std::size_t L = *k3.agent_index("L");
    CHECK(k3.obs(*k3.state_index("p_last"), L) == "1");
    for (std::size_t s = 0; s < k3.n_states(); ++s)
        if (s != *k3.state_index("p_last")) CHECK(k3.obs(s, L) == "0");
}

TEST_CASE("instance recognition accepts generator output only") {
    for (const char* name : {"v1.graph", "k3.graph", "k4.graph"}) {
        System sys = generate_3col_system(load_graph(name));
        CAPTURE(name);
        CHECK(is_reduction_instance(sys));
    }
    CHECK_FALSE(is_reduction_instance(fixtures::fig1()));
    CHECK_FALSE(is_reduction_instance(fixtures::global_dg()));

    System tweaked = generate_3col_system(load_graph("v1.graph"));
    tweaked.observation[*tweaked.state_index("last")][*tweaked.agent_index("L")] = "1";
    CHECK_FALSE(is_reduction_instance(tweaked));

    try {
        has_hiding_path(fixtures::fig1());
        FAIL("expected a shape error");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == ErrorKind::NotAReductionInstance);
        CHECK(std::string(e.what()) ==
              "the input does not have the generated chain-of-gadgets shape");
    }
}

TEST_CASE("hiding paths exist exactly for colorable graphs") {
    Graph gv1 = load_graph("v1.graph");
    System v1 = generate_3col_system(gv1);
    HidingPathResult rv1 = has_hiding_path(v1);
    CHECK(rv1.found);
    CHECK(proper(gv1, rv1.coloring));

    Graph gk3 = load_graph("k3.graph");
    System k3 = generate_3col_system(gk3);
    HidingPathResult rk3 = has_hiding_path(k3);
    CHECK(rk3.found);
    CHECK(proper(gk3, rk3.coloring));
    CHECK(std::set<std::size_t>(rk3.coloring.begin(), rk3.coloring.end()).size() == 3);

    // The same action sequence drives the front chain to its observer end,
    // so the hidden initial action flips what L eventually sees.
    CHECK(k3.run(*k3.state_index("dummy"), rk3.path) == *k3.state_index("last"));
    CHECK(k3.run(k3.initial, rk3.path) == *k3.state_index("p_last"));

    System k4 = generate_3col_system(load_graph("k4.graph"));
    CHECK_FALSE(has_hiding_path(k4).found);
}

TEST_CASE("backtracking coloring agrees on the fixtures") {
    Graph gv1 = load_graph("v1.graph");
    auto cv1 = brute_force_3coloring(gv1);
    REQUIRE(cv1.has_value());
    CHECK(proper(gv1, *cv1));

    Graph gk3 = load_graph("k3.graph");
    auto ck3 = brute_force_3coloring(gk3);
    REQUIRE(ck3.has_value());
    CHECK(proper(gk3, *ck3));

    CHECK_FALSE(brute_force_3coloring(load_graph("k4.graph")).has_value());

    Graph big;
    for (int i = 0; i < 21; ++i) big.vertices.push_back("v" + std::to_string(i));
    try {
        brute_force_3coloring(big);
        FAIL("expected a size error");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == ErrorKind::TooLarge);
        CHECK(std::string(e.what()) ==
              "brute-force coloring is capped at 20 vertices, got 21");
    }
}

TEST_CASE("hiding-path search matches brute force on random graphs") {
    std::mt19937_64 gen(77);
    for (int i = 0; i < 30; ++i) {
        Graph g = random_graph(gen, 5);
        System sys = generate_3col_system(g);
        REQUIRE(is_reduction_instance(sys));
        HidingPathResult r = has_hiding_path(sys);
        auto direct = brute_force_3coloring(g);
        CAPTURE(i);
        CHECK(r.found == direct.has_value());
        if (r.found) CHECK(proper(g, r.coloring));
    }
}

TEST_CASE("generated systems collapse to insecurity exactly when colorable") {
    // Small instances fit under the default tracking guard, so the relation
    // engine itself can confirm what the hiding path promises.
    Graph one = load_graph("v1.graph");
    System v1 = generate_3col_system(one);
    CHECK_FALSE(check_i_security(v1, 17).holds);

    Graph two;
    two.vertices = {"a", "b"};
    two.edges.emplace_back(0, 1);
    System s2 = generate_3col_system(two);
    CHECK(has_hiding_path(s2).found);
    CHECK_FALSE(check_i_security(s2, 17).holds);
}
