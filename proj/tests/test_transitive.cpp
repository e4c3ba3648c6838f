#include "nipol/transitive.hpp"

#include <random>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "nipol/oracle.hpp"

using namespace nipol;

namespace {

ActionSeq random_alpha(std::mt19937_64& gen, std::size_t n_actions, std::size_t max_len) {
    ActionSeq alpha;
    for (std::size_t k = gen() % (max_len + 1); k > 0; --k)
        alpha.push_back(gen() % n_actions);
    return alpha;
}

}  // namespace

TEST_CASE("purge keeps exactly the currently visible actions") {
    System fig1 = fixtures::fig1();
    std::size_t L1 = *fig1.agent_index("L");
    CHECK(purge(fig1, fixtures::seq(fig1, {"a", "h"}), L1, fig1.initial) ==
          fixtures::seq(fig1, {"h"}));
    CHECK(purge(fig1, fixtures::seq(fig1, {"h", "a"}), L1, fig1.initial) ==
          fixtures::seq(fig1, {"h"}));
    CHECK(purge(fig1, {}, L1, fig1.initial).empty());

    // The kept action advances the tracked state, so the second h is judged
    // under the policy of state h, where H still interferes with L.
    CHECK(purge(fig1, fixtures::seq(fig1, {"h", "h"}), L1, fig1.initial) ==
          fixtures::seq(fig1, {"h", "h"}));

    System fig4 = fixtures::fig4();
    std::size_t L4 = *fig4.agent_index("L");
    CHECK(purge(fig4, fixtures::seq(fig4, {"h1", "h2"}), L4, fig4.initial) ==
          fixtures::seq(fig4, {"h2"}));
}

TEST_CASE("purge is idempotent and splits over concatenation") {
    std::mt19937_64 gen(2024);
    GeneratorConfig cfg;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        cfg.seed = seed;
        System sys = generate_random_system(cfg);
        for (int i = 0; i < 40; ++i) {
            std::size_t u = gen() % sys.n_agents();
            std::size_t s = gen() % sys.n_states();
            ActionSeq a = random_alpha(gen, sys.n_actions(), 4);
            ActionSeq b = random_alpha(gen, sys.n_actions(), 4);

            ActionSeq pa = purge(sys, a, u, s);
            CHECK(purge(sys, pa, u, s) == pa);

            ActionSeq ab = a;
            ab.insert(ab.end(), b.begin(), b.end());
            ActionSeq expect = pa;
            ActionSeq pb = purge(sys, b, u, sys.run(s, pa));
            expect.insert(expect.end(), pb.begin(), pb.end());
            CHECK(purge(sys, ab, u, s) == expect);
        }
    }
}

TEST_CASE("indistinguishability classes collapse hidden branches") {
    System fig1 = fixtures::fig1();
    StatePartition p = t_similarity(fig1, *fig1.agent_index("L"));
    CHECK(p.classes.size() == 1);  // hidden a links eps-a, then stepping by h drags in h-ah
    CHECK(p.classes[0].size() == 4);

    System fig2 = fixtures::fig2();
    StatePartition pl = t_similarity(fig2, *fig2.agent_index("L"));
    CHECK(pl.classes.size() == 3);  // nothing is hidden from L in fig2
    StatePartition pa = t_similarity(fig2, *fig2.agent_index("A"));
    CHECK(pa.classes.size() == 1);
}

TEST_CASE("security check reports the fixture witnesses") {
    System fig1 = fixtures::fig1();
    Verdict v1 = check_t_security(fig1);
    CHECK_FALSE(v1.holds);
    REQUIRE(v1.witness.has_value());
    CHECK(v1.witness->property == "t-security");
    CHECK(v1.witness->agent == fig1.agent_index("L"));
    CHECK(v1.witness->state == fig1.state_index("eps"));
    CHECK(v1.witness->action == fig1.action_index("a"));
    CHECK(v1.witness->alpha == fixtures::seq(fig1, {"h"}));
    CHECK(v1.witness->obs_with == "0");
    CHECK(v1.witness->obs_without == "1");

    CHECK(check_t_security(fixtures::fig2()).holds);

    System fig4 = fixtures::fig4();
    Verdict v4 = check_t_security(fig4);
    CHECK_FALSE(v4.holds);
    REQUIRE(v4.witness.has_value());
    CHECK(v4.witness->agent == fig4.agent_index("L"));
    CHECK(v4.witness->state == fig4.state_index("q1"));
    CHECK(v4.witness->action == fig4.action_index("h2"));
    CHECK(v4.witness->alpha.empty());
    CHECK(v4.witness->obs_with == "1");
    CHECK(v4.witness->obs_without == "0");
}

TEST_CASE("closure engine and pair search agree on verdict and witness size") {
    for (auto make : {fixtures::fig1, fixtures::fig2, fixtures::fig3, fixtures::fig4,
                      fixtures::global_dg}) {
        System sys = make();
        Verdict a = check_t_security(sys);
        Verdict b = t_security_pair_oracle(sys);
        CHECK(a.holds == b.holds);
        if (!a.holds) {
            REQUIRE(a.witness.has_value());
            REQUIRE(b.witness.has_value());
            CHECK(a.witness->alpha.size() == b.witness->alpha.size());
        }
    }
    GeneratorConfig cfg;
    for (std::uint64_t seed = 100; seed < 200; ++seed) {
        cfg.seed = seed;
        System sys = generate_random_system(cfg);
        Verdict a = check_t_security(sys);
        Verdict b = t_security_pair_oracle(sys);
        CAPTURE(seed);
        CHECK(a.holds == b.holds);
        if (!a.holds && a.witness && b.witness)
            CHECK(a.witness->alpha.size() == b.witness->alpha.size());
    }
}

TEST_CASE("the checker verdict matches the enumeration oracle") {
    GeneratorConfig cfg;
    cfg.max_states = 3;  // keeps the complete bound |S|^2 <= 9 affordable
    cfg.max_actions = 3;
    for (std::uint64_t seed = 300; seed < 380; ++seed) {
        cfg.seed = seed;
        System sys = generate_random_system(cfg);
        Verdict exact = check_t_security(sys);
        Verdict byenum = t_definition_oracle(sys, sys.n_states() * sys.n_states());
        CAPTURE(seed);
        CHECK(exact.holds == byenum.holds);
    }
}

TEST_CASE("both policy edges feeding the collapsed class are useless") {
    System fig1 = fixtures::fig1();
    auto useless = find_useless_edges_t(fig1);
    REQUIRE(useless.size() == 2);
    CHECK(useless[0].state == fig1.state_index("eps"));
    CHECK(useless[0].source == fig1.agent_index("H"));
    CHECK(useless[0].target == fig1.agent_index("L"));
    CHECK(useless[1].state == fig1.state_index("h"));
    CHECK(useless[1].source == fig1.agent_index("H"));
    CHECK(useless[1].target == fig1.agent_index("L"));

    CHECK(find_useless_edges_t(fixtures::fig2()).empty());
}

TEST_CASE("normalization strips useless edges and settles in one pass") {
    System fig1 = fixtures::fig1();
    System norm = normalize_t(fig1);
    CHECK(find_useless_edges_t(norm).empty());
    CHECK(normalize_t(norm) == norm);
    CHECK(is_uniform_t(norm).uniform);
    CHECK(check_t_security(fig1).holds == check_t_security(norm).holds);
    for (std::size_t s = 0; s < norm.n_states(); ++s)
        for (std::size_t u = 0; u < norm.n_agents(); ++u)
            CHECK(norm.interfering_set(u, s).count() == 1);  // only reflexive left

    GeneratorConfig cfg;
    for (std::uint64_t seed = 500; seed < 540; ++seed) {
        cfg.seed = seed;
        System sys = generate_random_system(cfg);
        System n = normalize_t(sys);
        CAPTURE(seed);
        CHECK(find_useless_edges_t(n).empty());
        CHECK(normalize_t(n) == n);
        CHECK(check_t_security(sys).holds == check_t_security(n).holds);
    }
}

TEST_CASE("uniformity witnesses name the clashing states and sets") {
    System fig1 = fixtures::fig1();
    UniformVerdict u1 = is_uniform_t(fig1);
    CHECK_FALSE(u1.uniform);
    REQUIRE(u1.witness.has_value());
    CHECK(u1.witness->agent == fig1.agent_index("L"));
    CHECK(u1.witness->state_a == fig1.state_index("eps"));
    CHECK(u1.witness->state_b == fig1.state_index("a"));
    CHECK(u1.witness->set_a.elements() ==
          std::vector<std::size_t>{*fig1.agent_index("H"), *fig1.agent_index("L")});
    CHECK(u1.witness->set_b.elements() == std::vector<std::size_t>{*fig1.agent_index("L")});
    CHECK(render_uniform_witness(fig1, *u1.witness) ==
          "agent L cannot distinguish states eps and a but its interfering sets differ: "
          "{H, L} vs {L}");

    System fig4 = fixtures::fig4();
    UniformVerdict u4 = is_uniform_t(fig4);
    CHECK_FALSE(u4.uniform);
    REQUIRE(u4.witness.has_value());
    CHECK(u4.witness->agent == fig4.agent_index("L"));
    CHECK(u4.witness->state_a == fig4.state_index("q0"));
    CHECK(u4.witness->state_b == fig4.state_index("q1"));

    CHECK(is_uniform_t(fixtures::fig2()).uniform);
    CHECK(is_uniform_t(fixtures::global_dg()).uniform);
}

TEST_CASE("initial-state checking demands a uniform policy") {
    System fig4 = fixtures::fig4();
    try {
        check_t_from_initial(fig4);
        FAIL("expected a uniformity error");
    } catch (const AnalysisError& e) {
        CHECK(e.kind() == ErrorKind::NonUniformPolicy);
        std::string msg = e.what();
        CHECK(msg.find("policy is not transitively uniform: ") == 0);
        CHECK(msg.find("agent L cannot distinguish states q0 and q1") != std::string::npos);
        // fig4 looks secure from q0 alone, so the message calls that out
        CHECK(msg.find("; the initial-state check alone would wrongly report the system "
                       "secure") != std::string::npos);
    }

    Verdict v2 = check_t_from_initial(fixtures::fig2());
    CHECK(v2.holds);
    REQUIRE_FALSE(v2.notes.empty());
    CHECK(v2.notes.front() ==
          "checked from the initial state only; sound because the policy is transitively "
          "uniform");

    System dg = fixtures::global_dg();
    Verdict vi = check_t_from_initial(dg);
    Verdict vf = check_t_security(dg);
    CHECK_FALSE(vi.holds);
    CHECK(vi.holds == vf.holds);
    REQUIRE(vi.witness.has_value());
    REQUIRE(vf.witness.has_value());
    CHECK(vi.witness->state == vf.witness->state);
    CHECK(vi.witness->action == vf.witness->action);
    CHECK(vi.witness->alpha == vf.witness->alpha);
}

TEST_CASE("initial-state checking agrees with the full check on uniform systems") {
    GeneratorConfig cfg;
    std::size_t checked = 0;
    for (std::uint64_t seed = 700; seed < 900; ++seed) {
        cfg.seed = seed;
        System sys = generate_random_system(cfg);
        if (!is_uniform_t(sys).uniform) continue;
        ++checked;
        CAPTURE(seed);
        CHECK(check_t_from_initial(sys).holds == check_t_security(sys).holds);
    }
    CHECK(checked >= 20);
}
