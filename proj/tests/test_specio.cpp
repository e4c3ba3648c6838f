#include "nipol/specio.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"

using namespace nipol;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

}  // namespace

TEST_CASE("parser reports usage errors with positions") {
    std::vector<Diagnostic> diags;
    auto sys = parse(
        "agents\n"
        "action x\n"
        "state s init extra\n"
        "step a b\n"
        "obs x\n"
        "edge x\n"
        "foo bar\n",
        diags);
    CHECK_FALSE(sys.has_value());
    REQUIRE(diags.size() == 7);
    CHECK(diags[0].message == "expected: agents NAME+");
    CHECK(diags[1].message == "expected: action NAME AGENT");
    CHECK(diags[2].message == "expected: state NAME [init]");
    CHECK(diags[3].message == "expected: step FROM ACTION TO");
    CHECK(diags[4].message == "expected: obs STATE AGENT LABEL");
    CHECK(diags[5].message == "expected: edge STATE SOURCE TARGET");
    CHECK(diags[6].message == "unknown directive foo");
    for (std::size_t i = 0; i < diags.size(); ++i) {
        CHECK(diags[i].is_error);
        CHECK(diags[i].span.line == static_cast<int>(i + 1));
    }
    CHECK(diags[6].span.col_begin == 1);
    CHECK(diags[6].span.col_end == 3);
}

TEST_CASE("comments, blank lines and CRLF are tolerated") {
    std::vector<Diagnostic> diags;
    auto sys = parse(
        "# tiny two-state system\r\n"
        "agents A B\r\n"
        "action x A  # trailing comment\n"
        "state s init\r\n"
        "\r\n"
        "state t\n"
        "step s x t\n"
        "obs t B 1\n"
        "edge s A B\n",
        diags);
    REQUIRE(sys.has_value());
    CHECK(diags.empty());
    System expect = SystemBuilder()
                        .agents({"A", "B"})
                        .action("x", "A")
                        .state("s", true)
                        .state("t")
                        .step("s", "x", "t")
                        .obs("t", "B", "1")
                        .edge("s", "A", "B")
                        .build();
    CHECK(*sys == expect);
}

TEST_CASE("serializer emits the canonical form without defaults") {
    CHECK(serialize(fixtures::fig1()) ==
          "agents A H L\n"
          "action a A\n"
          "action h H\n"
          "state eps init\n"
          "state a\n"
          "state h\n"
          "state ah\n"
          "step eps a a\n"
          "step eps h h\n"
          "step a h ah\n"
          "obs h L 1\n"
          "edge eps H L\n"
          "edge h H L\n");
}

TEST_CASE("parse and serialize are mutually inverse on the fixtures") {
    for (const char* name : {"fig1.nipol", "fig2.nipol", "fig3.nipol", "fig4.nipol",
                             "global_dg.nipol"}) {
        System sys = fixtures::load(name);
        std::string text = serialize(sys);
        std::vector<Diagnostic> diags;
        auto again = parse(text, diags);
        REQUIRE(again.has_value());
        CHECK(diags.empty());
        CHECK(*again == sys);
        CHECK(serialize(*again) == text);
    }
}

TEST_CASE("dot export lists states, observations and merged transitions") {
    System sys = fixtures::fig1();
    std::string dot = to_dot(sys);
    CHECK(count_of(dot, "[label=<") == 4);
    CHECK(count_of(dot, " -> s") == 3);
    CHECK(dot.find("rankdir=LR") != std::string::npos);
    CHECK(dot.find("<B>eps</B> (init)") != std::string::npos);
    CHECK(dot.find("obs L: 1") != std::string::npos);
    CHECK(dot.find("H -&gt; L") != std::string::npos);
    CHECK(dot.find("(useless)") == std::string::npos);

    std::vector<PolicyEdge> faded{{*sys.state_index("eps"), *sys.agent_index("H"),
                                   *sys.agent_index("L")}};
    std::string annotated = to_dot(sys, faded);
    CHECK(count_of(annotated, "(useless)") == 1);
    CHECK(annotated.find("<FONT COLOR=\"gray50\"><I>H -&gt; L (useless)</I></FONT>") !=
          std::string::npos);
}

TEST_CASE("dot export merges parallel transitions into one label") {
    System sys = SystemBuilder()
                     .agents({"A"})
                     .action("x", "A")
                     .action("y", "A")
                     .state("s", true)
                     .state("t")
                     .step("s", "x", "t")
                     .step("s", "y", "t")
                     .step("t", "x", "s")
                     .build();
    std::string dot = to_dot(sys);
    CHECK(dot.find("s0 -> s1 [label=\"x, y\"]") != std::string::npos);
    CHECK(dot.find("s1 -> s0 [label=\"x\"]") != std::string::npos);
}

TEST_CASE("hashing is stable across calls") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("hello") == 0xa430d84680aabd0bull);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    std::string text = serialize(fixtures::fig3());
    CHECK(fnv1a64_hex(text) == fnv1a64_hex(text));
    CHECK(fnv1a64_hex(text).size() == 16);
}
