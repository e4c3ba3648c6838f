#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nipol/core.hpp"
#include "nipol/specio.hpp"

namespace fixtures {

inline std::string fixture_path(const std::string& name) {
    return std::string(NIPOL_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline nipol::System load(const std::string& name) {
    std::vector<nipol::Diagnostic> diags;
    auto sys = nipol::parse(read_file(fixture_path(name)), diags);
    if (!sys) throw std::runtime_error("fixture " + name + " failed to parse");
    return *sys;
}

// Same systems as the fixture files, built programmatically; a test pins
// file and builder to each other.

inline nipol::System fig1() {
    return nipol::SystemBuilder()
        .agents({"A", "H", "L"})
        .action("a", "A")
        .action("h", "H")
        .state("eps", true)
        .state("a")
        .state("h")
        .state("ah")
        .step("eps", "a", "a")
        .step("eps", "h", "h")
        .step("a", "h", "ah")
        .obs("h", "L", "1")
        .edge("eps", "H", "L")
        .edge("h", "H", "L")
        .build();
}

inline nipol::System fig2() {
    return nipol::SystemBuilder()
        .agents({"A", "B", "L"})
        .action("a", "A")
        .action("b", "B")
        .state("q0", true)
        .state("q1")
        .state("q2")
        .step("q0", "b", "q1")
        .step("q0", "a", "q2")
        .step("q1", "b", "q2")
        .step("q2", "a", "q1")
        .obs("q1", "L", "1")
        .obs("q2", "L", "2")
        .edge("q0", "A", "L")
        .edge("q0", "B", "L")
        .edge("q1", "B", "L")
        .edge("q2", "A", "L")
        .build();
}

inline nipol::System fig3() {
    return nipol::SystemBuilder()
        .agents({"H", "D", "L"})
        .action("h1", "H")
        .action("h2", "H")
        .action("d", "D")
        .state("q0", true)
        .state("q1")
        .state("q2")
        .state("q3")
        .state("q4")
        .state("q5")
        .state("q6")
        .step("q0", "h1", "q1")
        .step("q0", "h2", "q2")
        .step("q1", "d", "q3")
        .step("q2", "d", "q4")
        .step("q1", "h1", "q5")
        .step("q1", "h2", "q6")
        .obs("q3", "L", "1")
        .obs("q4", "L", "2")
        .edge("q0", "H", "D")
        .edge("q1", "H", "L")
        .edge("q1", "D", "L")
        .edge("q2", "D", "L")
        .build();
}

inline nipol::System fig4() {
    return nipol::SystemBuilder()
        .agents({"H1", "H2", "L"})
        .action("h1", "H1")
        .action("h2", "H2")
        .state("q0", true)
        .state("q1")
        .state("q2")
        .state("q3")
        .step("q0", "h1", "q1")
        .step("q0", "h2", "q3")
        .step("q1", "h2", "q2")
        .obs("q2", "L", "1")
        .obs("q3", "L", "1")
        .edge("q0", "H2", "L")
        .build();
}

inline nipol::System global_dg() {
    nipol::SystemBuilder b;
    b.agents({"H", "DG", "L"})
        .action("h", "H")
        .action("d", "DG")
        .state("q0", true)
        .state("q1")
        .state("q2")
        .step("q0", "h", "q1")
        .step("q1", "d", "q2")
        .obs("q2", "L", "1");
    for (const char* s : {"q0", "q1", "q2"}) {
        b.edge(s, "H", "DG");
        b.edge(s, "DG", "L");
    }
    return b.build();
}

inline nipol::ActionSeq seq(const nipol::System& sys, std::initializer_list<const char*> names) {
    nipol::ActionSeq alpha;
    for (const char* n : names) {
        auto idx = sys.action_index(n);
        if (!idx) throw std::runtime_error(std::string("no action ") + n);
        alpha.push_back(*idx);
    }
    return alpha;
}

}  // namespace fixtures
