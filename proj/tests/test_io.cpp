#include <catch2/catch_amalgamated.hpp>

#include "pc/io.hpp"
#include "pc/oracle.hpp"

using namespace pc;

TEST_CASE("json round trip is byte identical") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        PowerCircuit c = gen_random_circuit(seed, 9, 0.35, 3);
        std::map<std::string, MarkingId> ms;
        for (std::uint32_t i = 0; i < 3; ++i) ms["m" + std::to_string(i)] = MarkingId{i};
        std::string once = circuit_to_json(c, ms).dump(2);
        CircuitDoc doc = circuit_from_json(nlohmann::json::parse(once));
        std::string twice = circuit_to_json(doc.circuit, doc.markings).dump(2);
        REQUIRE(once == twice);
        // and the values came through
        Evaluator ea(c), eb(doc.circuit);
        for (auto& [name, m] : ms) {
            BigEval va = ea.marking_value(m);
            BigEval vb = eb.marking_value(doc.markings.at(name));
            CHECK(va.kind == vb.kind);
            if (va.exact()) CHECK(va.value == vb.value);
        }
    }
}

TEST_CASE("import preserves sparse ids") {
    PowerCircuit c;
    NodeId a = c.add_node();
    NodeId b = c.add_node({{a, 1}});
    MarkingId m = c.new_marking({{b, 1}});
    c.free_marking(m);
    // delete b so the id set has a hole after re-adding
    c.delete_node(b);
    NodeId d = c.add_node({{a, 1}});
    std::map<std::string, MarkingId> ms{{"m", c.new_marking({{d, 1}})}};
    std::string out = circuit_to_json(c, ms).dump();
    CircuitDoc doc = circuit_from_json(nlohmann::json::parse(out));
    CHECK(circuit_to_json(doc.circuit, doc.markings).dump() == out);
}

TEST_CASE("bad inputs are rejected") {
    CHECK_THROWS_AS(circuit_from_json(nlohmann::json::parse("{}")), ParseError);
    // a cycle
    nlohmann::json j = nlohmann::json::parse(
        R"({"nodes":[{"id":0,"succ":[[1,1]]},{"id":1,"succ":[[0,1]]}],"markings":{}})");
    CHECK_THROWS_AS(circuit_from_json(j), std::logic_error);
}

TEST_CASE("dot output is stable") {
    PowerCircuit c = gen_random_circuit(3, 6, 0.4, 2);
    std::map<std::string, MarkingId> ms{{"m0", MarkingId{0}}, {"m1", MarkingId{1}}};
    std::string a = circuit_to_dot(c, ms);
    std::string b = circuit_to_dot(c, ms);
    CHECK(a == b);
    CHECK(a.find("digraph") == 0);
    CHECK(a.find("->") != std::string::npos);
}
