#include <catch2/catch_amalgamated.hpp>

#include "pc/circuit.hpp"
#include "pc/oracle.hpp"

using namespace pc;

namespace {

BigInt value_of(const PowerCircuit& c, MarkingId m) {
    BigEval v = eval_exact(c, m);
    REQUIRE(v.exact());
    REQUIRE(v.value.is_integer());
    return v.value.to_integer();
}

// line of n+1 nodes, each lambda = +previous; returns the last node
NodeId tower_line(PowerCircuit& c, int n) {
    NodeId p = c.add_node();
    for (int i = 0; i < n; ++i) p = c.add_node({{p, 1}});
    return p;
}

} // namespace

TEST_CASE("empty circuit and leaves") {
    PowerCircuit c;
    CHECK(c.node_count() == 0);

    NodeId p = c.add_node();
    Evaluator ev(c);
    CHECK(ev.node_value(p).value == Dyadic(1));

    NodeId q = c.add_node({{p, 1}});
    CHECK(Evaluator(c).node_value(q).value == Dyadic(2));
}

TEST_CASE("tower line evaluates to tow(n)") {
    PowerCircuit c;
    NodeId last = tower_line(c, 4);
    MarkingId m = c.new_marking({{last, 1}});
    CHECK(value_of(c, m) == 65536);
}

TEST_CASE("negative successor gives a fractional value") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId q = c.add_node({{p, -1}});
    Evaluator ev(c);
    BigEval v = ev.node_value(q);
    REQUIRE(v.exact());
    CHECK(v.value == Dyadic(1, -1)); // 1/2
    CHECK(!v.value.is_integer());
    CHECK(ev.is_power_circuit() == PcTest::No);
}

TEST_CASE("support") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId q = c.add_node();
    MarkingId empty = c.new_marking();
    CHECK(c.support(empty).empty());

    MarkingId m = c.new_marking({{p, 1}, {q, -1}});
    CHECK(c.support(m) == std::set<NodeId>{p, q});

    // cancellation drops the node from the support
    MarkingId a = c.new_marking({{p, 1}});
    MarkingId b = c.new_marking({{p, -1}, {q, 1}});
    MarkingId sum = c.add_markings(a, b);
    CHECK(c.support(sum) == std::set<NodeId>{q});
}

TEST_CASE("clone_node") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId p2 = c.clone_node(p);
    CHECK(p2 != p);
    CHECK(Evaluator(c).node_value(p2).value == Dyadic(1));

    NodeId q = c.add_node({{p, 1}});
    NodeId q2 = c.clone_node(q);
    CHECK(c.lambda(q2) == c.lambda(q));
    NodeId q3 = c.clone_node(q);
    CHECK(q3 != q2);
    Evaluator ev(c);
    CHECK(ev.node_value(q2).value == ev.node_value(q3).value);
}

TEST_CASE("clone_marking is a source with equal value") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId q = c.add_node({{p, 1}});
    MarkingId m = c.new_marking({{p, 1}, {q, -1}});
    std::size_t before = c.node_count();

    MarkingId cl = c.clone_marking(m);
    CHECK(c.node_count() == before + 2);
    CHECK(c.signs(cl).size() == 2);
    CHECK(c.is_source(cl));
    Evaluator ev(c);
    CHECK(ev.marking_value(cl).value == ev.marking_value(m).value);

    CHECK(c.signs(c.clone_marking(c.new_marking())).empty());
}

TEST_CASE("add_markings") {
    PowerCircuit c;
    NodeId p = c.add_node();

    SECTION("inverse cancels to the empty marking") {
        MarkingId m = c.new_marking({{p, 1}});
        MarkingId n = c.negate_marking(m);
        MarkingId sum = c.add_markings(m, n);
        CHECK(c.signs(sum).empty());
    }
    SECTION("disjoint supports merge without clones") {
        NodeId q = c.add_node({{p, 1}});
        MarkingId m = c.new_marking({{p, 1}});
        MarkingId k = c.new_marking({{q, -1}});
        std::size_t before = c.node_count();
        MarkingId sum = c.add_markings(m, k);
        CHECK(c.node_count() == before);
        CHECK(c.signs(sum) == SignMap{{p, 1}, {q, -1}});
    }
    SECTION("coefficient 2 clones the node") {
        MarkingId m = c.new_marking({{p, 1}});
        std::size_t before = c.node_count();
        MarkingId sum = c.add_markings(m, m);
        CHECK(c.node_count() == before + 1);
        CHECK(c.signs(sum).size() == 2);
        CHECK(value_of(c, sum) == 2);
    }
}

TEST_CASE("negate_marking") {
    PowerCircuit c;
    NodeId p = c.add_node();
    CHECK(c.signs(c.negate_marking(c.new_marking())).empty());
    MarkingId m = c.new_marking({{p, 1}});
    MarkingId n = c.negate_marking(m);
    CHECK(c.signs(n) == SignMap{{p, -1}});
    CHECK(c.signs(c.negate_marking(n)) == c.signs(m));
}

TEST_CASE("mul_pow2") {
    SECTION("empty exponent copies the value") {
        PowerCircuit c;
        NodeId p = c.add_node();
        NodeId q = c.add_node({{p, 1}});
        MarkingId u = c.new_marking({{q, 1}});
        MarkingId x = c.new_marking();
        MarkingId v = c.mul_pow2(u, x);
        CHECK(value_of(c, v) == 2);
        CHECK(c.is_source(v));
    }
    SECTION("1 * 2^1 = 2") {
        PowerCircuit c;
        MarkingId u = c.new_marking({{c.add_node(), 1}});
        MarkingId x = c.new_marking({{c.add_node(), 1}});
        MarkingId v = c.mul_pow2(u, x);
        CHECK(value_of(c, v) == 2);
    }
    SECTION("3 * 2^-1 leaves a non power circuit behind") {
        PowerCircuit c;
        NodeId p0 = c.add_node();
        NodeId p1 = c.add_node({{p0, 1}});
        MarkingId u = c.new_marking({{p0, 1}, {p1, 1}}); // 3
        MarkingId x = c.new_marking({{c.add_node(), -1}}); // -1
        MarkingId v = c.mul_pow2(u, x);
        Evaluator ev(c);
        BigEval bv = ev.marking_value(v);
        REQUIRE(bv.exact());
        CHECK(bv.value == Dyadic(3, -1));
        CHECK(ev.is_power_circuit() == PcTest::No);
    }
    SECTION("source u is reused, not cloned") {
        PowerCircuit c;
        NodeId p = c.add_node();
        MarkingId u = c.new_marking({{p, 1}});
        MarkingId x = c.new_marking({{c.add_node(), 1}});
        std::size_t before = c.node_count();
        MarkingId v = c.mul_pow2(u, x);
        CHECK(c.node_count() == before); // no clone needed anywhere
        CHECK(value_of(c, v) == 2);
        CHECK(c.signs(v) == c.signs(u));
    }
}

TEST_CASE("is_source") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId q = c.add_node({{p, 1}});
    CHECK(c.is_source(c.new_marking()));
    CHECK(!c.is_source(c.new_marking({{p, 1}})));
    CHECK(c.is_source(c.new_marking({{q, 1}})));
    MarkingId m = c.new_marking({{p, 1}, {q, 1}});
    CHECK(c.is_source(c.clone_marking(m)));
}

TEST_CASE("node deletion requires no references") {
    PowerCircuit c;
    NodeId p = c.add_node();
    NodeId q = c.add_node({{p, 1}});
    CHECK_THROWS_AS(c.delete_node(p), std::logic_error); // incoming arc from q
    MarkingId m = c.new_marking({{q, 1}});
    CHECK_THROWS_AS(c.delete_node(q), std::logic_error); // marked
    c.free_marking(m);
    c.delete_node(q);
    c.delete_node(p);
    CHECK(c.node_count() == 0);
    CHECK_THROWS_AS(c.lambda(q), UnknownNode); // ids stay invalid
}

TEST_CASE("foreign nodes are rejected") {
    PowerCircuit c, d;
    NodeId p = c.add_node();
    (void)p;
    CHECK_THROWS_AS(d.add_node({{p, 1}}), UnknownNode);
}

// Size accounting and value semantics on random circuits, oracle-checked.
TEST_CASE("random op soundness") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        PowerCircuit c = gen_random_circuit(seed, 8, 0.3);
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        auto ids = c.node_ids();
        auto random_marking = [&] {
            SignMap sm;
            for (NodeId p : ids)
                if (rng() & 1) sm[p] = (rng() & 2) ? 1 : -1;
            return c.new_marking(sm);
        };
        MarkingId m = random_marking();
        MarkingId k = random_marking();
        Evaluator ev0(c);
        BigEval vm = ev0.marking_value(m), vk = ev0.marking_value(k);
        if (!vm.exact() || !vk.exact()) continue;

        std::size_t overlap = 0;
        for (auto& [p, s] : c.signs(m))
            if (c.sign(k, p) != 0) ++overlap;
        std::size_t before = c.node_count();
        MarkingId sum = c.add_markings(m, k);
        CHECK(c.node_count() - before <= overlap);
        CHECK(c.signs(sum).size() <= c.signs(m).size() + c.signs(k).size());

        CHECK(Evaluator(c).marking_value(sum).value == vm.value + vk.value);

        // after this point e(m) may change: mul_pow2 reuses a source u
        std::size_t su = c.signs(m).size(), sx = c.signs(k).size();
        before = c.node_count();
        MarkingId prod = c.mul_pow2(m, k);
        CHECK(c.node_count() - before <= su + sx);
        CHECK(c.signs(prod).size() == c.signs(m).size());

        Evaluator ev(c);
        BigEval vp = ev.marking_value(prod);
        if (vp.exact() && vk.value.is_integer() &&
            vk.value.bit_size() < 24) { // keep 2^x representable
            CHECK(vp.value == vm.value.times_pow2(static_cast<std::int64_t>(vk.value.to_integer())));
        }
        CHECK_NOTHROW(c.topological_order()); // still acyclic
    }
}
