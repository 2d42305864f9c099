#include <catch2/catch_amalgamated.hpp>

#include "pc/oracle.hpp"
#include "pc/triple.hpp"

using namespace pc;

namespace {

PairValue pair_of(const PowerCircuit& c, const Triple& t) {
    PairValue v = pair_value(c, t.u, t.x, t.k);
    REQUIRE(v.exact);
    return v;
}

} // namespace

TEST_CASE("int_to_triple") {
    {
        PowerCircuit c;
        Triple t = int_to_triple(c, 0);
        CHECK(c.signs(t.u).empty());
        CHECK(pair_of(c, t).r == Dyadic(0));
    }
    {
        PowerCircuit c;
        Triple t = int_to_triple(c, 5);
        CHECK(c.signs(t.u).size() == 2); // bits 0 and 2
        CHECK(pair_of(c, t).r == Dyadic(5));
        CHECK(c.is_source(t.u));
    }
    {
        PowerCircuit c;
        Triple t = int_to_triple(c, -6);
        CHECK(c.signs(t.u).size() == 2); // bits 1 and 2, both negative
        CHECK(pair_of(c, t).r == Dyadic(-6));
    }
}

TEST_CASE("triple_mul matches the multiplication formula") {
    SECTION("identity element") {
        PowerCircuit c;
        Triple e = identity_triple(c);
        Triple t = int_to_triple(c, 7);
        Triple prod = triple_mul(c, e, t);
        PairValue v = pair_of(c, prod);
        CHECK(v.r == Dyadic(7));
        CHECK(v.m == 0);
    }
    SECTION("[1,0,0]^2 = [2,0,0]") {
        PowerCircuit c;
        Triple a = int_to_triple(c, 1);
        Triple b = int_to_triple(c, 1);
        Triple prod = triple_mul(c, a, b);
        PairValue v = pair_of(c, prod);
        CHECK(v.r == Dyadic(2));
        CHECK(v.m == 0);
    }
    SECTION("[1,-1,2]*[1,0,0] = [5,-1,2]") {
        PowerCircuit c;
        // [1,-1,2]: pair (1/2, 1)
        std::vector<NodeId> basis;
        Triple a{binary_marking(c, basis, 1), c.new_marking(), c.new_marking()};
        std::vector<NodeId> b2, b3;
        a.x = binary_marking(c, b2, -1);
        a.k = binary_marking(c, b3, 2);
        Triple b = int_to_triple(c, 1);
        Triple prod = triple_mul(c, a, b);
        PairValue v = pair_of(c, prod);
        CHECK(v.r == Dyadic(5, -1)); // 5 * 2^-1
        CHECK(v.m == 1);
    }
}

TEST_CASE("triple_inverse gives the group inverse") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 30; ++it) {
        long long uu = static_cast<long long>(rng() % 41) - 20;
        long long mm = static_cast<long long>(rng() % 11) - 5;
        SdpElement a = sdp_literal(uu, mm);
        SdpElement b = sdp_literal(uu, mm);
        b.t = triple_inverse(b.circuit, b.t);
        Triple tb = absorb_triple(a.circuit, b);
        Triple prod = triple_mul(a.circuit, a.t, tb);
        CHECK(triple_is_identity(a.circuit, prod));
    }
}

TEST_CASE("triple_swap") {
    SECTION("s(1,0) = (0,1)") {
        PowerCircuit c;
        Triple t = int_to_triple(c, 1);
        MakeTreeResult r = make_tree(c, {t.u, t.x, t.k}, true);
        REQUIRE(r.outcome == TreeRep::Outcome::Ok);
        REQUIRE(triple_swap(c, *r.tree, t) == SwapStatus::Ok);
        PairValue v = pair_of(c, t);
        CHECK(v.r == Dyadic(0));
        CHECK(v.m == 1);
    }
    SECTION("s(0,5) = (5,0)") {
        PowerCircuit c;
        SdpElement e = sdp_literal(0, 5);
        MakeTreeResult r = make_tree(e.circuit, {e.t.u, e.t.x, e.t.k}, true);
        REQUIRE(triple_swap(e.circuit, *r.tree, e.t) == SwapStatus::Ok);
        PairValue v = pair_of(e.circuit, e.t);
        CHECK(v.r == Dyadic(5));
        CHECK(v.m == 0);
    }
    SECTION("z = 3/2 is undefined") {
        PowerCircuit c;
        // [3,-1,3]: pair (3/2, 2)
        std::vector<NodeId> b1, b2, b3;
        Triple t{binary_marking(c, b1, 3), binary_marking(c, b2, -1), binary_marking(c, b3, 3)};
        MakeTreeResult r = make_tree(c, {t.u, t.x, t.k}, true);
        REQUIRE(r.outcome == TreeRep::Outcome::Ok);
        CHECK(triple_swap(c, *r.tree, t) == SwapStatus::Undefined);
    }
    SECTION("involution on its domain") {
        for (long long u : {-6LL, -1LL, 0LL, 3LL, 12LL}) {
            for (long long m : {-3LL, 0LL, 2LL}) {
                SdpElement e = sdp_literal(u, m);
                MakeTreeResult r1 = make_tree(e.circuit, {e.t.u, e.t.x, e.t.k}, true);
                REQUIRE(triple_swap(e.circuit, *r1.tree, e.t) == SwapStatus::Ok);
                MakeTreeResult r2 = make_tree(e.circuit, {e.t.u, e.t.x, e.t.k}, true);
                REQUIRE(triple_swap(e.circuit, *r2.tree, e.t) == SwapStatus::Ok);
                PairValue v = pair_of(e.circuit, e.t);
                CHECK(v.r == Dyadic(u));
                CHECK(v.m == m);
            }
        }
    }
}

TEST_CASE("wp_sdp evaluates programs") {
    SECTION("lit 1 0; swap") {
        SdpResult r = wp_sdp(parse_sdp_program("lit 1 0\nswap\n"));
        REQUIRE(r.status == SdpStatus::Value);
        PairValue v = pair_of(*r.circuit, r.t);
        CHECK(v.r == Dyadic(0));
        CHECK(v.m == 1);
    }
    SECTION("the Eq-(1) ladder reaches (0, tow(4))") {
        SdpResult r = wp_sdp(sdp_tower_ladder(4));
        REQUIRE(r.status == SdpStatus::Value);
        PairValue v = pair_of(*r.circuit, r.t);
        CHECK(v.r == Dyadic(0));
        CHECK(v.m == 65536);
    }
    SECTION("homomorphism identity (0,1)(1,0)(0,-1) = (2,0)") {
        SdpResult r = wp_sdp(parse_sdp_program("lit 0 1\nlit 1 0\nmul\nlit 0 -1\nmul\n"));
        REQUIRE(r.status == SdpStatus::Value);
        PairValue v = pair_of(*r.circuit, r.t);
        CHECK(v.r == Dyadic(2));
        CHECK(v.m == 0);
    }
    SECTION("malformed programs") {
        CHECK(wp_sdp(parse_sdp_program("mul\n")).status == SdpStatus::Malformed);
        CHECK(wp_sdp(parse_sdp_program("lit 1 0\nlit 2 0\n")).status == SdpStatus::Malformed);
    }
}

// exhaustive small-program search with the exact rational oracle: the
// shortest program hitting an undefined swap has four instructions
TEST_CASE("minimal undefined witness") {
    struct OraclePair {
        Dyadic r;
        BigInt m;
    };
    enum class Tok { L01, L10, L1m1, Mul, Swap };
    auto eval = [](const std::vector<Tok>& prog) -> int {
        // 1 = undefined swap hit, 0 = fine, -1 = malformed
        std::vector<OraclePair> st;
        for (Tok t : prog) {
            switch (t) {
            case Tok::L01: st.push_back({Dyadic(0), 1}); break;
            case Tok::L10: st.push_back({Dyadic(1), 0}); break;
            case Tok::L1m1: st.push_back({Dyadic(1), -1}); break;
            case Tok::Mul: {
                if (st.size() < 2) return -1;
                OraclePair b = st.back();
                st.pop_back();
                OraclePair a = st.back();
                st.pop_back();
                if (boost::multiprecision::abs(a.m) > 64) return -1;
                st.push_back({a.r + b.r.times_pow2(a.m.convert_to<std::int64_t>()), a.m + b.m});
                break;
            }
            case Tok::Swap: {
                if (st.empty()) return -1;
                if (!st.back().r.is_integer()) return 1;
                OraclePair a = st.back();
                st.pop_back();
                st.push_back({Dyadic(a.m), a.r.to_integer()});
                break;
            }
            }
        }
        return 0;
    };
    std::vector<Tok> alphabet{Tok::L01, Tok::L10, Tok::L1m1, Tok::Mul, Tok::Swap};
    std::size_t shortest = 0;
    std::vector<Tok> witness;
    for (std::size_t len = 1; len <= 4 && shortest == 0; ++len) {
        std::vector<std::size_t> idx(len, 0);
        for (;;) {
            std::vector<Tok> prog;
            for (std::size_t i : idx) prog.push_back(alphabet[i]);
            if (eval(prog) == 1) {
                shortest = len;
                witness = prog;
                break;
            }
            std::size_t d = 0;
            while (d < len && ++idx[d] == alphabet.size()) idx[d++] = 0;
            if (d == len) break;
        }
    }
    REQUIRE(shortest == 4);

    // the same program through the circuit implementation
    SdpProgram p;
    for (Tok t : witness) {
        switch (t) {
        case Tok::L01: p.push_back({SdpInstr::Op::Lit, 0, 1}); break;
        case Tok::L10: p.push_back({SdpInstr::Op::Lit, 1, 0}); break;
        case Tok::L1m1: p.push_back({SdpInstr::Op::Lit, 1, -1}); break;
        case Tok::Mul: p.push_back({SdpInstr::Op::Mul, 0, 0}); break;
        case Tok::Swap: p.push_back({SdpInstr::Op::Swap, 0, 0}); break;
        }
    }
    CHECK(wp_sdp(p).status == SdpStatus::Undefined);
}

TEST_CASE("associativity against the pair oracle") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 40; ++it) {
        long long vals[3][2];
        for (auto& v : vals) {
            v[0] = static_cast<long long>(rng() % 21) - 10;
            v[1] = static_cast<long long>(rng() % 9) - 4;
        }
        auto build = [&](int order) {
            SdpElement a = sdp_literal(vals[0][0], vals[0][1]);
            SdpElement b = sdp_literal(vals[1][0], vals[1][1]);
            SdpElement c = sdp_literal(vals[2][0], vals[2][1]);
            if (order == 0) { // (a b) c
                Triple tb = absorb_triple(a.circuit, b);
                a.t = triple_mul(a.circuit, a.t, tb);
                Triple tc = absorb_triple(a.circuit, c);
                a.t = triple_mul(a.circuit, a.t, tc);
                return pair_of(a.circuit, a.t);
            }
            Triple tc = absorb_triple(b.circuit, c);
            b.t = triple_mul(b.circuit, b.t, tc);
            Triple tb = absorb_triple(a.circuit, b);
            a.t = triple_mul(a.circuit, a.t, tb);
            return pair_of(a.circuit, a.t);
        };
        PairValue left = build(0), right = build(1);
        CHECK(left.r == right.r);
        CHECK(left.m == right.m);
    }
}

TEST_CASE("sdp_equal") {
    CHECK(sdp_equal(parse_sdp_program("lit 0 1\nlit 1 0\nmul\nlit 0 -1\nmul\n"),
                    parse_sdp_program("lit 2 0\n")) == SdpEq::Equal);
    CHECK(sdp_equal(parse_sdp_program("lit 1 0\n"), parse_sdp_program("lit 2 0\n")) ==
          SdpEq::Unequal);
    CHECK(sdp_equal(parse_sdp_program("lit 0 -1\nlit 1 0\nmul\nswap\n"),
                    parse_sdp_program("lit 0 0\n")) == SdpEq::Undefined);
}

// growth stays quadratic in the program length (Theorem 2's accounting)
TEST_CASE("sdp circuit growth bound") {
    for (int n = 1; n <= 5; ++n) {
        SdpProgram p = sdp_tower_ladder(n);
        SdpResult r = wp_sdp(p);
        REQUIRE(r.status == SdpStatus::Value);
        std::size_t len = p.size();
        CHECK(r.peak_nodes <= 20 * len * len);
    }
}
