#include <catch2/catch_amalgamated.hpp>

#include "pc/baumslag.hpp"
#include "pc/oracle.hpp"
#include "pc/reference.hpp"

using namespace pc;

namespace {

Word bs(const std::string& text) { return parse_word(text, baumslag_alphabet()); }

// enumerate freely reduced words over {a,A,t,T,b,B} of exactly `len`
void each_reduced_word(int len, const std::function<void(const Word&)>& fn) {
    Word w;
    std::function<void(int)> rec = [&](int left) {
        if (left == 0) {
            fn(w);
            return;
        }
        for (int sym = 0; sym < 3; ++sym) {
            for (int e : {1, -1}) {
                if (!w.empty() && w.back().sym == sym && w.back().exp != e) continue;
                w.push_back({sym, e});
                rec(left - 1);
                w.pop_back();
            }
        }
    };
    rec(len);
}

} // namespace

TEST_CASE("baumslag word parsing") {
    Word w = bs("a");
    REQUIRE(w.size() == 1);
    CHECK(w[0].sym == 0);
    CHECK(w[0].exp == 1);

    w = bs("a^5 t^-2");
    REQUIRE(w.size() == 2);
    CHECK(w[0].exp == 5);
    CHECK(w[1].sym == 1);
    CHECK(w[1].exp == -2);

    w = bs("bAb");
    REQUIRE(w.size() == 3);
    CHECK(w[0].sym == 2);
    CHECK(w[1].exp == -1);
    CHECK(w[2].sym == 2);

    CHECK_THROWS_AS(bs("q"), SyntaxError);
    CHECK_THROWS_AS(bs("a^"), SyntaxError);
}

TEST_CASE("a^5 t^-2 merges to the pair (5, -2)") {
    BaumslagSolver solver;
    CHECK(solver.solve(bs("a^5 t^-2")) == Verdict::Nontrivial);
    REQUIRE(solver.segments().size() == 1);
    const auto& t = solver.segments()[0].t;
    PairValue v = pair_value(solver.circuit(), t.u, t.x, t.k);
    REQUIRE(v.exact);
    CHECK(v.r == Dyadic(5));
    CHECK(v.m == -2);
}

TEST_CASE("britton pinches") {
    SECTION("b a b^-1 = t") {
        CHECK(wp_baumslag("b a B T") == Verdict::Trivial);
    }
    SECTION("b^-1 t b = a") {
        CHECK(wp_baumslag("B t b A") == Verdict::Trivial);
    }
    SECTION("b a b stays unreduced") {
        BsStats s;
        BaumslagSolver solver;
        CHECK(solver.solve(bs("bab"), &s) == Verdict::Nontrivial);
        CHECK(s.tests == 0);
        CHECK(solver.segments().size() == 3);
    }
}

TEST_CASE("wp_baumslag verdicts") {
    SECTION("the defining relator is trivial") {
        CHECK(wp_baumslag("bab^-1aba^-1b^-1a^-2") == Verdict::Trivial);
    }
    SECTION("a alone is not") {
        CHECK(wp_baumslag("a") == Verdict::Nontrivial);
    }
    SECTION("empty word") {
        CHECK(wp_baumslag(Word{}) == Verdict::Trivial);
    }
    SECTION("a^2 A A") {
        CHECK(wp_baumslag("a^2 A A") == Verdict::Trivial);
    }
}

TEST_CASE("tower words") {
    CHECK(baumslag_tower_word(0) == bs("t"));
    CHECK(baumslag_tower_word(1) == bs("btaTB"));
    // T(n) = t^tow(n)
    CHECK(wp_baumslag(concat({baumslag_tower_word(1), bs("T^2")})) == Verdict::Trivial);
    CHECK(wp_baumslag(concat({baumslag_tower_word(3), bs("T^16")})) == Verdict::Trivial);
    CHECK(wp_baumslag(concat({baumslag_tower_word(3), bs("T^15")})) == Verdict::Nontrivial);
    CHECK(wp_baumslag_reference(concat({baumslag_tower_word(3), bs("T^16")})) ==
          RefOutcome::Trivial);
}

TEST_CASE("the t T(6) commutator is trivial") {
    Word t6 = baumslag_tower_word(6);
    Word w = concat({bs("t"), t6, bs("T"), inverse_word(t6)});
    BsStats s;
    CHECK(wp_baumslag(w, &s) == Verdict::Trivial);
    CHECK(s.tests <= 2 * s.letters);
    CHECK(s.successful_tests <= s.letters);
    // far beyond plain big integers
    CHECK(wp_baumslag_reference(w) == RefOutcome::CapExceeded);
}

TEST_CASE("trivial-by-construction words are trivial") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        Word w = gen_trivial_word(GroupName::Baumslag, seed, 60 + seed % 80);
        BsStats s;
        CHECK(wp_baumslag(w, &s) == Verdict::Trivial);
        CHECK(s.tests <= 2 * s.letters);
    }
}

TEST_CASE("agreement with the reference on short words") {
    std::size_t compared = 0;
    for (int len = 0; len <= 5; ++len) {
        each_reduced_word(len, [&](const Word& w) {
            RefOutcome ref = wp_baumslag_reference(w);
            REQUIRE(ref != RefOutcome::CapExceeded);
            Verdict got = wp_baumslag(w);
            CHECK((got == Verdict::Trivial) == (ref == RefOutcome::Trivial));
            ++compared;
        });
    }
    CHECK(compared > 4000);
}

TEST_CASE("agreement with the reference on random words") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 300; ++it) {
        Word w;
        int len = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i)
            w.push_back({static_cast<int>(rng() % 3), (rng() & 1) ? 1 : -1});
        free_reduce(w);
        RefOutcome ref = wp_baumslag_reference(w);
        if (ref == RefOutcome::CapExceeded) continue;
        CHECK((wp_baumslag(w) == Verdict::Trivial) == (ref == RefOutcome::Trivial));
    }
}
