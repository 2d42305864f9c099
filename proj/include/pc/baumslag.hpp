#ifndef PC_BAUMSLAG_HPP
#define PC_BAUMSLAG_HPP

#include <cassert>
#include <chrono>
#include <cstdint>
#include <vector>

#include "pc/circuit.hpp"
#include "pc/treerep.hpp"
#include "pc/triple.hpp"
#include "pc/words.hpp"

namespace pc {

// Word problem of the Baumslag group G(1,2) = <a,b | a^(a^b) = a^2>, solved
// by left-to-right Britton reduction over triples.  Between stable letters
// b^{+-1}, elements of BS(1,2) = <a,t> are triples [U,X,K] kept under the
// section-4 invariants:
//   i)   U, X, K have pairwise disjoint supports,
//   ii)  U is a source,
//   iii) all arcs into sigma(X) u sigma(K) start in sigma(U),
//   iv)  arcs from U into X carry the sign opposite to X's.
// Multiplication then never clones, and both pinch replacements work on the
// original circuit: u = 0 deletes the source U, the x+k = 0 case flips the
// U -> X arcs to their complement.  Pinch tests run on a reduced throwaway
// copy of the live part of the circuit.

enum class Verdict { Trivial, Nontrivial };

struct BsStats {
    std::size_t letters = 0;
    std::size_t tests = 0;
    std::size_t successful_tests = 0;
    std::size_t peak_nodes = 0;
    double time_ms = 0;
};

class BaumslagSolver {
public:
    struct Seg {
        int b; // sign of the stable letter opening this segment; 0 for the head
        Triple t;
    };

    explicit BaumslagSolver(bool check_invariants = true) : check_(check_invariants) {}

    Verdict solve(const Word& word, BsStats* stats = nullptr) {
        auto t0 = std::chrono::steady_clock::now();
        st_.clear();
        st_.push_back({0, identity_triple(c_)});
        BsStats s;
        for (const Letter& l : word) {
            if (l.sym == 2) { // b
                int step = l.exp > 0 ? 1 : -1;
                for (long long i = 0; i != l.exp; i += step) {
                    handle_b(step, s);
                    ++s.letters;
                }
            } else {
                std::size_t before = c_.node_count();
                Triple lit = l.sym == 0 ? int_to_triple(c_, l.exp) : exponent_triple(c_, l.exp);
                (void)before;
                merge_into_top(lit);
                ++s.letters;
            }
            s.peak_nodes = std::max(s.peak_nodes, c_.node_count());
        }
        Verdict v;
        if (st_.size() > 1) {
            v = Verdict::Nontrivial; // Britton's lemma: stable letters remain
        } else {
            v = triple_is_identity(c_, st_[0].t) ? Verdict::Trivial : Verdict::Nontrivial;
        }
        s.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
        if (stats) *stats = s;
        return v;
    }

    const PowerCircuit& circuit() const { return c_; }

    // Britton-reduced segment list after solve(): alternating stable letters
    // and BS(1,2) elements.
    const std::vector<Seg>& segments() const { return st_; }

private:
    void merge_into_top(const Triple& rhs) {
        std::size_t before = c_.node_count();
        st_.back().t = triple_mul(c_, st_.back().t, rhs);
        assert(c_.node_count() == before && "invariants make cloning unnecessary");
        (void)before;
        if (check_) check_invariants(st_.back().t);
    }

    void handle_b(int eps, BsStats& s) {
        Seg& top = st_.back();
        if (top.b != -eps) {
            st_.push_back({eps, identity_triple(c_)});
            return;
        }
        // candidate pinch b^{-eps} T b^{eps}
        ++s.tests;
        bool ok;
        int zsign = 0;
        if (top.b == 1)
            ok = test_case2(top.t, zsign); // b T b^-1 with T = a^z
        else
            ok = test_case1(top.t); // b^-1 T b with T = t^s
        if (!ok) {
            st_.push_back({eps, identity_triple(c_)});
            return;
        }
        ++s.successful_tests;
        Triple repl = top.t;
        int which = top.b;
        st_.pop_back();
        if (which == 1)
            replace_case2(repl, zsign);
        else
            replace_case1(repl);
        if (check_) check_invariants(repl);
        merge_into_top(repl);
    }

    // reduced throwaway copy of the triple's live region
    struct Reduced {
        PowerCircuit copy;
        std::vector<MarkingId> ms;
        std::optional<TreeRep> tree;
    };
    Reduced reduce_copy(const Triple& t) {
        Reduced r;
        r.ms = c_.copy_live(r.copy, {t.u, t.x, t.k});
        MakeTreeResult mt = make_tree(r.copy, r.ms, /*allow_fractional=*/true);
        if (mt.outcome != TreeRep::Outcome::Ok)
            throw std::logic_error("solver circuit lost integrality");
        r.tree.emplace(std::move(*mt.tree));
        return r;
    }

    bool test_case1(const Triple& t) { // u = 0?
        Reduced r = reduce_copy(t);
        return r.tree->sign_of(r.ms[0]) == 0;
    }

    bool test_case2(const Triple& t, int& zsign) { // x+k = 0 and u 2^x integral?
        Reduced r = reduce_copy(t);
        CompareResult cr = r.tree->compare(r.tree->leaf_of(r.ms[1]), r.tree->leaf_of(r.ms[2]),
                                           /*negate_b=*/true);
        if (cr.ord != 0) return false;
        if (!pow2_shift_integral(*r.tree, r.ms[0], r.ms[1])) return false;
        zsign = r.tree->sign_of(r.ms[0]);
        return true;
    }

    // b^-1 t^(x+k) b = a^(x+k): drop the source U; X u K becomes the new U
    void replace_case1(Triple& t) {
        std::set<NodeId> sup = c_.support(t.u);
        c_.free_marking(t.u);
        for (NodeId p : sup) c_.delete_node(p); // invariant ii: no incoming arcs
        t.u = c_.add_markings(t.x, t.k);
        c_.free_marking(t.x);
        c_.free_marking(t.k);
        t.x = c_.new_marking();
        t.k = c_.new_marking();
        assert(c_.is_source(t.u) && "invariant iii makes the promoted marking a source");
    }

    // b a^z b^-1 = t^z with z = u 2^x: flip the U -> X arcs to the
    // complement, which multiplies every U-node by 2^x without new nodes
    void replace_case2(Triple& t, int zsign) {
        const SignMap xs = c_.signs(t.x);
        for (auto& [p, sp] : SignMap(c_.signs(t.u))) {
            (void)sp;
            for (auto& [q, sq] : xs) {
                int cur = c_.arc(p, q);
                if (cur != 0) {
                    assert(cur == -sq && "invariant iv");
                    c_.remove_arc(p, q);
                } else {
                    c_.add_arc(p, q, sq);
                }
            }
        }
        MarkingId z = t.u;
        c_.free_marking(t.x);
        c_.free_marking(t.k);
        t.u = c_.new_marking();
        if (zsign < 0) {
            t.x = z;
            t.k = c_.new_marking();
        } else {
            t.x = c_.new_marking();
            t.k = z;
        }
    }

    void check_invariants(const Triple& t) const {
        const SignMap &us = c_.signs(t.u), &xs = c_.signs(t.x), &ks = c_.signs(t.k);
        for (auto& [p, s] : us) assert(xs.find(p) == xs.end() && ks.find(p) == ks.end());
        for (auto& [p, s] : xs) assert(ks.find(p) == ks.end());
        assert(c_.is_source(t.u));
        for (const SignMap* m : {&xs, &ks})
            for (auto& [q, s] : *m)
                for (NodeId src : c_.preds(q)) assert(us.find(src) != us.end());
        for (auto& [p, s] : us)
            for (auto& [q, sq] : xs) assert(c_.arc(p, q) == 0 || c_.arc(p, q) == -sq);
        (void)t;
    }

    PowerCircuit c_;
    std::vector<Seg> st_;
    bool check_;
};

inline Verdict wp_baumslag(const Word& w, BsStats* stats = nullptr, bool check = true) {
    BaumslagSolver solver(check);
    return solver.solve(w, stats);
}

inline Verdict wp_baumslag(const std::string& text, BsStats* stats = nullptr) {
    return wp_baumslag(parse_word(text, baumslag_alphabet()), stats);
}

} // namespace pc

#endif
