#ifndef PC_HIGMAN_HPP
#define PC_HIGMAN_HPP

#include <cassert>
#include <chrono>
#include <cstdint>
#include <deque>
#include <vector>

#include "pc/baumslag.hpp" // Verdict
#include "pc/circuit.hpp"
#include "pc/treerep.hpp"
#include "pc/triple.hpp"
#include "pc/words.hpp"

namespace pc {

// Word problem of Higman's group H4 = G123 *_F13 G341.  Elements of the
// Baumslag-Solitar pieces G_{p,p+1} are typed triples [u,x,k]_(p,p+1)
// denoting a_{p+1}^x a_p^u a_{p+1}^k (indices mod 4, 0-based here: type p
// covers generators a_{p+1} in 1-based speak).  The solver keeps one power
// circuit in tree representation and a sequence of intervals of typed
// triples, separated into a Britton-reduced prefix and an untested suffix.
//
// Every basic operation (multiplication, the two swaps, splitting) clones
// the involved markings, works on the clones with the graph operations, and
// reintegrates them with one ExtendTree call; weights never grow.

struct TypedTriple {
    Triple t;
    int type = 0; // p in Z/4Z
};

struct Interval {
    std::vector<TypedTriple> ts;
    int itype = 0; // 0: triples typed {0,1} (G123);  1: typed {2,3} (G341)
};

struct TypeMismatch : std::logic_error {
    explicit TypeMismatch(const std::string& w) : std::logic_error(w) {}
};

struct HigmanStats {
    std::size_t triples = 0;
    std::size_t intervals_final = 0;
    std::size_t membership_tests = 0;
    std::size_t basic_ops = 0;
    std::size_t peak_nodes = 0;
    double time_ms = 0;
};

struct MembershipResult {
    bool in_f13 = false;
    bool is_identity = false;
};

class HigmanSolver {
public:
    HigmanSolver() {
        MakeTreeResult mt = make_tree(c_);
        tree_.emplace(std::move(*mt.tree));
    }

    // ---- main data structure ------------------------------------------------

    PowerCircuit& circuit() { return c_; }
    TreeRep& tree() { return *tree_; }

    // a_{type+1}^exp as the typed triple [exp, 0, 0]_(type, type+1),
    // integrated into the tree representation
    TypedTriple literal(int type, long long exp) {
        TypedTriple tt;
        tt.type = ((type % 4) + 4) % 4;
        std::vector<NodeId> basis;
        tt.t.u = binary_marking(c_, basis, exp);
        tt.t.x = c_.new_marking();
        tt.t.k = c_.new_marking();
        if (tree_->extend({tt.t.u, tt.t.x, tt.t.k}) != TreeRep::Outcome::Ok)
            throw std::logic_error("literal lost integrality");
        return tt;
    }

    // Builds the main data structure from a word over a1..a4 and runs the
    // separator algorithm.
    Verdict solve(const Word& word, HigmanStats* stats = nullptr) {
        auto t0 = std::chrono::steady_clock::now();
        stats_ = HigmanStats{};
        std::vector<Interval> ivs;
        for (const Letter& l : word)
            ivs.push_back({{literal(l.sym, l.exp)}, interval_type_of(l.sym)});
        stats_.triples = ivs.size();
        last_rebuild_size_ = std::max<std::size_t>(c_.node_count(), 64);

        Verdict v = separator_loop(ivs);
        stats_.time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (stats) *stats = stats_;
        return v;
    }

    const HigmanStats& stats() const { return stats_; }

    std::size_t weight(const std::vector<Interval>& ivs) const {
        std::size_t w = 0;
        for (const Interval& iv : ivs)
            for (const TypedTriple& tt : iv.ts)
                w += c_.signs(tt.t.u).size() + c_.signs(tt.t.x).size() + c_.signs(tt.t.k).size();
        return w;
    }

    // ---- basic operations (Eqs. (2)-(7)) -------------------------------------

    // Eq. (2): multiplication of equal types.
    TypedTriple h_mul(const TypedTriple& a, const TypedTriple& b) {
        if (a.type != b.type) throw TypeMismatch("h_mul needs equal types");
        // clone the involved markings; all further work happens on clones
        MarkingId zu = c_.clone_marking(a.t.u);
        MarkingId zx = c_.clone_marking(a.t.x);
        MarkingId zk = c_.clone_marking(a.t.k);
        MarkingId zv = c_.clone_marking(b.t.u);
        MarkingId zy = c_.clone_marking(b.t.x);
        MarkingId zl = c_.clone_marking(b.t.k);
        // u 2^-y and v 2^k via arcs into the cloned exponent markings
        for (auto& [p, sp] : c_.signs(zu)) {
            (void)sp;
            for (auto& [q, sq] : c_.signs(zy)) c_.add_arc(p, q, -sq);
        }
        for (auto& [p, sp] : c_.signs(zv)) {
            (void)sp;
            for (auto& [q, sq] : c_.signs(zk)) c_.add_arc(p, q, sq);
        }
        TypedTriple out;
        out.type = a.type;
        out.t.u = c_.add_markings(zu, zv);
        out.t.x = c_.add_markings(zx, zy);
        out.t.k = c_.add_markings(zk, zl);
        for (MarkingId m : {zu, zx, zk, zv, zy, zl}) c_.free_marking(m);
        consume(a.t);
        consume(b.t);
        integrate({out.t.u, out.t.x, out.t.k});
        return out;
    }

    // Eq. (3): [0,x,k]_(p,p+1) = [x+k,0,0]_(p+1,p+2); needs u = 0.
    TypedTriple h_swap_up(const TypedTriple& a) {
        if (tree_->sign_of(a.t.u) != 0)
            throw PreconditionViolated("h_swap_up needs u = 0");
        MarkingId zx = c_.clone_marking(a.t.x);
        MarkingId zk = c_.clone_marking(a.t.k);
        TypedTriple out;
        out.type = (a.type + 1) % 4;
        out.t.u = c_.add_markings(zx, zk);
        out.t.x = c_.new_marking();
        out.t.k = c_.new_marking();
        for (MarkingId m : {zx, zk}) c_.free_marking(m);
        consume(a.t);
        integrate({out.t.u, out.t.x, out.t.k});
        return out;
    }

    // Eqs. (4)/(5): [z,0,0]_(p+1,p+2) = [0,0,z] or [0,z,0]_(p,p+1); needs
    // x = k = 0.  Pure bookkeeping: the z marking moves slots.
    TypedTriple h_swap_down(const TypedTriple& a) {
        if (!c_.signs(a.t.x).empty() || !c_.signs(a.t.k).empty())
            throw PreconditionViolated("h_swap_down needs x = k = 0");
        int zsign = tree_->sign_of(a.t.u);
        TypedTriple out;
        out.type = (a.type + 3) % 4;
        out.t.u = fresh_marking();
        if (zsign < 0) {
            out.t.x = a.t.u;
            out.t.k = fresh_marking();
        } else {
            out.t.x = fresh_marking();
            out.t.k = a.t.u;
        }
        tree_->release_marking(a.t.x);
        tree_->release_marking(a.t.k);
        c_.free_marking(a.t.x);
        c_.free_marking(a.t.k);
        ++stats_.basic_ops;
        return out;
    }

    // Eqs. (6)/(7).  Low types split as [u 2^x,0,0] * [0,x,k], high types as
    // [0,x,k] * [u 2^-k,0,0]; the fresh power marking is built from clones.
    // Returns false when the power is not integral (the NotSplittable case).
    bool h_split(const TypedTriple& a, TypedTriple& left, TypedTriple& right) {
        bool low = is_low_type(a.type);
        if (!shift_integral(a.t.u, low ? a.t.x : a.t.k, /*negate_exp=*/!low)) return false;
        MarkingId z = power_marking(a.t.u, low ? a.t.x : a.t.k, /*negate_exp=*/!low);
        TypedTriple pow{{z, fresh_marking(), fresh_marking()}, a.type};
        TypedTriple rest{{fresh_marking(), a.t.x, a.t.k}, a.type};
        tree_->release_marking(a.t.u);
        c_.free_marking(a.t.u);
        if (low) {
            left = pow;
            right = rest;
        } else {
            left = rest;
            right = pow;
        }
        return true;
    }

    // ---- F13 membership (Lemma 1) ---------------------------------------------

    // Decides epsilon(L) in F13, leaving the interval in the normal form
    // g'_1 ... g'_t of alternating a_p / a_{p+2} powers when the answer is
    // yes (swap_interval retypes it afterwards).  Also reports whether
    // epsilon(L) is the trivial element.
    MembershipResult membership(Interval& iv) {
        ++stats_.membership_tests;
        const int p0 = iv.itype == 0 ? 0 : 2;

        // (a)+(b): merge same-type neighbours left to right and Britton-
        // reduce inside G_{p0..p0+2} = G_{p0,p0+1} *_{<a_{p0+1}>} G_{p0+1,p0+2}.
        // An element of the amalgam beside a neighbour swaps its type and
        // merges, so at most one (then t = 1) survives unmerged.
        std::vector<TypedTriple> out;
        for (TypedTriple cur : iv.ts) {
            for (;;) {
                if (out.empty()) break;
                if (out.back().type == cur.type) {
                    TypedTriple top = out.back();
                    out.pop_back();
                    cur = h_mul(top, cur);
                    continue;
                }
                if (in_amalgam(cur, p0)) {
                    cur = swap_within(cur, p0);
                    continue;
                }
                if (in_amalgam(out.back(), p0)) {
                    out.back() = swap_within(out.back(), p0);
                    continue;
                }
                break;
            }
            out.push_back(cur);
        }
        iv.ts = std::move(out);

        // (c) the h-sequence: with the invariant epsilon(T_j) = h_{j-1} g_j,
        // each step splits into g'_j h_j; h_j lives in <a_{p0+1}> and is kept
        // as a type-p0 triple with u = 0 (absent means h = 1)
        MembershipResult res;
        std::optional<TypedTriple> h;
        const std::size_t t = iv.ts.size();
        for (std::size_t j = 0; j < t; ++j) {
            bool low = iv.ts[j].type == p0;
            if (h) {
                TypedTriple hh = low ? *h : h_swap_up(*h);
                iv.ts[j] = h_mul(hh, iv.ts[j]);
                h.reset();
            }
            TypedTriple& tj = iv.ts[j];
            bool normalized = low ? c_.signs(tj.t.x).empty() && c_.signs(tj.t.k).empty()
                                  : c_.signs(tj.t.u).empty();
            if (normalized) continue; // g'_j = T_j, h_j = 1
            TypedTriple left, right;
            if (!h_split(tj, left, right)) return res; // not in F13; value intact
            tj = left;
            TypedTriple hr = low ? right : h_swap_down(right);
            if (sum_zero(hr.t.x, hr.t.k))
                consume_typed(hr); // h_j = 1
            else
                h = hr;
        }
        if (h) {
            // h_t != 1: not in F13; restore the interval's value
            iv.ts.push_back(*h);
            return res;
        }

        res.in_f13 = true;
        if (t == 0) {
            res.is_identity = true;
        } else if (t == 1) {
            const TypedTriple& g = iv.ts[0];
            if (g.type == p0)
                res.is_identity = tree_->sign_of(g.t.u) == 0;
            else
                res.is_identity = sum_zero(g.t.x, g.t.k);
        }
        return res;
    }

    // The "yes" by-product of Lemma 1: retype a normal-form interval into
    // the other factor, using only the left factors of the splittings.
    void swap_interval(Interval& iv) {
        int p0 = iv.itype == 0 ? 0 : 2;
        for (TypedTriple& tj : iv.ts)
            tj = tj.type == p0 ? h_swap_down(tj) : h_swap_up(tj);
        iv.itype ^= 1;
    }

private:
    // ---- the separator algorithm (section 5.1) -------------------------------

    Verdict separator_loop(std::vector<Interval>& ivs) {
        std::size_t f = 0;
        auto join = [&](std::size_t i) { // append ivs[i+1] to ivs[i]
            Interval& a = ivs[i];
            Interval& b = ivs[i + 1];
            assert(a.itype == b.itype);
            for (TypedTriple& tt : b.ts) a.ts.push_back(tt);
            ivs.erase(ivs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        };
        while (!(ivs.size() >= 1 && f == ivs.size()) && !(f == 0 && ivs.size() <= 1)) {
            maybe_rebuild(ivs);
            if (f == 0) {
                MembershipResult r = membership(ivs[0]);
                if (!r.in_f13) {
                    f = 1;
                } else {
                    if (ivs[0].itype != ivs[1].itype) swap_interval(ivs[0]);
                    join(0);
                }
                continue;
            }
            if (ivs[f].itype == ivs[f - 1].itype) {
                join(f - 1);
                --f;
                continue;
            }
            MembershipResult r = membership(ivs[f]);
            if (!r.in_f13) {
                ++f;
            } else {
                swap_interval(ivs[f]);
                join(f - 1);
                --f;
            }
        }
        stats_.intervals_final = ivs.size();
        if (f == ivs.size() && f >= 1) return Verdict::Nontrivial;
        if (ivs.empty()) return Verdict::Trivial;
        MembershipResult r = membership(ivs[0]);
        return r.in_f13 && r.is_identity ? Verdict::Trivial : Verdict::Nontrivial;
    }

    // ---- helpers ---------------------------------------------------------------

    static int interval_type_of(int type) { return (type == 0 || type == 1) ? 0 : 1; }
    static bool is_low_type(int type) { return type == 0 || type == 2; }

    MarkingId fresh_marking() {
        MarkingId m = c_.new_marking();
        tree_->register_marking(m);
        return m;
    }

    void consume(const Triple& t) {
        for (MarkingId m : {t.u, t.x, t.k}) {
            tree_->release_marking(m);
            c_.free_marking(m);
        }
    }
    void consume_typed(const TypedTriple& tt) { consume(tt.t); }

    // reintegrate fresh clones into the tree representation
    void integrate(const std::vector<MarkingId>& extras) {
        if (tree_->extend(extras) != TreeRep::Outcome::Ok)
            throw std::logic_error("main data structure lost integrality");
        ++stats_.basic_ops;
        stats_.peak_nodes = std::max(stats_.peak_nodes, c_.node_count());
    }

    bool sum_zero(MarkingId x, MarkingId k) const {
        return tree_->compare(tree_->leaf_of(x), tree_->leaf_of(k), /*negate_b=*/true).ord == 0;
    }

    // membership of the amalgamated subgroup <a_{p0+1}> of G_{p0..p0+2}
    bool in_amalgam(const TypedTriple& tt, int p0) const {
        if (tt.type == p0) return tree_->sign_of(tt.t.u) == 0;
        return sum_zero(tt.t.x, tt.t.k) && shift_integral(tt.t.u, tt.t.x, false);
    }

    // rewrite an amalgam element into the other type of its interval
    TypedTriple swap_within(TypedTriple cur, int p0) {
        if (cur.type == p0) return h_swap_up(cur); // [0,x,k] -> [x+k,0,0]_{p0+1}
        return h_swap_down(normalize_power(cur));  // [u,x,k] -> [z,0,0] -> type p0
    }

    // z = u 2^(+-e) integral?  (exponent marking e(X) <= 0 or e(K) >= 0)
    bool shift_integral(MarkingId u, MarkingId exp, bool negate_exp) const {
        TreeRep::Leaf lu = tree_->leaf_of(u);
        if (tree_->sign_of(lu) == 0) return true;
        TreeRep::Leaf lmin = tree_->lambda_leaf(tree_->lowest_marked(lu));
        // require e(Lambda_min) + e(exp) >= 0 resp. e(Lambda_min) - e(exp) >= 0
        CompareResult cr = tree_->compare(lmin, tree_->leaf_of(exp), /*negate_b=*/!negate_exp);
        return cr.ord >= 0;
    }

    // marking of value u 2^(+-e) built from clones, integrated strictly
    MarkingId power_marking(MarkingId u, MarkingId exp, bool negate_exp) {
        MarkingId zu = c_.clone_marking(u);
        MarkingId ze = c_.clone_marking(exp);
        for (auto& [p, sp] : c_.signs(zu)) {
            (void)sp;
            for (auto& [q, sq] : c_.signs(ze)) c_.add_arc(p, q, negate_exp ? -sq : sq);
        }
        c_.free_marking(ze);
        integrate({zu});
        return zu;
    }

    // [u,x,k]_{p} with x+k = 0 and z = u 2^x integral  ->  [z,0,0]_{p}
    TypedTriple normalize_power(const TypedTriple& a) {
        MarkingId z = power_marking(a.t.u, a.t.x, false);
        TypedTriple out{{z, fresh_marking(), fresh_marking()}, a.type};
        consume(a.t);
        return out;
    }

    // copying garbage collection: junk from consumed markings accumulates in
    // the tree part, so rebuild once it dominates
    void maybe_rebuild(std::vector<Interval>& ivs) {
        if (c_.node_count() <= std::max<std::size_t>(512, 3 * last_rebuild_size_)) return;
        std::vector<MarkingId> ms;
        for (Interval& iv : ivs)
            for (TypedTriple& tt : iv.ts) {
                ms.push_back(tt.t.u);
                ms.push_back(tt.t.x);
                ms.push_back(tt.t.k);
            }
        PowerCircuit fresh;
        std::vector<MarkingId> moved = c_.copy_live(fresh, ms);
        tree_.reset();
        c_ = std::move(fresh);
        MakeTreeResult mt = make_tree(c_, moved);
        if (mt.outcome != TreeRep::Outcome::Ok) throw std::logic_error("rebuild lost integrality");
        tree_.emplace(std::move(*mt.tree));
        std::size_t i = 0;
        for (Interval& iv : ivs)
            for (TypedTriple& tt : iv.ts) {
                tt.t.u = moved[i++];
                tt.t.x = moved[i++];
                tt.t.k = moved[i++];
            }
        last_rebuild_size_ = std::max<std::size_t>(c_.node_count(), 64);
        stats_.peak_nodes = std::max(stats_.peak_nodes, c_.node_count());
    }

    PowerCircuit c_;
    std::optional<TreeRep> tree_;
    HigmanStats stats_;
    std::size_t last_rebuild_size_ = 64;
};

inline Verdict wp_higman(const Word& w, HigmanStats* stats = nullptr) {
    HigmanSolver solver;
    return solver.solve(w, stats);
}

inline Verdict wp_higman(const std::string& text, HigmanStats* stats = nullptr) {
    return wp_higman(parse_word(text, higman_alphabet()), stats);
}

} // namespace pc

#endif
