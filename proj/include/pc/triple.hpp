#ifndef PC_TRIPLE_HPP
#define PC_TRIPLE_HPP

#include <cctype>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pc/circuit.hpp"
#include "pc/dyadic.hpp"
#include "pc/treerep.hpp"

namespace pc {

// A triple [u,x,k] denotes the pair (u 2^x, x+k) of the semidirect product
// Z[1/2] x| Z, with e(X) <= 0 <= e(K).  All three markings live in one
// circuit and have pairwise disjoint supports.

struct Triple {
    MarkingId u, x, k;
};

inline Triple identity_triple(PowerCircuit& c) {
    return {c.new_marking(), c.new_marking(), c.new_marking()};
}

// Signed binary digits of n over the basis of Example 1 (e(P_i) = 2^i);
// the basis is created on demand and shared within the circuit via `basis`.
inline MarkingId binary_marking(PowerCircuit& c, std::vector<NodeId>& basis, const BigInt& n) {
    BigInt a = boost::multiprecision::abs(n);
    int sign = n < 0 ? -1 : 1;
    SignMap sm;
    for (int i = 0; a != 0; ++i, a >>= 1) {
        if (!boost::multiprecision::bit_test(a, 0)) continue;
        while (basis.size() <= static_cast<std::size_t>(i)) {
            SignMap lam;
            std::size_t j = basis.size();
            for (int b = 0; (std::size_t(1) << b) <= j; ++b)
                if (j & (std::size_t(1) << b)) lam[basis[b]] = 1;
            basis.push_back(c.add_node(lam));
        }
        sm[basis[i]] = sign;
    }
    MarkingId m = c.new_marking(sm);
    if (c.is_source(m)) return m;
    // keep the solver invariants: the working markings are sources
    MarkingId cl = c.clone_marking(m);
    c.free_marking(m);
    return cl;
}

// [n, 0, 0] over a fresh binary basis inside c.
inline Triple int_to_triple(PowerCircuit& c, const BigInt& n) {
    std::vector<NodeId> basis;
    return {binary_marking(c, basis, n), c.new_marking(), c.new_marking()};
}

// [0, s, 0] for s < 0, else [0, 0, s]: the pair (0, s), i.e. t^s.
inline Triple exponent_triple(PowerCircuit& c, const BigInt& s) {
    std::vector<NodeId> basis;
    MarkingId m = binary_marking(c, basis, s);
    if (s < 0) return {c.new_marking(), m, c.new_marking()};
    return {c.new_marking(), c.new_marking(), m};
}

// Section 3 multiplication [u,x,k][v,y,l] = [u 2^-y + v 2^k, x+y, k+l].
// The operand triples are consumed.  Under the solver invariants (disjoint
// supports, sources, arcs only out of U) this adds no nodes at all; the
// general case clones at most |sigma(u)| + |sigma(v)| nodes via mul_pow2.
inline Triple triple_mul(PowerCircuit& c, const Triple& a, const Triple& b) {
    MarkingId yneg = c.negate_marking(b.x);
    MarkingId zu = c.mul_pow2(a.u, yneg);
    c.free_marking(yneg);
    MarkingId zv = c.mul_pow2(b.u, a.k);
    Triple out;
    out.u = c.add_markings(zu, zv);
    out.x = c.add_markings(a.x, b.x);
    out.k = c.add_markings(a.k, b.k);
    c.free_marking(zu);
    c.free_marking(zv);
    c.free_marking(a.u);
    c.free_marking(a.x);
    c.free_marking(a.k);
    c.free_marking(b.u);
    c.free_marking(b.x);
    c.free_marking(b.k);
    return out;
}

// (r,m)^-1 = (-r 2^-m, -m): [u,x,k]^-1 = [-u, -k, -x].
inline Triple triple_inverse(PowerCircuit& c, const Triple& a) {
    Triple out;
    out.u = c.negate_marking(a.u);
    out.x = c.negate_marking(a.k);
    out.k = c.negate_marking(a.x);
    c.free_marking(a.u);
    c.free_marking(a.x);
    c.free_marking(a.k);
    return out;
}

// Integrality of z = u 2^x on a reduced circuit: the remapped U is compact,
// so ord_2(u) is the exponent of its lowest marked node and z is an integer
// iff e(Lambda_min) + e(X) >= 0.
inline bool pow2_shift_integral(TreeRep& t, MarkingId u, MarkingId x) {
    TreeRep::Leaf lu = t.leaf_of(u);
    if (t.sign_of(lu) == 0) return true; // z = 0
    TreeRep::Leaf lmin = t.lambda_leaf(t.lowest_marked(lu));
    CompareResult cr = t.compare(lmin, t.leaf_of(x), /*negate_b=*/true);
    return cr.ord >= 0;
}

enum class SwapStatus { Ok, Undefined };

// Partial swap (u 2^x, x+k) -> (x+k, u 2^x), defined when z = u 2^x is an
// integer.  For z >= 0 the result is [x+k, 0, z]; for z < 0 the first slot
// must absorb the 2^z factor of the triple convention, so the new u-marking
// carries (x+k) 2^-z and the result is [(x+k) 2^-z, z, 0].  Requires the
// circuit reduced with the triple's markings registered; the tree
// representation is stale afterwards and must be discarded by the caller.
inline SwapStatus triple_swap(PowerCircuit& c, TreeRep& t, Triple& tr) {
    if (!pow2_shift_integral(t, tr.u, tr.x)) return SwapStatus::Undefined;
    int zsign = t.sign_of(t.leaf_of(tr.u));
    MarkingId z = c.mul_pow2(tr.u, tr.x); // clones u, so x and k stay intact
    MarkingId head = c.add_markings(tr.x, tr.k);
    c.free_marking(tr.u);
    c.free_marking(tr.x);
    c.free_marking(tr.k);
    if (zsign < 0) {
        MarkingId zneg = c.negate_marking(z);
        tr.u = c.mul_pow2(head, zneg);
        c.free_marking(zneg);
        c.free_marking(head);
        tr.x = z;
        tr.k = c.new_marking();
    } else {
        tr.u = head;
        tr.x = c.new_marking();
        tr.k = z;
    }
    return SwapStatus::Ok;
}

// ---- the word problem of the algebra (Theorem 2) --------------------------

struct SdpInstr {
    enum class Op { Lit, Mul, Swap };
    Op op = Op::Mul;
    BigInt u, m; // Lit only
};
using SdpProgram = std::vector<SdpInstr>;

// One stack entry: a triple in its own circuit.
struct SdpElement {
    PowerCircuit circuit;
    Triple t;
};

inline SdpElement sdp_literal(const BigInt& u, const BigInt& m) {
    SdpElement e;
    std::vector<NodeId> basis;
    e.t.u = binary_marking(e.circuit, basis, u);
    std::vector<NodeId> basis2;
    MarkingId mm = binary_marking(e.circuit, basis2, m);
    if (m < 0) {
        e.t.x = mm;
        e.t.k = e.circuit.new_marking();
    } else {
        e.t.x = e.circuit.new_marking();
        e.t.k = mm;
    }
    // (u, 0)(0, m) = (u, m): fold the two parts into one triple
    if (m < 0) {
        // [u,0,0][0,m,0] = [u 2^-m, m, 0]: multiply instead of hand-shifting
        Triple a{e.t.u, e.circuit.new_marking(), e.circuit.new_marking()};
        Triple b{e.circuit.new_marking(), e.t.x, e.t.k};
        e.t = triple_mul(e.circuit, a, b);
    }
    return e;
}

// Disjoint union: moves `src` (live part) into `dst`'s circuit.
inline Triple absorb_triple(PowerCircuit& dst, const SdpElement& src) {
    auto ms = src.circuit.copy_live(dst, {src.t.u, src.t.x, src.t.k});
    return {ms[0], ms[1], ms[2]};
}

enum class SdpStatus { Value, Undefined, Malformed };

struct SdpResult {
    SdpStatus status = SdpStatus::Malformed;
    std::unique_ptr<PowerCircuit> circuit; // engaged when status == Value
    Triple t;
    std::size_t peak_nodes = 0;
};

inline SdpResult wp_sdp(const SdpProgram& prog) {
    SdpResult res;
    std::vector<std::unique_ptr<SdpElement>> stack;
    std::size_t peak = 0;
    auto note_peak = [&] {
        std::size_t n = 0;
        for (auto& e : stack) n += e->circuit.node_count();
        peak = std::max(peak, n);
    };
    for (const SdpInstr& ins : prog) {
        switch (ins.op) {
        case SdpInstr::Op::Lit: {
            auto e = std::make_unique<SdpElement>(sdp_literal(ins.u, ins.m));
            stack.push_back(std::move(e));
            break;
        }
        case SdpInstr::Op::Mul: {
            if (stack.size() < 2) return res;
            auto b = std::move(stack.back());
            stack.pop_back();
            auto a = std::move(stack.back());
            stack.pop_back();
            Triple tb = absorb_triple(a->circuit, *b);
            a->t = triple_mul(a->circuit, a->t, tb);
            stack.push_back(std::move(a));
            break;
        }
        case SdpInstr::Op::Swap: {
            if (stack.empty()) return res;
            SdpElement& e = *stack.back();
            MakeTreeResult r =
                make_tree(e.circuit, {e.t.u, e.t.x, e.t.k}, /*allow_fractional=*/true);
            if (r.outcome != TreeRep::Outcome::Ok)
                throw std::logic_error("sdp circuit lost integrality");
            if (triple_swap(e.circuit, *r.tree, e.t) == SwapStatus::Undefined) {
                res.status = SdpStatus::Undefined;
                return res;
            }
            break;
        }
        }
        note_peak();
    }
    if (stack.size() != 1) return res;
    res.status = SdpStatus::Value;
    res.circuit = std::make_unique<PowerCircuit>(std::move(stack.back()->circuit));
    res.t = stack.back()->t;
    res.peak_nodes = peak;
    return res;
}

// Is the final triple the identity pair (0, 0)?  Reduces in place.
inline bool triple_is_identity(PowerCircuit& c, Triple& t) {
    MakeTreeResult r = make_tree(c, {t.u, t.x, t.k}, /*allow_fractional=*/true);
    if (r.outcome != TreeRep::Outcome::Ok) throw std::logic_error("lost integrality");
    if (r.tree->sign_of(t.u) != 0) return false;
    CompareResult cr = r.tree->compare(r.tree->leaf_of(t.x), r.tree->leaf_of(t.k), true);
    return cr.ord == 0;
}

enum class SdpEq { Equal, Unequal, Undefined };

inline SdpEq sdp_equal(const SdpProgram& p1, const SdpProgram& p2) {
    SdpResult a = wp_sdp(p1), b = wp_sdp(p2);
    if (a.status == SdpStatus::Malformed || b.status == SdpStatus::Malformed)
        throw std::invalid_argument("malformed sdp program");
    if (a.status == SdpStatus::Undefined || b.status == SdpStatus::Undefined)
        return SdpEq::Undefined;
    SdpElement be{std::move(*b.circuit), b.t};
    Triple tb = absorb_triple(*a.circuit, be);
    Triple quot = triple_mul(*a.circuit, a.t, triple_inverse(*a.circuit, tb));
    return triple_is_identity(*a.circuit, quot) ? SdpEq::Equal : SdpEq::Unequal;
}

// ---- program text -----------------------------------------------------------

// One instruction per line: `lit <u> <m>`, `mul`, `swap`; blank lines and
// `#` comments ignored.
inline SdpProgram parse_sdp_program(const std::string& text) {
    SdpProgram out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') continue;
        if (tok == "mul") {
            out.push_back({SdpInstr::Op::Mul, 0, 0});
        } else if (tok == "swap") {
            out.push_back({SdpInstr::Op::Swap, 0, 0});
        } else if (tok == "lit") {
            std::string su, sm;
            if (!(ls >> su >> sm)) throw std::invalid_argument("lit needs two integers");
            out.push_back({SdpInstr::Op::Lit, BigInt(su), BigInt(sm)});
        } else {
            throw std::invalid_argument("unknown sdp instruction: " + tok);
        }
    }
    return out;
}

// The conjugation ladder of the swap-tower identity: starting from (1,0),
// n rounds of s((0,tow(i))(1,0)(0,-tow(i))) produce (0, tow(n)).  The
// literals only go up to tow(n-1), so n <= 6 stays writable.
inline SdpProgram sdp_tower_ladder(int n) {
    SdpProgram p;
    p.push_back({SdpInstr::Op::Lit, 1, 0});
    p.push_back({SdpInstr::Op::Swap, 0, 0}); // (0, tow(0))
    BigInt tow = 1;
    for (int i = 0; i < n; ++i) {
        p.push_back({SdpInstr::Op::Lit, 1, 0});
        p.push_back({SdpInstr::Op::Mul, 0, 0});
        p.push_back({SdpInstr::Op::Lit, 0, -tow});
        p.push_back({SdpInstr::Op::Mul, 0, 0});
        p.push_back({SdpInstr::Op::Swap, 0, 0}); // (0, tow(i+1))
        if (i + 1 < n) tow = BigInt(1) << static_cast<unsigned>(tow.convert_to<std::uint64_t>());
    }
    return p;
}

} // namespace pc

#endif
