#ifndef PC_ORACLE_HPP
#define PC_ORACLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "pc/circuit.hpp"
#include "pc/dyadic.hpp"

namespace pc {

// Reference side of the library: exact (big-integer) evaluation of circuits
// and markings, plus deterministic generators for property tests.  Nothing
// here is used by the circuit algorithms themselves; the point is to have an
// independent path to the same answers.

constexpr std::uint64_t default_bit_budget = 1u << 20;

enum class EvalKind { Exact, Overflow, Irrational };

struct BigEval {
    EvalKind kind = EvalKind::Exact;
    Dyadic value; // meaningful only when kind == Exact

    bool exact() const { return kind == EvalKind::Exact; }
    static BigEval overflow() { return {EvalKind::Overflow, {}}; }
    static BigEval irrational() { return {EvalKind::Irrational, {}}; }
    static BigEval of(Dyadic d) { return {EvalKind::Exact, std::move(d)}; }
};

enum class PcTest { Yes, No, Indeterminate };

// Memoized bottom-up evaluation of one circuit.  Node values may be
// fractional (2^g with g < 0); they become Irrational once some node's
// successor marking has a fractional value.
class Evaluator {
public:
    explicit Evaluator(const PowerCircuit& c, std::uint64_t bit_budget = default_bit_budget)
        : c_(c), budget_(bit_budget) {}

    BigEval marking_value(const SignMap& m) {
        Dyadic acc;
        for (auto& [p, s] : m) {
            BigEval v = node_value(p);
            if (!v.exact()) return v;
            acc = s > 0 ? acc + v.value : acc - v.value;
            if (acc.bit_size() > budget_) return BigEval::overflow();
        }
        return BigEval::of(acc);
    }

    BigEval marking_value(MarkingId m) { return marking_value(c_.signs(m)); }

    BigEval lambda_value(NodeId p) { return marking_value(c_.lambda(p)); }

    BigEval node_value(NodeId p) {
        auto it = memo_.find(p);
        if (it != memo_.end()) return it->second;
        BigEval lam = lambda_value(p);
        BigEval out;
        if (lam.kind == EvalKind::Overflow) {
            out = BigEval::overflow();
        } else if (lam.kind == EvalKind::Irrational || !lam.value.is_integer()) {
            out = BigEval::irrational();
        } else {
            BigInt g = lam.value.to_integer();
            BigInt mag = boost::multiprecision::abs(g);
            if (mag > budget_ || mag > INT64_MAX) {
                out = BigEval::overflow();
            } else {
                out = BigEval::of(Dyadic::pow2(static_cast<std::int64_t>(g)));
            }
        }
        memo_.emplace(p, out);
        return out;
    }

    // Integrality test per the equivalence: a dag is a power circuit iff
    // e(Lambda_P) >= 0 for all nodes.  Scanning bottom-up, the first
    // violation always shows as a negative (or fractional) lambda value.
    PcTest is_power_circuit() {
        bool indeterminate = false;
        for (NodeId p : c_.topological_order()) {
            BigEval lam = lambda_value(p);
            if (lam.kind == EvalKind::Overflow) {
                indeterminate = true;
                continue;
            }
            if (lam.kind == EvalKind::Irrational) return PcTest::No;
            if (!lam.value.is_integer() || lam.value.sgn() < 0) return PcTest::No;
        }
        return indeterminate ? PcTest::Indeterminate : PcTest::Yes;
    }

private:
    struct IdLess {
        bool operator()(NodeId a, NodeId b) const { return a < b; }
    };
    const PowerCircuit& c_;
    std::uint64_t budget_;
    std::map<NodeId, BigEval, IdLess> memo_;
};

inline BigEval eval_exact(const PowerCircuit& c, MarkingId m,
                          std::uint64_t bit_budget = default_bit_budget) {
    return Evaluator(c, bit_budget).marking_value(m);
}

// The pair (u 2^x, x+k) a triple [u,x,k] denotes, evaluated exactly.
struct PairValue {
    bool exact = false;
    Dyadic r;
    BigInt m;
};

inline PairValue pair_value(const PowerCircuit& c, MarkingId u, MarkingId x, MarkingId k,
                            std::uint64_t bit_budget = default_bit_budget) {
    Evaluator ev(c, bit_budget);
    BigEval bu = ev.marking_value(u), bx = ev.marking_value(x), bk = ev.marking_value(k);
    PairValue out;
    if (!bu.exact() || !bx.exact() || !bk.exact()) return out;
    if (!bx.value.is_integer() || !bk.value.is_integer()) return out;
    BigInt xi = bx.value.to_integer();
    if (boost::multiprecision::abs(xi) > bit_budget) return out;
    out.exact = true;
    out.r = bu.value.times_pow2(xi.convert_to<std::int64_t>());
    out.m = xi + bk.value.to_integer();
    return out;
}

// ---- generators ---------------------------------------------------------

// Random dag over a random topological order; arcs point from later nodes to
// earlier ones, so the result is acyclic by construction.  It may or may not
// be a power circuit (negative arcs show up with probability `neg`).  Same
// seed, same circuit, byte for byte.
inline PowerCircuit gen_random_circuit(std::uint64_t seed, std::size_t nodes, double density,
                                       std::size_t n_markings = 0, double neg = 0.15) {
    std::mt19937_64 rng(seed);
    auto chance = [&](double p) { return (rng() >> 11) < p * 9007199254740992.0; };
    PowerCircuit c;
    std::vector<NodeId> ids;
    for (std::size_t i = 0; i < nodes; ++i) {
        SignMap succ;
        for (NodeId q : ids)
            if (chance(density)) succ[q] = chance(neg) ? -1 : 1;
        ids.push_back(c.add_node(succ));
    }
    for (std::size_t k = 0; k < n_markings; ++k) {
        SignMap sm;
        for (NodeId q : ids)
            if (chance(0.5)) sm[q] = (rng() & 1) ? 1 : -1;
        c.new_marking(sm);
    }
    return c;
}

} // namespace pc

#endif
