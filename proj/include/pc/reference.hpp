#ifndef PC_REFERENCE_HPP
#define PC_REFERENCE_HPP

#include <cstdint>
#include <vector>

#include "pc/dyadic.hpp"
#include "pc/words.hpp"

namespace pc {

// Reference solvers over plain big integers.  Same Britton-reduction control
// flow as the circuit solvers, but the arithmetic layer is exact integer
// triples (u, x, k) with x <= 0 <= k — no compression, so exponents beyond
// the cap end the run with CapExceeded.

enum class RefOutcome { Trivial, Nontrivial, CapExceeded };

constexpr std::uint64_t default_exp_cap = 1u << 16;

namespace detail {

struct CapHit {};

struct RefTriple {
    BigInt u, x, k; // x <= 0 <= k
};

inline void ref_check(const BigInt& v, std::uint64_t cap) {
    if (v != 0 && boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1 > cap)
        throw CapHit{};
}

inline BigInt shifted(const BigInt& u, const BigInt& amount, std::uint64_t cap) {
    if (u == 0) return 0;
    if (amount > static_cast<std::int64_t>(cap)) throw CapHit{};
    BigInt out = u << amount.convert_to<unsigned>();
    ref_check(out, cap);
    return out;
}

// [u,x,k][v,y,l] = [u 2^-y + v 2^k, x+y, k+l]
inline RefTriple ref_mul(const RefTriple& a, const RefTriple& b, std::uint64_t cap) {
    RefTriple out;
    out.u = shifted(a.u, -b.x, cap) + shifted(b.u, a.k, cap);
    ref_check(out.u, cap);
    out.x = a.x + b.x;
    out.k = a.k + b.k;
    ref_check(out.x, cap);
    ref_check(out.k, cap);
    return out;
}

inline bool ref_shift_integral(const BigInt& u, const BigInt& x) {
    if (u == 0 || x >= 0) return true;
    return boost::multiprecision::lsb(boost::multiprecision::abs(u)) >= -x;
}

inline BigInt ref_shift(const BigInt& u, const BigInt& x, std::uint64_t cap) {
    if (u == 0) return 0;
    if (x >= 0) return shifted(u, x, cap);
    return u >> (-x).convert_to<unsigned>();
}

} // namespace detail

inline RefOutcome wp_baumslag_reference(const Word& word,
                                        std::uint64_t exp_cap = default_exp_cap) {
    using namespace detail;
    try {
        struct Seg {
            int b;
            RefTriple t;
        };
        std::vector<Seg> st{{0, {0, 0, 0}}};
        auto lit = [&](const Letter& l) -> RefTriple {
            if (l.sym == 0) return {l.exp, 0, 0};
            if (l.exp < 0) return {0, l.exp, 0};
            return {0, 0, l.exp};
        };
        for (const Letter& l : word) {
            if (l.sym != 2) {
                ref_check(BigInt(l.exp), exp_cap);
                st.back().t = ref_mul(st.back().t, lit(l), exp_cap);
                continue;
            }
            int step = l.exp > 0 ? 1 : -1;
            for (long long i = 0; i != l.exp; i += step) {
                Seg& top = st.back();
                if (top.b != -step) {
                    st.push_back({step, {0, 0, 0}});
                    continue;
                }
                RefTriple& t = top.t;
                bool ok;
                RefTriple repl{0, 0, 0};
                if (top.b == 1) { // b a^z b^-1 = t^z
                    ok = t.x + t.k == 0 && ref_shift_integral(t.u, t.x);
                    if (ok) {
                        BigInt z = ref_shift(t.u, t.x, exp_cap);
                        repl = z < 0 ? RefTriple{0, z, 0} : RefTriple{0, 0, z};
                    }
                } else { // b^-1 t^s b = a^s
                    ok = t.u == 0;
                    if (ok) repl = {t.x + t.k, 0, 0};
                }
                if (!ok) {
                    st.push_back({step, {0, 0, 0}});
                    continue;
                }
                st.pop_back();
                st.back().t = ref_mul(st.back().t, repl, exp_cap);
            }
        }
        if (st.size() > 1) return RefOutcome::Nontrivial;
        const RefTriple& t = st[0].t;
        return (t.u == 0 && t.x + t.k == 0) ? RefOutcome::Trivial : RefOutcome::Nontrivial;
    } catch (detail::CapHit&) {
        return RefOutcome::CapExceeded;
    }
}

// ---- Higman reference ------------------------------------------------------

namespace detail {

struct RefTyped {
    RefTriple t;
    int type = 0; // p in Z/4Z
};
struct RefInterval {
    std::vector<RefTyped> ts;
    int itype = 0;
};

inline bool ref_in_amalgam(const RefTyped& g, int p0) {
    if (g.type == p0) return g.t.u == 0;
    return g.t.x + g.t.k == 0 && ref_shift_integral(g.t.u, g.t.x);
}

inline RefTyped ref_swap_within(const RefTyped& g, int p0, std::uint64_t cap) {
    if (g.type == p0) return {{g.t.x + g.t.k, 0, 0}, (g.type + 1) % 4};
    BigInt z = ref_shift(g.t.u, g.t.x, cap);
    if (z < 0) return {{0, z, 0}, (g.type + 3) % 4};
    return {{0, 0, z}, (g.type + 3) % 4};
}

struct RefMembership {
    bool in_f13 = false;
    bool is_identity = false;
};

inline RefMembership ref_membership(RefInterval& iv, std::uint64_t cap) {
    const int p0 = iv.itype == 0 ? 0 : 2;
    std::vector<RefTyped> out;
    for (RefTyped cur : iv.ts) {
        for (;;) {
            if (out.empty()) break;
            if (out.back().type == cur.type) {
                RefTyped top = out.back();
                out.pop_back();
                cur = {ref_mul(top.t, cur.t, cap), cur.type};
                continue;
            }
            if (ref_in_amalgam(cur, p0)) {
                cur = ref_swap_within(cur, p0, cap);
                continue;
            }
            if (ref_in_amalgam(out.back(), p0)) {
                out.back() = ref_swap_within(out.back(), p0, cap);
                continue;
            }
            break;
        }
        out.push_back(cur);
    }
    iv.ts = std::move(out);

    RefMembership res;
    bool have_h = false;
    BigInt h = 0; // exponent of a_{p0+1}
    const std::size_t t = iv.ts.size();
    for (std::size_t j = 0; j < t; ++j) {
        bool low = iv.ts[j].type == p0;
        if (have_h) {
            RefTyped hh = low ? RefTyped{{0, 0, h}, p0} : RefTyped{{h, 0, 0}, (p0 + 1) % 4};
            if (h < 0 && low) hh.t = {0, h, 0};
            iv.ts[j] = {ref_mul(hh.t, iv.ts[j].t, cap), iv.ts[j].type};
            have_h = false;
        }
        RefTriple& tj = iv.ts[j].t;
        if (low) {
            if (!ref_shift_integral(tj.u, tj.x)) return res;
            BigInt z = ref_shift(tj.u, tj.x, cap);
            BigInt hexp = tj.x + tj.k;
            tj = {z, 0, 0};
            if (hexp != 0) {
                h = hexp;
                have_h = true;
            }
        } else {
            BigInt negk = -tj.k;
            if (!ref_shift_integral(tj.u, negk)) return res;
            BigInt z = ref_shift(tj.u, negk, cap);
            BigInt hexp = z;
            tj = {0, tj.x, tj.k};
            if (hexp != 0) {
                h = hexp;
                have_h = true;
            }
        }
    }
    if (have_h) {
        iv.ts.push_back(h < 0 ? RefTyped{{0, h, 0}, p0} : RefTyped{{0, 0, h}, p0});
        return res;
    }
    res.in_f13 = true;
    if (t == 0) {
        res.is_identity = true;
    } else if (t == 1) {
        const RefTyped& g = iv.ts[0];
        res.is_identity = g.type == p0 ? g.t.u == 0 : g.t.x + g.t.k == 0;
    }
    return res;
}

inline void ref_swap_interval(RefInterval& iv, std::uint64_t cap) {
    const int p0 = iv.itype == 0 ? 0 : 2;
    for (RefTyped& g : iv.ts) {
        if (g.type == p0) {
            // [z,0,0]_{p0} = a_{p0}^z as type p0-1
            BigInt z = g.t.u;
            g = z < 0 ? RefTyped{{0, z, 0}, (p0 + 3) % 4} : RefTyped{{0, 0, z}, (p0 + 3) % 4};
        } else {
            // [0,x,k]_{p0+1} = a_{p0+2}^(x+k) as type p0+2
            g = {{g.t.x + g.t.k, 0, 0}, (p0 + 2) % 4};
        }
    }
    iv.itype ^= 1;
}

} // namespace detail

inline RefOutcome wp_higman_reference(const Word& word,
                                      std::uint64_t exp_cap = default_exp_cap) {
    using namespace detail;
    try {
        std::vector<RefInterval> ivs;
        for (const Letter& l : word) {
            ref_check(BigInt(l.exp), exp_cap);
            RefTyped g{{l.exp, 0, 0}, l.sym};
            ivs.push_back({{g}, (l.sym == 0 || l.sym == 1) ? 0 : 1});
        }
        std::size_t f = 0;
        auto join = [&](std::size_t i) {
            for (RefTyped& g : ivs[i + 1].ts) ivs[i].ts.push_back(g);
            ivs.erase(ivs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        };
        while (!(f == ivs.size() && f >= 1) && !(f == 0 && ivs.size() <= 1)) {
            if (f == 0) {
                RefMembership r = ref_membership(ivs[0], exp_cap);
                if (!r.in_f13) {
                    f = 1;
                } else {
                    if (ivs[0].itype != ivs[1].itype) ref_swap_interval(ivs[0], exp_cap);
                    join(0);
                }
                continue;
            }
            if (ivs[f].itype == ivs[f - 1].itype) {
                join(f - 1);
                --f;
                continue;
            }
            RefMembership r = ref_membership(ivs[f], exp_cap);
            if (!r.in_f13) {
                ++f;
            } else {
                ref_swap_interval(ivs[f], exp_cap);
                join(f - 1);
                --f;
            }
        }
        if (f == ivs.size() && f >= 1) return RefOutcome::Nontrivial;
        if (ivs.empty()) return RefOutcome::Trivial;
        RefMembership r = ref_membership(ivs[0], exp_cap);
        return r.in_f13 && r.is_identity ? RefOutcome::Trivial : RefOutcome::Nontrivial;
    } catch (detail::CapHit&) {
        return RefOutcome::CapExceeded;
    }
}

} // namespace pc

#endif
