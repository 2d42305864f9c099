#ifndef PC_TREEREP_HPP
#define PC_TREEREP_HPP

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "pc/circuit.hpp"

namespace pc {

// Tree representation of a circuit: the nodes as a list sorted strictly by
// value, a bit vector marking consecutive doubling pairs, and a ternary trie
// whose leaves are the registered compact markings (every Lambda-marking of
// a tree node is one of them).
//
// Values are powers of two but the exponents may be negative; the circuit is
// a power circuit in the strict sense iff every Lambda value is >= 0, which
// is exactly what extend() tests while it integrates new nodes.
//
// Compact markings are signed sums of distinct powers of two with no two
// exponents adjacent, i.e. the nonadjacent signed-digit form, which is
// unique per value.  That makes the trie order the value order and powers
// the O(|Gamma|) comparison.

struct NotALeaf : std::logic_error {
    explicit NotALeaf(const std::string& w) : std::logic_error(w) {}
};
struct PreconditionViolated : std::logic_error {
    explicit PreconditionViolated(const std::string& w) : std::logic_error(w) {}
};

enum class Gap { NA, DiffOne, DiffAtLeastTwo };

struct CompareResult {
    int ord = 0; // -1: first smaller, 0: equal, +1: first larger
    Gap gap = Gap::NA;
};

struct ChainStats {
    std::size_t chains = 0;
    std::size_t potential = 0; // chains * |Gamma|
};

// Suite-wide accounting for the Theorem 1 size bound and the potential cap;
// the acceptance tests require zero violations over everything they run.
struct ExtendAccounting {
    static inline std::uint64_t calls = 0;
    static inline std::uint64_t size_bound_violations = 0;
    static inline std::uint64_t potential_violations = 0;
};

class TreeRep {
public:
    enum class Outcome { Ok, NotPowerCircuit };

    struct Vertex {
        Vertex* parent = nullptr;
        int label = 0; // label of the edge from the parent
        Vertex* child[3] = {nullptr, nullptr, nullptr};
        // leaf payload
        Vertex* prev_leaf = nullptr;
        Vertex* next_leaf = nullptr;
        std::set<NodeId> lambda_of;  // tree nodes whose value is 2^(this leaf)
        std::set<NodeId> lambda_regs; // nodes (incl. pending ones) with Lambda == this leaf
        std::set<MarkingId> marks;   // registered markings
        int value_sign = 0;          // sign of the represented value
        bool is_leaf = false;
    };
    using Leaf = Vertex*;

    explicit TreeRep(PowerCircuit& c) : c_(&c) {
        root_ = new_vertex();
        root_->is_leaf = true;
        levels_.push_back({root_});
        leaf_head_ = root_;
    }

    TreeRep(TreeRep&&) = default;
    TreeRep& operator=(TreeRep&&) = default;

    PowerCircuit& circuit() const { return *c_; }
    const std::vector<NodeId>& order() const { return order_; }
    std::size_t size() const { return order_.size(); }

    int position(NodeId p) const {
        if (p.v < pos_.size() && pos_[p.v] >= 0) return pos_[p.v];
        return -1;
    }
    bool in_tree(NodeId p) const { return position(p) >= 0; }
    bool doubling_bit(std::size_t i) const { return bits_[i] != 0; } // 2 e(P_i) == e(P_{i+1})

    ChainStats chain_stats() const {
        ChainStats st;
        if (order_.empty()) return st;
        st.chains = 1;
        for (std::size_t i = 0; i + 1 < order_.size(); ++i)
            if (!bits_[i]) ++st.chains;
        st.potential = st.chains * order_.size();
        return st;
    }

    // ---- leaves ----------------------------------------------------------

    Leaf leaf_of(MarkingId m) const {
        auto it = leaf_of_marking_.find(m);
        if (it == leaf_of_marking_.end()) throw NotALeaf("marking is not registered as a leaf");
        return it->second;
    }
    bool is_registered(MarkingId m) const { return leaf_of_marking_.count(m) != 0; }

    Leaf lambda_leaf(NodeId p) const {
        auto it = leaf_of_lambda_.find(p);
        if (it == leaf_of_lambda_.end()) throw NotALeaf("node's Lambda-marking is not registered");
        return it->second;
    }

    SignMap leaf_signs(Leaf l) const {
        SignMap out;
        std::size_t r = 1;
        for (Vertex* v = l; v->parent; v = v->parent, ++r)
            if (v->label != 0) out[order_[r - 1]] = v->label;
        return out;
    }

    // Registers a marking that is already compact.
    Leaf register_marking(MarkingId m) {
        const SignMap& sm = c_->signs(m);
        for (auto& [p, s] : sm)
            if (!in_tree(p)) throw NotALeaf("marking leaves the tree part");
        Leaf l = vertex_for(sm);
        l->marks.insert(m);
        leaf_of_marking_[m] = l;
        use_leaf_signs(sm);
        return l;
    }

    void release_marking(MarkingId m) {
        auto it = leaf_of_marking_.find(m);
        if (it == leaf_of_marking_.end()) return;
        unuse_leaf(it->second);
        it->second->marks.erase(m);
        leaf_of_marking_.erase(it);
    }

    // ---- Proposition 1: comparison --------------------------------------

    // Compares the values of two leaves (optionally negating the second).
    // On inequality the gap flag says whether |difference| is 1 or >= 2.
    // The flag is exact whenever both values are integers (compact integer
    // markings only use nodes of value >= 1); for fractional values it may
    // report DiffAtLeastTwo conservatively.
    CompareResult compare(Leaf a, Leaf b, bool negate_b = false) const {
        std::size_t n = order_.size();
        std::vector<int> da(n), db(n);
        read_digits(a, da);
        read_digits(b, db);
        if (negate_b)
            for (auto& d : db) d = -d;
        CompareResult res;
        for (std::size_t r = n; r-- > 0;) {
            if (da[r] != db[r]) {
                res.ord = da[r] > db[r] ? 1 : -1;
                break;
            }
        }
        if (res.ord == 0) return res;
        res.gap = diff_is_one(da, db, res.ord) ? Gap::DiffOne : Gap::DiffAtLeastTwo;
        return res;
    }

    CompareResult compare(MarkingId a, MarkingId b) const { return compare(leaf_of(a), leaf_of(b)); }

    int sign_of(Leaf l) const { return l->value_sign; }
    int sign_of(MarkingId m) const { return leaf_of(m)->value_sign; }

    // ---- insertion of a new node (appendix lemma) ------------------------

    // Returns the existing node of value 2^e(M) if there is one; otherwise
    // creates it with Lambda = M, splices it into the sorted order, fixes
    // the doubling bits around it and stretches the trie by one level.
    NodeId insert_node(Leaf m) {
        if (!m->is_leaf) throw NotALeaf("insert_node expects a leaf");
        if (!m->lambda_of.empty()) return *m->lambda_of.begin();

        // rank among the tree nodes = number of nodes with smaller value,
        // counted by walking the ordered leaf list up to m
        std::size_t r = 0;
        for (Vertex* l = leaf_head_; l != m; l = l->next_leaf) {
            assert(l && "registered leaf must be reachable in the leaf list");
            r += l->lambda_of.size();
        }

        NodeId p = c_->add_node(leaf_signs(m));
        std::size_t n = order_.size();

        // splice the trie: vertices at depth n - r get a fresh parent whose
        // other children stay empty; every existing marking has digit 0 on p
        std::size_t lvl = n - r;
        std::vector<Vertex*> fresh;
        fresh.reserve(levels_[lvl].size());
        for (Vertex* w : levels_[lvl]) {
            Vertex* v = new_vertex();
            v->parent = w->parent;
            v->label = w->label;
            if (w->parent)
                w->parent->child[w->label + 1] = v;
            else
                root_ = v;
            v->child[1] = w;
            w->parent = v;
            w->label = 0;
            fresh.push_back(v);
        }
        levels_.insert(levels_.begin() + static_cast<std::ptrdiff_t>(lvl), std::move(fresh));

        order_.insert(order_.begin() + static_cast<std::ptrdiff_t>(r), p);
        bits_.insert(bits_.begin() + static_cast<std::ptrdiff_t>(r), 0);
        if (bits_.size() < order_.size()) bits_.resize(order_.size(), 0);
        reindex_from(r);

        m->lambda_of.insert(p);
        register_lambda(p, m);

        // doubling bits: e(P) = 2 e(pred) iff e(Lambda_P) - e(Lambda_pred) = 1
        if (r > 0) {
            CompareResult cr = compare(lambda_leaf(order_[r - 1]), m);
            assert(cr.ord < 0 && "order must stay strictly sorted");
            bits_[r - 1] = cr.gap == Gap::DiffOne;
        }
        if (r + 1 < order_.size()) {
            CompareResult cr = compare(m, lambda_leaf(order_[r + 1]));
            assert(cr.ord < 0 && "order must stay strictly sorted");
            bits_[r] = cr.gap == Gap::DiffOne;
        }
        return p;
    }

    // ---- incrementation (appendix lemma) ---------------------------------

    // Raw marking of value e(M) + 1; may be non-compact.  Needs a node of
    // value 1 and, when that node is marked +1, a node of value 2 (created
    // here if missing).
    SignMap increment_leaf(Leaf m) {
        if (!m->is_leaf) throw NotALeaf("increment_leaf expects a leaf");
        SignMap out = leaf_signs(m);
        NodeId one = value_one_node();
        auto it = out.find(one);
        int s = it == out.end() ? 0 : it->second;
        if (s != 1) {
            if (s == -1)
                out.erase(it);
            else
                out[one] = 1;
            return out;
        }
        int p1 = position(one);
        NodeId two;
        if (static_cast<std::size_t>(p1) + 1 < order_.size() && bits_[p1]) {
            two = order_[p1 + 1];
            assert(out.find(two) == out.end() && "compact marking cannot mark both 1 and 2");
        } else {
            two = insert_node(vertex_for(SignMap{{one, 1}}));
        }
        out.erase(one);
        out[two] = 1;
        return out;
    }

    SignMap increment_marking(MarkingId m) { return increment_leaf(leaf_of(m)); }

    // ---- compactification (appendix lemma) -------------------------------

    // Rewrites the signs into the unique compact form of the same value.
    // The public version insists on the lemma's hypothesis (the rewrite must
    // never run past the end of a chain); extend() uses the extending
    // variant which creates the missing chain-top node instead.
    void compactify(SignMap& m) { compactify_impl(m, false); }
    Leaf compactify(MarkingId m) {
        release_marking(m);
        SignMap sm = c_->signs(m);
        compactify_impl(sm, false);
        rewrite_marking(m, sm);
        return register_marking(m);
    }

    // ---- joker (appendix definition) --------------------------------------

    // Returns the last node of the maximal chain through the value-1 node,
    // extending the chain first if some registered leaf still uses that
    // node.  The result takes part in no leaf marking.
    NodeId create_joker() {
        NodeId one = value_one_node();
        for (;;) {
            int t = position(one);
            while (static_cast<std::size_t>(t) + 1 < order_.size() && bits_[t]) ++t;
            NodeId top = order_[t];
            if (top != one && leaf_uses(top) == 0) return top;
            // chain of values 1..2^(L-1) sits below; create 2^L with the
            // nonadjacent form of L over the chain as its Lambda-marking
            int start = position(one);
            long long len = t - start + 1;
            SignMap naf;
            long long rest = len;
            for (int e = 0; rest != 0; ++e, rest /= 2) {
                int d = static_cast<int>(rest % 2);
                if (d && (rest & 2)) { // digits 11 -> carry, digit -1
                    naf[order_[start + e]] = -1;
                    rest += 2;
                } else if (d) {
                    naf[order_[start + e]] = 1;
                }
            }
            insert_node(vertex_for(naf));
            // if the new node linked two chains the loop walks further up
        }
    }

    // ---- ExtendTree (Theorem 1) -------------------------------------------

    // Integrates every circuit node outside the tree part.  `extras` lists
    // the markings that must come out registered (their supports may touch
    // the new nodes; they are rewritten in place, never growing).  Returns
    // NotPowerCircuit as soon as some Lambda value is negative -- or, when
    // fractional node values are tolerated, only when one is fractional.
    Outcome extend(const std::vector<MarkingId>& extras, bool allow_fractional = false) {
        ++ExtendAccounting::calls;
        const std::size_t gamma_before = order_.size();
        const std::size_t chains_before = chain_stats().chains;

        // U = alive nodes not yet in the tree, in an order where arcs go
        // from later entries to earlier ones
        std::vector<NodeId> u;
        for (NodeId q : c_->topological_order())
            if (!in_tree(q)) u.push_back(q);
        const std::size_t u_size = u.size();
        std::set<NodeId> in_u(u.begin(), u.end());

        // how many support nodes of each pending marking still live in U
        std::map<MarkingId, std::size_t> mark_pending; // extras only
        for (MarkingId m : extras) {
            std::size_t k = 0;
            for (auto& [p, s] : c_->signs(m)) {
                if (in_u.count(p))
                    ++k;
                else if (!in_tree(p))
                    throw std::logic_error("extend: marking references a foreign node");
            }
            if (k == 0) {
                if (!is_registered(m)) {
                    SignMap sm = c_->signs(m);
                    compactify_impl(sm, true);
                    rewrite_marking(m, sm);
                    register_marking(m);
                }
            } else {
                mark_pending[m] = k;
            }
        }
        std::map<NodeId, std::size_t> lambda_pending;
        for (NodeId q : u) {
            std::size_t k = 0;
            for (auto& [p, s] : c_->lambda(q))
                if (in_u.count(p)) ++k;
            if (k == 0)
                register_lambda_of_pending(q);
            else
                lambda_pending[q] = k;
        }

        for (NodeId q : u) {
            Leaf lam = lambda_leaf(q); // registered once its support completed
            if (lam->value_sign < 0) {
                if (!allow_fractional) return Outcome::NotPowerCircuit;
                // fractional node values are fine, irrational ones are not:
                // e(Lambda_q) must still be an integer, i.e. its lowest
                // marked node must have value >= 1
                NodeId low = lowest_marked(lam);
                if (lambda_leaf(low)->value_sign < 0) return Outcome::NotPowerCircuit;
            }

            // replacement node of equal value
            NodeId p = lam->lambda_of.empty() ? insert_node(lam) : *lam->lambda_of.begin();

            // rewrite every marking that uses q: Lambda-markings of later
            // U-nodes (= incoming arcs) and the marking table
            std::vector<NodeId> lam_users(c_->preds(q).begin(), c_->preds(q).end());
            for (NodeId r : lam_users) {
                assert(in_u.count(r) && "no arcs from the tree part into U");
                int s = c_->arc(r, q);
                c_->remove_arc(r, q);
                carry_into(p, s, [&](NodeId t) { return c_->arc(r, t); },
                           [&](NodeId t, int v) {
                               if (c_->arc(r, t) != 0) c_->remove_arc(r, t);
                               if (v != 0) c_->add_arc(r, t, v);
                           });
                auto it = lambda_pending.find(r);
                assert(it != lambda_pending.end());
                if (--it->second == 0) {
                    lambda_pending.erase(it);
                    register_lambda_of_pending(r);
                }
            }
            std::vector<MarkingId> mark_users(c_->users(q).begin(), c_->users(q).end());
            for (MarkingId m : mark_users) {
                int s = c_->sign(m, q);
                c_->set_sign(m, q, 0);
                carry_into(p, s, [&](NodeId t) { return c_->sign(m, t); },
                           [&](NodeId t, int v) { c_->set_sign(m, t, v); });
                auto it = mark_pending.find(m);
                if (it != mark_pending.end() && --it->second == 0) {
                    mark_pending.erase(it);
                    SignMap sm = c_->signs(m);
                    compactify_impl(sm, true);
                    rewrite_marking(m, sm);
                    register_marking(m);
                }
            }

            unregister_lambda(q);
            c_->delete_node(q);
        }

        assert(mark_pending.empty() && lambda_pending.empty());

        const std::size_t gamma_after = order_.size();
        const std::size_t chains_after = chain_stats().chains;
        if (gamma_after + chains_after > gamma_before + 3 * u_size + chains_before) {
            ++ExtendAccounting::size_bound_violations;
            assert(false && "Theorem 1 size bound violated");
        }
        if (chain_stats().potential > order_.size() * order_.size())
            ++ExtendAccounting::potential_violations;
        return Outcome::Ok;
    }

    // ---- helpers used by the solvers --------------------------------------

    // Node of value 1 (unique when present), creating it if needed.
    NodeId value_one_node() {
        int a = anchor();
        if (a >= 0 && lambda_leaf(order_[a])->value_sign == 0) return order_[a];
        return insert_node(vertex_for(SignMap{}));
    }

    // Lowest marked node of a leaf; the leaf must be nonempty.
    NodeId lowest_marked(Leaf l) const {
        std::size_t r = 1;
        for (Vertex* v = l; v->parent; v = v->parent, ++r)
            if (v->label != 0) return order_[r - 1];
        throw std::logic_error("lowest_marked on the empty marking");
    }

    std::size_t leaf_count() const {
        std::size_t n = 0;
        for (Vertex* l = leaf_head_; l; l = l->next_leaf) ++n;
        return n;
    }

private:
    // ---- trie plumbing ----------------------------------------------------

    Vertex* new_vertex() {
        arena_.emplace_back();
        return &arena_.back();
    }

    void read_digits(Leaf l, std::vector<int>& out) const {
        if (!l->is_leaf) throw NotALeaf("expected a leaf");
        std::size_t r = 0;
        for (Vertex* v = l; v->parent; v = v->parent) out[r++] = v->label;
        if (r != order_.size()) throw NotALeaf("leaf depth does not match the tree");
    }

    // Walks the trie for the given compact signs, creating the path when
    // missing; links fresh leaves into the ordered leaf list.
    Vertex* vertex_for(const SignMap& signs) {
        std::size_t n = order_.size();
        Vertex* v = root_;
        Vertex* branch_left = nullptr;  // deepest existing sibling to the left
        Vertex* branch_right = nullptr; // deepest existing sibling to the right
        bool created = false;
        for (std::size_t d = 0; d < n; ++d) {
            NodeId node = order_[n - 1 - d];
            auto it = signs.find(node);
            int lab = it == signs.end() ? 0 : it->second;
            Vertex*& slot = v->child[lab + 1];
            if (!slot) {
                created = true;
                Vertex* w = new_vertex();
                w->parent = v;
                w->label = lab;
                levels_at(d + 1).push_back(w);
                slot = w;
            }
            for (int l2 = -1; l2 < lab; ++l2)
                if (v->child[l2 + 1]) branch_left = v->child[l2 + 1]; // closest = largest below
            for (int l2 = lab + 1; l2 <= 1; ++l2)
                if (v->child[l2 + 1]) { branch_right = v->child[l2 + 1]; break; } // closest above
            v = slot;
        }
        if (!v->is_leaf) {
            v->is_leaf = true;
            // neighbours in value order come from the deepest divergence
            Vertex* pred = branch_left ? rightmost_leaf(branch_left) : nullptr;
            Vertex* succ = branch_right && !branch_left ? leftmost_leaf(branch_right) : nullptr;
            if (pred) {
                v->prev_leaf = pred;
                v->next_leaf = pred->next_leaf;
                if (pred->next_leaf) pred->next_leaf->prev_leaf = v;
                pred->next_leaf = v;
            } else if (succ) {
                v->next_leaf = succ;
                v->prev_leaf = succ->prev_leaf;
                if (succ->prev_leaf) succ->prev_leaf->next_leaf = v;
                succ->prev_leaf = v;
                if (leaf_head_ == succ) leaf_head_ = v;
            } else {
                assert(!created || leaf_head_ == nullptr);
                leaf_head_ = v;
            }
            v->value_sign = 0;
            for (std::size_t r = n; r-- > 0;) {
                auto it = signs.find(order_[r]);
                if (it != signs.end()) {
                    v->value_sign = it->second;
                    break;
                }
            }
        }
        return v;
    }

    Vertex* rightmost_leaf(Vertex* v) const {
        while (!v->is_leaf)
            for (int l = 1; l >= -1; --l)
                if (v->child[l + 1]) {
                    v = v->child[l + 1];
                    break;
                }
        return v;
    }
    Vertex* leftmost_leaf(Vertex* v) const {
        while (!v->is_leaf)
            for (int l = -1; l <= 1; ++l)
                if (v->child[l + 1]) {
                    v = v->child[l + 1];
                    break;
                }
        return v;
    }

    std::vector<Vertex*>& levels_at(std::size_t d) {
        if (levels_.size() <= d) levels_.resize(d + 1);
        return levels_[d];
    }

    // per-node count of registered leaves using the node (joker test)
    std::size_t leaf_uses(NodeId p) const {
        return p.v < leaf_uses_.size() ? leaf_uses_[p.v] : 0;
    }
    void use_leaf_signs(const SignMap& sm) {
        for (auto& [p, s] : sm) {
            if (leaf_uses_.size() <= p.v) leaf_uses_.resize(p.v + 1, 0);
            ++leaf_uses_[p.v];
        }
    }
    void unuse_leaf(Vertex* l) {
        std::size_t r = 1;
        for (Vertex* v = l; v->parent; v = v->parent, ++r)
            if (v->label != 0) --leaf_uses_[order_[r - 1].v];
    }

    void register_lambda(NodeId p, Leaf l) {
        leaf_of_lambda_[p] = l;
        l->lambda_regs.insert(p);
        use_leaf_signs(c_->lambda(p));
    }
    void register_lambda_of_pending(NodeId q) {
        SignMap sm = c_->lambda(q);
        compactify_impl(sm, true);
        if (sm != c_->lambda(q)) rewrite_lambda(q, sm);
        register_lambda(q, vertex_for(sm));
    }
    void unregister_lambda(NodeId q) {
        auto it = leaf_of_lambda_.find(q);
        if (it == leaf_of_lambda_.end()) return;
        unuse_leaf(it->second);
        it->second->lambda_regs.erase(q);
        it->second->lambda_of.erase(q);
        leaf_of_lambda_.erase(it);
    }

    void rewrite_marking(MarkingId m, const SignMap& target) {
        SignMap old = c_->signs(m);
        for (auto& [p, s] : old)
            if (!target.count(p)) c_->set_sign(m, p, 0);
        for (auto& [p, s] : target) c_->set_sign(m, p, s);
    }
    void rewrite_lambda(NodeId q, const SignMap& target) {
        SignMap old = c_->lambda(q);
        for (auto& [p, s] : old)
            if (!target.count(p)) c_->remove_arc(q, p);
        for (auto& [p, s] : target) {
            int cur = c_->arc(q, p);
            if (cur == s) continue;
            if (cur != 0) c_->remove_arc(q, p);
            c_->add_arc(q, p, s);
        }
    }

    void reindex_from(std::size_t r) {
        for (std::size_t i = r; i < order_.size(); ++i) {
            NodeId p = order_[i];
            if (pos_.size() <= p.v) pos_.resize(p.v + 1, -1);
            pos_[p.v] = static_cast<int>(i);
        }
        anchor_dirty_ = true;
    }

    // first position whose node has value >= 1 (Lambda sign >= 0); -1 if none
    int anchor() const {
        if (anchor_dirty_) {
            anchor_ = -1;
            for (std::size_t i = 0; i < order_.size(); ++i) {
                if (lambda_leaf(order_[i])->value_sign >= 0) {
                    anchor_ = static_cast<int>(i);
                    break;
                }
            }
            anchor_dirty_ = false;
        }
        return anchor_;
    }

    // ---- difference-is-one scan -------------------------------------------

    // Decides sum(d_i * e(P_i)) == t for t = +-1 where d = larger - smaller
    // digit vector; carries stay in {-1,0,1}, any carry into a non-doubling
    // gap kills the sum.
    bool diff_is_one(const std::vector<int>& da, const std::vector<int>& db, int ord) const {
        std::size_t n = order_.size();
        int a = anchor();
        bool have_one = a >= 0 && lambda_leaf(order_[a])->value_sign == 0;
        long long carry = 0;
        bool injected = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!injected && a >= 0 && i == static_cast<std::size_t>(a)) {
                if (!have_one) {
                    // level 0 lies strictly below this node across a gap of
                    // unknown width; the odd -1 digit can never be absorbed
                    return false;
                }
                carry -= 1; // the -1 digit sits exactly on the value-1 node
                injected = true;
            }
            long long v = carry + (ord > 0 ? da[i] - db[i] : db[i] - da[i]);
            if (v % 2 != 0) return false;
            carry = v / 2;
            bool chained = i + 1 < n && bits_[i];
            if (!chained && carry != 0) return false;
        }
        if (!injected) return false; // no integral levels at all
        return carry == 0;
    }

    // ---- compactification core ---------------------------------------------

    // `extending` creates the chain-top node a rewrite needs instead of
    // failing.  Entries are kept sorted by position; node insertions shift
    // positions but never reorder existing nodes, so indices stay honest as
    // long as positions are re-read live.
    void compactify_impl(SignMap& m, bool extending) {
        std::vector<std::pair<NodeId, int>> v(m.begin(), m.end());
        for (auto& [p, s] : v)
            if (position(p) < 0) throw std::logic_error("compactify: node outside the tree part");
        std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) {
            return position(a.first) < position(b.first);
        });
        std::size_t idx = 0;
        while (idx + 1 < v.size()) {
            int i = position(v[idx].first);
            if (position(v[idx + 1].first) != i + 1 || !bits_[i]) {
                ++idx;
                continue;
            }
            int s = v[idx].second;
            if (v[idx + 1].second == -s) {
                // (+1,-1) -> (-1,0)
                v[idx].second = -s;
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
                if (idx > 0) --idx;
                continue;
            }
            // run of equal signs along the chain; the rewrite needs the node
            // one step above its end
            std::size_t e = idx;
            while (e + 1 < v.size() && v[e + 1].second == s &&
                   position(v[e + 1].first) == position(v[e].first) + 1 &&
                   bits_[position(v[e].first)])
                ++e;
            int kpos = position(v[e].first);
            NodeId above;
            if (static_cast<std::size_t>(kpos) + 1 < order_.size() && bits_[kpos]) {
                above = order_[kpos + 1];
            } else {
                if (!extending) throw PreconditionViolated("compactify would leave the chain");
                above = extend_chain_top(kpos);
            }
            int st = 0;
            bool has_above = e + 1 < v.size() && v[e + 1].first == above;
            if (has_above) st = v[e + 1].second;
            assert(st != s && "a maximal run cannot continue above");
            v[idx].second = -s;
            std::size_t erase_to = has_above ? e + 2 : e + 1;
            int merged = st + s;
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                    v.begin() + static_cast<std::ptrdiff_t>(erase_to));
            if (merged != 0)
                v.insert(v.begin() + static_cast<std::ptrdiff_t>(idx) + 1, {above, merged});
            if (idx > 0) --idx;
        }
        m.clear();
        for (auto& [p, s] : v)
            if (s != 0) m[p] = s;
    }

    // Creates the node of value 2*e(P_pos) where P_pos ends its chain.
    NodeId extend_chain_top(int pos) {
        assert((static_cast<std::size_t>(pos) + 1 >= order_.size() || !bits_[pos]) &&
               "extend_chain_top expects a chain-maximal node");
        SignMap inc = increment_leaf(lambda_leaf(order_[pos]));
        compactify_impl(inc, true);
        return insert_node(vertex_for(inc));
    }

    // carry walk: add sign s at node p, resolving doubled marks by moving
    // one chain step up (extending the chain at the top when necessary)
    template <typename Get, typename Set>
    void carry_into(NodeId p, int s, Get get, Set set) {
        NodeId cur = p;
        for (;;) {
            int old = get(cur);
            if (old == 0) {
                set(cur, s);
                return;
            }
            if (old == -s) {
                set(cur, 0);
                return;
            }
            set(cur, 0);
            int i = position(cur);
            if (static_cast<std::size_t>(i) + 1 < order_.size() && bits_[i]) {
                cur = order_[i + 1];
            } else {
                cur = extend_chain_top(i);
            }
        }
    }

    PowerCircuit* c_;
    std::deque<Vertex> arena_;
    Vertex* root_ = nullptr;
    Vertex* leaf_head_ = nullptr;
    std::vector<std::vector<Vertex*>> levels_; // trie vertices per depth
    std::vector<NodeId> order_;                // sorted strictly by value
    std::vector<std::uint8_t> bits_;           // bits_[i]: 2 e(P_i) == e(P_{i+1})
    std::vector<int> pos_;                     // node id -> position, -1 outside
    std::vector<std::size_t> leaf_uses_;       // node id -> #registered leaves using it
    std::map<MarkingId, Vertex*> leaf_of_marking_;
    std::map<NodeId, Vertex*> leaf_of_lambda_;
    mutable int anchor_ = -1;
    mutable bool anchor_dirty_ = true;
};

struct MakeTreeResult {
    TreeRep::Outcome outcome;
    std::optional<TreeRep> tree; // engaged iff outcome == Ok
};

// Corollary 1: reduce a whole circuit (the special case Gamma = empty).
inline MakeTreeResult make_tree(PowerCircuit& c, const std::vector<MarkingId>& markings = {},
                                bool allow_fractional = false) {
    TreeRep t(c);
    TreeRep::Outcome out = t.extend(markings, allow_fractional);
    if (out != TreeRep::Outcome::Ok) return {out, std::nullopt};
    return {out, std::move(t)};
}

} // namespace pc

#endif
