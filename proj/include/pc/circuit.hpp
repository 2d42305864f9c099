#ifndef PC_CIRCUIT_HPP
#define PC_CIRCUIT_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pc {

// A power circuit is a dag whose arcs carry signs in {-1,0,+1} (absent = 0).
// Every node evaluates to 2^(value of its successor marking); a marking is a
// signed subset of nodes and evaluates to the signed sum of node values.
// Construction never checks integrality of values; that is the reduction's
// job (see treerep.hpp).

struct NodeId {
    std::uint32_t v = UINT32_MAX;
    bool valid() const { return v != UINT32_MAX; }
    friend bool operator==(NodeId a, NodeId b) { return a.v == b.v; }
    friend bool operator!=(NodeId a, NodeId b) { return a.v != b.v; }
    friend bool operator<(NodeId a, NodeId b) { return a.v < b.v; }
};

struct MarkingId {
    std::uint32_t v = UINT32_MAX;
    bool valid() const { return v != UINT32_MAX; }
    friend bool operator==(MarkingId a, MarkingId b) { return a.v == b.v; }
    friend bool operator!=(MarkingId a, MarkingId b) { return a.v != b.v; }
    friend bool operator<(MarkingId a, MarkingId b) { return a.v < b.v; }
};

// Sparse sign map; only keys with sign -1 or +1 are stored.
using SignMap = std::map<NodeId, int>;

struct UnknownNode : std::logic_error {
    explicit UnknownNode(const std::string& what) : std::logic_error(what) {}
};
struct UnknownMarking : std::logic_error {
    explicit UnknownMarking(const std::string& what) : std::logic_error(what) {}
};
struct DoubleArc : std::logic_error {
    explicit DoubleArc(const std::string& what) : std::logic_error(what) {}
};

class PowerCircuit {
public:
    // ---- nodes ---------------------------------------------------------

    // New node with successor marking `succ` (its outgoing arcs).  The node
    // has no incoming arcs, so acyclicity is preserved automatically.
    NodeId add_node(SignMap succ = {}) {
        for (auto& [q, s] : succ) {
            require_node(q);
            if (s != -1 && s != 1) throw std::logic_error("arc sign must be -1 or +1");
        }
        NodeId id{static_cast<std::uint32_t>(nodes_.size())};
        nodes_.push_back(Node{});
        Node& n = nodes_.back();
        n.alive = true;
        n.succ = std::move(succ);
        for (auto& [q, s] : n.succ) nodes_[q.v].preds.insert(id);
        ++alive_nodes_;
        return id;
    }

    // Import helper: create a node with a fixed id (ids at or above the
    // current next id only).  Used by the JSON reader to preserve ids.
    NodeId add_node_with_id(std::uint32_t id, SignMap succ = {}) {
        while (nodes_.size() < id) nodes_.push_back(Node{});  // dead fillers
        if (nodes_.size() != id) throw std::logic_error("node ids must arrive in increasing order");
        return add_node(std::move(succ));
    }

    NodeId clone_node(NodeId p) {
        require_node(p);
        return add_node(nodes_[p.v].succ);
    }

    // A node may be removed only when nothing references it: no incoming
    // arc and no marking.  Its own outgoing arcs are removed with it.
    void delete_node(NodeId p) {
        require_node(p);
        Node& n = nodes_[p.v];
        if (!n.preds.empty()) throw std::logic_error("delete_node: node has incoming arcs");
        if (!n.users.empty()) throw std::logic_error("delete_node: node is marked");
        for (auto& [q, s] : n.succ) nodes_[q.v].preds.erase(p);
        n.succ.clear();
        n.alive = false;
        --alive_nodes_;
    }

    bool node_alive(NodeId p) const { return p.v < nodes_.size() && nodes_[p.v].alive; }

    const SignMap& lambda(NodeId p) const {
        require_node(p);
        return nodes_[p.v].succ;
    }

    const std::set<NodeId>& preds(NodeId p) const {
        require_node(p);
        return nodes_[p.v].preds;
    }

    const std::set<MarkingId>& users(NodeId p) const {
        require_node(p);
        return nodes_[p.v].users;
    }

    // ---- arcs ----------------------------------------------------------

    int arc(NodeId p, NodeId q) const {
        require_node(p);
        auto it = nodes_[p.v].succ.find(q);
        return it == nodes_[p.v].succ.end() ? 0 : it->second;
    }

    // Adds an arc where none exists.  The caller is responsible for
    // acyclicity; all users in this library add arcs out of source nodes.
    void add_arc(NodeId p, NodeId q, int sign) {
        require_node(p);
        require_node(q);
        if (p == q) throw std::logic_error("self arc");
        if (sign != -1 && sign != 1) throw std::logic_error("arc sign must be -1 or +1");
        auto [it, fresh] = nodes_[p.v].succ.emplace(q, sign);
        if (!fresh) throw DoubleArc("add_arc: arc already present");
        nodes_[q.v].preds.insert(p);
    }

    void remove_arc(NodeId p, NodeId q) {
        require_node(p);
        if (nodes_[p.v].succ.erase(q) == 0) throw std::logic_error("remove_arc: no such arc");
        nodes_[q.v].preds.erase(p);
    }

    // ---- markings ------------------------------------------------------

    MarkingId new_marking(SignMap signs = {}) {
        MarkingId m{static_cast<std::uint32_t>(markings_.size())};
        markings_.push_back(Mark{});
        markings_.back().alive = true;
        for (auto& [p, s] : signs) set_sign(m, p, s);
        return m;
    }

    void free_marking(MarkingId m) {
        require_marking(m);
        for (auto& [p, s] : markings_[m.v].signs) nodes_[p.v].users.erase(m);
        markings_[m.v].signs.clear();
        markings_[m.v].alive = false;
    }

    bool marking_alive(MarkingId m) const { return m.v < markings_.size() && markings_[m.v].alive; }

    const SignMap& signs(MarkingId m) const {
        require_marking(m);
        return markings_[m.v].signs;
    }

    int sign(MarkingId m, NodeId p) const {
        require_marking(m);
        auto it = markings_[m.v].signs.find(p);
        return it == markings_[m.v].signs.end() ? 0 : it->second;
    }

    void set_sign(MarkingId m, NodeId p, int s) {
        require_marking(m);
        require_node(p);
        if (s == 0) {
            if (markings_[m.v].signs.erase(p)) nodes_[p.v].users.erase(m);
            return;
        }
        if (s != -1 && s != 1) throw std::logic_error("marking sign must be -1, 0 or +1");
        markings_[m.v].signs[p] = s;
        nodes_[p.v].users.insert(m);
    }

    std::set<NodeId> support(MarkingId m) const {
        std::set<NodeId> out;
        for (auto& [p, s] : signs(m)) out.insert(p);
        return out;
    }

    // True iff no node of the support has an incoming arc.
    bool is_source(MarkingId m) const {
        for (auto& [p, s] : signs(m))
            if (!nodes_[p.v].preds.empty()) return false;
        return true;
    }

    // Clone every node of the support; the result is always a source of
    // equal value and support size.
    MarkingId clone_marking(MarkingId m) {
        MarkingId out = new_marking();
        for (auto& [p, s] : signs(m)) set_sign(out, clone_node(p), s);
        return out;
    }

    // Value e(m) + e(k).  Coefficients +-2 are resolved by cloning the node
    // and marking original and clone alike, so at most |sigma(m) ^ sigma(k)|
    // nodes are created.
    MarkingId add_markings(MarkingId m, MarkingId k) {
        MarkingId out = new_marking();
        const SignMap& a = signs(m);
        const SignMap& b = signs(k);
        for (auto& [p, s] : a) {
            int t = s + (k == m ? s : sign(k, p));
            if (t == 0) continue;
            if (t == -2 || t == 2) {
                set_sign(out, p, t / 2);
                set_sign(out, clone_node(p), t / 2);
            } else {
                set_sign(out, p, t);
            }
        }
        if (k != m)
            for (auto& [p, s] : b)
                if (a.find(p) == a.end()) set_sign(out, p, s);
        return out;
    }

    MarkingId negate_marking(MarkingId m) {
        MarkingId out = new_marking();
        for (auto& [p, s] : signs(m)) set_sign(out, p, -s);
        return out;
    }

    // Value e(u) * 2^e(x).  Follows the construction of the paper: clone u
    // unless it is already a source, then attach arcs from every node of the
    // result to the exponent marking.  The exponent side is cloned only when
    // reusing it would create a double arc or a self arc; cloning it always
    // would be sound too, this just avoids growth where none is needed.
    MarkingId mul_pow2(MarkingId u, MarkingId x) {
        MarkingId v = is_source(u) ? new_marking(signs(u)) : clone_marking(u);
        if (signs(x).empty()) return v;
        bool need_clone = false;
        for (auto& [p, sp] : signs(v)) {
            for (auto& [q, sq] : signs(x)) {
                if (p == q || arc(p, q) != 0) { need_clone = true; break; }
            }
            if (need_clone) break;
        }
        MarkingId e = need_clone ? clone_marking(x) : x;
        for (auto& [p, sp] : signs(v))
            for (auto& [q, sq] : signs(e)) add_arc(p, q, sq);
        if (need_clone) free_marking(e);
        return v;
    }

    // ---- whole-circuit helpers ------------------------------------------

    std::size_t node_count() const { return alive_nodes_; }
    std::uint32_t node_id_bound() const { return static_cast<std::uint32_t>(nodes_.size()); }

    std::vector<NodeId> node_ids() const {
        std::vector<NodeId> out;
        out.reserve(alive_nodes_);
        for (std::uint32_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].alive) out.push_back(NodeId{i});
        return out;
    }

    // Nodes in an order where every arc points from later to earlier.
    // Also the acyclicity check: throws if a cycle is found (cannot happen
    // through the public mutators here, but imported circuits are checked).
    std::vector<NodeId> topological_order() const {
        std::vector<NodeId> order;
        order.reserve(alive_nodes_);
        std::vector<std::uint32_t> out_deg(nodes_.size(), 0);
        std::vector<NodeId> stack;
        for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
            if (!nodes_[i].alive) continue;
            out_deg[i] = static_cast<std::uint32_t>(nodes_[i].succ.size());
            if (out_deg[i] == 0) stack.push_back(NodeId{i});
        }
        while (!stack.empty()) {
            NodeId p = stack.back();
            stack.pop_back();
            order.push_back(p);
            for (NodeId q : nodes_[p.v].preds)
                if (--out_deg[q.v] == 0) stack.push_back(q);
        }
        if (order.size() != alive_nodes_) throw std::logic_error("circuit contains a cycle");
        return order;
    }

    // Copies the part of the circuit reachable from the given markings
    // (arc-closure of their supports) into `dst` and returns the copies of
    // the markings.  Node ids are remapped; `node_map` (optional) receives
    // old id -> new id.
    std::vector<MarkingId> copy_live(PowerCircuit& dst, const std::vector<MarkingId>& ms,
                                     std::map<NodeId, NodeId>* node_map = nullptr) const {
        std::set<NodeId> live;
        std::vector<NodeId> work;
        for (MarkingId m : ms)
            for (auto& [p, s] : signs(m))
                if (live.insert(p).second) work.push_back(p);
        while (!work.empty()) {
            NodeId p = work.back();
            work.pop_back();
            for (auto& [q, s] : nodes_[p.v].succ)
                if (live.insert(q).second) work.push_back(q);
        }
        // create in topological order so arcs always point at existing nodes
        std::map<NodeId, NodeId> remap;
        for (NodeId p : topological_order()) {
            if (!live.count(p)) continue;
            SignMap succ;
            for (auto& [q, s] : nodes_[p.v].succ) succ.emplace(remap.at(q), s);
            remap.emplace(p, dst.add_node(succ));
        }
        std::vector<MarkingId> out;
        out.reserve(ms.size());
        for (MarkingId m : ms) {
            SignMap sm;
            for (auto& [p, s] : signs(m)) sm.emplace(remap.at(p), s);
            out.push_back(dst.new_marking(sm));
        }
        if (node_map) *node_map = std::move(remap);
        return out;
    }

private:
    struct Node {
        bool alive = false;
        SignMap succ;              // outgoing arcs = the Lambda-marking
        std::set<NodeId> preds;    // sources of incoming arcs
        std::set<MarkingId> users; // markings whose support contains this node
    };
    struct Mark {
        bool alive = false;
        SignMap signs;
    };

    void require_node(NodeId p) const {
        if (!node_alive(p)) throw UnknownNode("unknown or deleted node");
    }
    void require_marking(MarkingId m) const {
        if (!marking_alive(m)) throw UnknownMarking("unknown or freed marking");
    }

    std::deque<Node> nodes_;
    std::deque<Mark> markings_;
    std::size_t alive_nodes_ = 0;
};

} // namespace pc

#endif
