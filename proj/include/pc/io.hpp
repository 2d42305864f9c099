#ifndef PC_IO_HPP
#define PC_IO_HPP

#include <json.hpp>
#include <map>
#include <sstream>
#include <string>

#include "pc/circuit.hpp"

namespace pc {

// Circuit exchange format:
//   { "nodes":    [ {"id": int, "succ": [[target_id, sign], ...]}, ... ],
//     "markings": { "name": [[node_id, sign], ...], ... } }
// Nodes ascend by id, arc lists by target, markings by name, so dumping an
// imported circuit reproduces the input byte for byte.

struct CircuitDoc {
    PowerCircuit circuit;
    std::map<std::string, MarkingId> markings;
};

inline nlohmann::ordered_json circuit_to_json(const PowerCircuit& c,
                                              const std::map<std::string, MarkingId>& markings) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (NodeId p : c.node_ids()) {
        nlohmann::ordered_json rec;
        rec["id"] = p.v;
        auto arcs = nlohmann::ordered_json::array();
        for (auto& [q, s] : c.lambda(p)) arcs.push_back({q.v, s});
        rec["succ"] = std::move(arcs);
        j["nodes"].push_back(std::move(rec));
    }
    j["markings"] = nlohmann::ordered_json::object();
    for (auto& [name, m] : markings) {
        auto signs = nlohmann::ordered_json::array();
        for (auto& [p, s] : c.signs(m)) signs.push_back({p.v, s});
        j["markings"][name] = std::move(signs);
    }
    return j;
}

struct ParseError : std::invalid_argument {
    explicit ParseError(const std::string& w) : std::invalid_argument(w) {}
};

inline CircuitDoc circuit_from_json(const nlohmann::json& j) {
    CircuitDoc doc;
    if (!j.is_object() || !j.contains("nodes")) throw ParseError("circuit json needs \"nodes\"");
    // two phases: ids first (arcs may point forward in the file)
    for (const auto& rec : j.at("nodes")) {
        std::uint32_t id = rec.at("id").get<std::uint32_t>();
        doc.circuit.add_node_with_id(id);
    }
    for (const auto& rec : j.at("nodes")) {
        NodeId p{rec.at("id").get<std::uint32_t>()};
        for (const auto& arc : rec.at("succ")) {
            NodeId q{arc.at(0).get<std::uint32_t>()};
            int s = arc.at(1).get<int>();
            doc.circuit.add_arc(p, q, s);
        }
    }
    doc.circuit.topological_order(); // throws on cycles
    if (j.contains("markings")) {
        for (auto it = j.at("markings").begin(); it != j.at("markings").end(); ++it) {
            SignMap sm;
            for (const auto& e : it.value()) sm[NodeId{e.at(0).get<std::uint32_t>()}] = e.at(1).get<int>();
            doc.markings[it.key()] = doc.circuit.new_marking(sm);
        }
    }
    return doc;
}

inline std::string circuit_to_dot(const PowerCircuit& c,
                                  const std::map<std::string, MarkingId>& markings) {
    std::ostringstream out;
    out << "digraph powercircuit {\n";
    for (NodeId p : c.node_ids()) {
        out << "  n" << p.v << " [label=\"" << p.v;
        for (auto& [name, m] : markings) {
            int s = c.sign(m, p);
            if (s != 0) out << "\\n" << name << (s > 0 ? "+" : "-");
        }
        out << "\"];\n";
    }
    for (NodeId p : c.node_ids())
        for (auto& [q, s] : c.lambda(p))
            out << "  n" << p.v << " -> n" << q.v << " [label=\"" << (s > 0 ? "+" : "-")
                << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace pc

#endif
