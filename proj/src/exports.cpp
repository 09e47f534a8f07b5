#include "oforge/exports.hpp"

#include <array>
#include <sstream>

namespace oforge {

Json ball_to_json(const Ball& ball) {
    Json json;
    json["root"] = ball.root.to_string();
    json["radius"] = ball.radius;
    Json vertices = Json::array();
    for (const BallVertex& v : ball.vertices) {
        vertices.push_back({{"address", v.id.to_string()}, {"depth", v.depth}});
    }
    json["vertices"] = std::move(vertices);
    Json arcs = Json::array();
    for (const BallArc& arc : ball.arcs) {
        arcs.push_back({{"from", ball.vertices[static_cast<std::size_t>(arc.from)].id.to_string()},
                        {"to", ball.vertices[static_cast<std::size_t>(arc.to)].id.to_string()},
                        {"lobe", arc.lobe}});
    }
    json["arcs"] = std::move(arcs);
    return json;
}

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#1b6ca8", "#b3541e", "#2e7d32", "#8e24aa",
    "#c62828", "#00838f", "#6d4c41", "#37474f",
};

}  // namespace

std::string ball_to_dot(const Ball& ball) {
    std::ostringstream out;
    out << "digraph ball {\n";
    out << "  rankdir=LR;\n";
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        out << "  n" << i << " [label=\"" << ball.vertices[i].id.to_string() << "\"];\n";
    }
    std::map<std::string, std::size_t> tag_color;
    for (const BallArc& arc : ball.arcs) {
        std::size_t color = 0;
        if (!arc.lobe.empty()) {
            auto [it, inserted] = tag_color.emplace(arc.lobe, tag_color.size());
            color = it->second % kPalette.size();
        }
        out << "  n" << arc.from << " -> n" << arc.to;
        out << " [color=\"" << kPalette[color] << "\"";
        if (!arc.lobe.empty()) out << ", label=\"" << arc.lobe << "\"";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

std::string block_cut_tree_to_dot(const BlockCutTree& tree) {
    std::ostringstream out;
    out << "digraph block_cut_tree {\n";
    for (std::size_t k = 0; k < tree.cuts.size(); ++k) {
        out << "  c" << k << " [shape=ellipse, label=\""
            << tree.ball->vertices[static_cast<std::size_t>(tree.cuts[k])].id.to_string()
            << "\"];\n";
    }
    for (std::size_t j = 0; j < tree.lobe_nodes.size(); ++j) {
        out << "  b" << j << " [shape=box, label=\""
            << lobe_tree_node(*tree.ball, tree.lobe_nodes[j]).to_string() << "\"];\n";
    }
    for (std::size_t k = 0; k < tree.cuts.size(); ++k) {
        for (int other : tree.adjacency[k]) {
            out << "  c" << k << " -> b" << (other - static_cast<int>(tree.cuts.size()))
                << " [dir=both];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string digraph_to_dot(const FiniteDigraph& digraph, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n";
    for (int v = 0; v < digraph.vertex_count; ++v) out << "  v" << v << ";\n";
    for (const auto& [u, v] : digraph.arcs) out << "  v" << u << " -> v" << v << ";\n";
    out << "}\n";
    return out.str();
}

Json end_report_to_json(const EndReport& report) {
    return Json{{"classification", to_string(report.classification)},
                {"certificate", report.certificate},
                {"monotone", report.monotone},
                {"theorem_inference", report.theorem_inference}};
}

Json qi_report_to_json(const QIReport& report) {
    Json violations = Json::array();
    for (const QIViolation& v : report.violations) {
        violations.push_back({{"u", v.u.to_string()},
                              {"v", v.v.to_string()},
                              {"d1", v.d1},
                              {"d2", v.d2}});
    }
    return Json{{"m1", report.m1},
                {"m2", report.m2},
                {"a", report.a},
                {"verified_pairs", report.verified_pairs},
                {"violations", std::move(violations)}};
}

Json suborbit_report_to_json(const SuborbitReport& report) {
    Json by_radius = Json::array();
    for (const auto& sphere : report.orbits) {
        Json orbits = Json::array();
        for (const auto& orbit : sphere) {
            orbits.push_back({{"size", orbit.size()}, {"least", orbit.front().to_string()}});
        }
        by_radius.push_back(std::move(orbits));
    }
    return Json{{"by_radius", std::move(by_radius)},
                {"subdegrees", report.flat_subdegrees()}};
}

Json descriptor_to_json(const CanonicalDescriptor& descriptor) {
    Json lobe = Json::array();
    for (const VertexId& v : descriptor.root_lobe) lobe.push_back(v.to_string());
    Json arcs = Json::array();
    for (const auto& [u, v] : descriptor.lobe_digraph.arcs) arcs.push_back({u, v});
    return Json{{"multiplicity", descriptor.multiplicity},
                {"lobe_vertex_count", descriptor.lobe_digraph.vertex_count},
                {"lobe_arcs", std::move(arcs)},
                {"seed", Json{{"alpha", descriptor.seed.alpha().to_string()},
                              {"beta", descriptor.seed.beta().to_string()}}},
                {"root_lobe", std::move(lobe)}};
}

Json trace_to_json(const RefinementTrace& trace) {
    Json stages = Json::array();
    for (const RefinementStage& stage : trace.stages) {
        Json lobe = Json::array();
        for (const VertexId& v : stage.lobe_vertices) lobe.push_back(v.to_string());
        stages.push_back({{"seed_alpha", stage.seed_alpha.to_string()},
                          {"seed_beta", stage.seed_beta.to_string()},
                          {"connectivity_one", stage.connectivity_one},
                          {"lobe_vertices", std::move(lobe)},
                          {"group_marker", stage.group_marker},
                          {"lobe_end_count", stage.lobe_end_count}});
    }
    return Json{{"stages", std::move(stages)},
                {"terminal_index", trace.terminal_index},
                {"resolved", trace.resolved},
                {"matched_descriptor", trace.matched_descriptor}};
}

Json decomposition_report_to_json(const DecompositionReport& report) {
    return Json{{"edge_group_nontrivial", report.edge_group_nontrivial},
                {"edge_group_maximal", report.edge_group_maximal},
                {"fixes_no_other_point", report.fixes_no_other_point},
                {"vertex_group_order", report.vertex_group_order},
                {"edge_group_order", report.edge_group_order},
                {"lobe_group_order", report.lobe_group_order},
                {"valid", report.valid()}};
}

Json fundamental_domain_to_json(const FundamentalDomainReport& report) {
    return Json{{"vertex_orbit_count", report.vertex_orbit_count},
                {"arc_orbit_count", report.arc_orbit_count},
                {"inversion_witnesses", report.inversion_witnesses},
                {"segment", report.segment},
                {"covered_nodes", report.covered_nodes},
                {"covered_arcs", report.covered_arcs},
                {"valid", report.valid()}};
}

Json block_search_to_json(const BlockSearchReport& report) {
    Json classes = Json::array();
    for (const auto& cls : report.witness_partition) {
        Json members = Json::array();
        for (const VertexId& v : cls) members.push_back(v.to_string());
        classes.push_back(std::move(members));
    }
    return Json{{"witness_found", report.witness_found},
                {"radius", report.radius},
                {"witness_partition", std::move(classes)}};
}

Json tree_class_to_json(const TreeIsometryClass& cls) {
    return Json{{"kind", cls.kind == TreeIsometryClass::Kind::kElliptic ? "elliptic" : "hyperbolic"},
                {"witness", cls.witness.to_string()},
                {"translation_length", cls.translation_length}};
}

std::string digest_hex(const std::string& data) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex;
    for (int shift = 60; shift >= 0; shift -= 4) out << ((hash >> shift) & 0xF);
    return out.str();
}

Json make_envelope(const std::string& command, const std::string& input_digest, Json payload,
                   double timing_ms) {
    return Json{{"command", command},
                {"input_digest", input_digest},
                {"version", kToolVersion},
                {"payload", std::move(payload)},
                {"timing_ms", timing_ms}};
}

}  // namespace oforge
