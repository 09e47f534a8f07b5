#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "oforge/canonical.hpp"
#include "oforge/decompose.hpp"
#include "oforge/graph.hpp"

namespace oforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

Json ball_to_json(const Ball& ball);
std::string ball_to_dot(const Ball& ball);
std::string block_cut_tree_to_dot(const BlockCutTree& tree);
std::string digraph_to_dot(const FiniteDigraph& digraph, const std::string& name);

Json end_report_to_json(const EndReport& report);
Json qi_report_to_json(const QIReport& report);
Json suborbit_report_to_json(const SuborbitReport& report);
Json descriptor_to_json(const CanonicalDescriptor& descriptor);
Json trace_to_json(const RefinementTrace& trace);
Json decomposition_report_to_json(const DecompositionReport& report);
Json fundamental_domain_to_json(const FundamentalDomainReport& report);
Json block_search_to_json(const BlockSearchReport& report);
Json tree_class_to_json(const TreeIsometryClass& cls);

std::string digest_hex(const std::string& data);  // FNV-1a 64, 16 hex digits

Json make_envelope(const std::string& command, const std::string& input_digest,
                   Json payload, double timing_ms);

}  // namespace oforge
