#pragma once

#include <cstddef>
#include <string>

#include "oforge/amalgam.hpp"
#include "oforge/graph.hpp"

namespace oforge {

struct Limits {
    std::size_t max_vertices = kDefaultVertexCap;
    int max_radius = 16;
};

struct SpecFile {
    AmalgamSpec spec;
    Limits limits;
    std::string raw;  // the file bytes, for digests
};

/// Line-oriented key-value format with named group blocks:
///
///   group P { degree 3  /  gen (0 1 2)  /  gen (1 2) }
///   amalgam { lobe_group P / vertex_group A / delta 0
///             / embed (1 2) -> (0 1) / lambda_arc 0 1 }
///   limits { max_vertices N / max_radius N }        (optional)
///
/// Unknown keys are rejected with the offending line number.
SpecFile parse_spec_text(const std::string& text);
SpecFile parse_spec_file(const std::string& path);

/// Accepts cycle notation "(0 1 2)(3 4)" or an image list "[1,2,0]".
Permutation parse_permutation(const std::string& text, int degree);

}  // namespace oforge
