#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oforge/graph.hpp"

namespace oforge {

/// A block of a ball certified to be a complete lobe of the infinite digraph.
struct CertifiedLobe {
    std::vector<int> vertices;  // ball indices, sorted ascending
    std::string tag;            // lobe tag when the ball carries tags
};

struct LobeSet {
    std::vector<CertifiedLobe> certified;
    std::vector<std::vector<int>> boundary_blocks;  // blocks touching the horizon
};

/// Biconnected-component decomposition of the ball. A block is certified
/// when it provably equals a lobe of the infinite digraph: for lobe-tagged
/// balls, when it has a single tag and the full lobe vertex count; otherwise
/// when all its vertices are strictly interior (depth <= r-1).
LobeSet lobes(const Ball& ball);

/// Articulation points of the ball at depth <= r-1, whose neighborhoods are
/// complete, hence genuine cut vertices of the infinite digraph.
std::vector<int> cut_vertices(const Ball& ball);

struct BlockCutTree {
    std::vector<int> cuts;          // ball vertex indices, part V1
    std::vector<CertifiedLobe> lobe_nodes;  // part V2
    std::vector<std::vector<int>> adjacency;  // node k: k<cuts.size() cut, else lobe
    std::optional<int> root;        // node index of the ball root, when certified
    const Ball* ball = nullptr;

    int node_count() const { return static_cast<int>(cuts.size() + lobe_nodes.size()); }
    bool is_lobe_node(int k) const { return k >= static_cast<int>(cuts.size()); }
    std::optional<int> node_of_ball_vertex(int ball_index) const;
    std::vector<int> distances_from(int node) const;
};

BlockCutTree block_cut_tree(const Ball& ball);

/// The tree node naming a certified lobe (anchor address + lobe choice).
TreeNode lobe_tree_node(const Ball& ball, const CertifiedLobe& lobe);

enum class EndClass { kZero, kOne, kTwo, kUncountable, kUnresolved };
const char* to_string(EndClass c);

struct EndReport {
    EndClass classification = EndClass::kUnresolved;
    std::vector<int> certificate;  // c_r for r = 0..R
    bool monotone = false;
    // Uncountable is concluded from certified branching growth plus
    // vertex-transitivity, not from a finite observation alone.
    bool theorem_inference = false;
};

EndReport classify_ends(const ValidatedAmalgam& amalgam, int max_radius,
                        std::size_t cap = kDefaultVertexCap);
EndReport classify_ends(const OrbitalHandle& handle, int max_radius,
                        std::size_t cap = kDefaultVertexCap);
EndReport classify_ends(const FiniteDigraph& digraph);

struct QIViolation {
    VertexId u;
    VertexId v;
    int d1;
    int d2;
};

struct QIReport {
    int m1 = 0;  // d_{Gamma1}(alpha2, beta2)
    int m2 = 0;  // d_{Gamma2}(alpha1, beta1)
    int a = 0;   // max(m1, m2)
    std::size_t verified_pairs = 0;
    std::vector<QIViolation> violations;
    bool valid() const { return violations.empty() && a >= 1; }
};

/// Verifies (1/a) d1 <= d2 <= a d1 over all vertex pairs lying in the
/// radius-r balls of both digraphs.
QIReport quasi_isometry_check(const OrbitalHandle& h1, const OrbitalHandle& h2, int radius,
                              std::size_t cap = kDefaultVertexCap,
                              Kernel kernel = Kernel::kParallel);

/// BFS distance rows from each source over the ball's undirected adjacency.
std::vector<std::vector<int>> ball_distance_matrix(const Ball& ball,
                                                   const std::vector<int>& sources,
                                                   Kernel kernel = Kernel::kParallel);

struct TreeIsometryClass {
    enum class Kind { kElliptic, kHyperbolic };
    Kind kind = Kind::kElliptic;
    TreeNode witness;            // fixed node, or an axis sample
    int translation_length = 0;  // 0 for elliptic
};

/// Elliptic/hyperbolic classification of the action of g on the
/// block-cut-vertex tree, by minimizing displacement over the tree ball of
/// radius R. Throws UnresolvedError when the minimum is only attained on the
/// boundary.
TreeIsometryClass classify_tree_automorphism(const ValidatedAmalgam& amalgam, const NormalForm& g,
                                             int tree_radius);

/// All tree nodes within the given tree radius, in (depth, address) order.
std::vector<TreeNode> tree_ball(const ValidatedAmalgam& amalgam, int tree_radius);

}  // namespace oforge
