#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oforge/decompose.hpp"
#include "oforge/graph.hpp"

namespace oforge {

/// Descriptor of a canonical connectivity-one orbital digraph Gamma(m, Lambda):
/// the multiplicity, the lobe digraph with its acting group, a seed arc
/// realizing it, and the lobe vertex set at the root.
struct CanonicalDescriptor {
    int multiplicity = 0;
    FiniteDigraph lobe_digraph;
    FiniteGroup lobe_action;
    OrbitalHandle seed;
    std::vector<VertexId> root_lobe;
};

/// The amalgam's own digraph as a canonical descriptor, re-verified on a
/// radius-3 ball (lobes isomorphic to Lambda, induced lobe groups primitive
/// and non-regular, at least three lobe vertices).
CanonicalDescriptor construct_canonical(const ValidatedAmalgam& amalgam);

/// Induced permutation group on a certified lobe's vertices, obtained from
/// the conjugate of the lobe group by the anchor word (never by search).
FiniteGroup lobe_group(const ValidatedAmalgam& amalgam, const Ball& ball,
                       const CertifiedLobe& lobe);

/// One canonical descriptor per non-diagonal orbital digraph of the lobe
/// group on its carrier, each re-verified on a radius-2 ball.
std::vector<CanonicalDescriptor> enumerate_canonical(const ValidatedAmalgam& amalgam);

/// Equivalence of canonical digraphs: same multiplicity and coinciding lobe
/// vertex sets at every certified lobe position comparable between the two
/// radius-r balls.
bool check_equivalence(const CanonicalDescriptor& d1, const CanonicalDescriptor& d2, int radius);

struct RefinementStage {
    VertexId seed_alpha;
    VertexId seed_beta;
    bool connectivity_one = false;
    std::vector<VertexId> lobe_vertices;  // empty when the stage only reseeded
    std::string group_marker;
    int lobe_end_count = -1;  // -1 when no lobe was taken
};

struct RefinementTrace {
    std::vector<RefinementStage> stages;
    int terminal_index = 0;  // n
    bool resolved = false;
    int matched_descriptor = -1;  // index into enumerate_canonical
};

struct RefineCaps {
    int max_stages = 3;
    int search_radius = 3;
    int lobe_radius = 6;
    std::size_t vertex_cap = kDefaultVertexCap;
};

struct RefineResult {
    std::optional<CanonicalDescriptor> descriptor;
    RefinementTrace trace;
};

/// The refinement loop: reseed by suborbit representatives in increasing
/// distance until the orbital digraph is certified connectivity-one, then
/// take the certified lobe at the root; finite lobes end the chain. The
/// terminal descriptor is checked against the enumerated family.
RefineResult refine_to_canonical(const OrbitalHandle& handle, const RefineCaps& caps = {});

/// Whether the handle's orbital digraph has connectivity one (the root
/// separates it), decided through the end-component machinery.
bool is_connectivity_one(const OrbitalHandle& handle, std::size_t cap = kDefaultVertexCap);

struct CentroidResult {
    TreeNode node;
    int distance = 0;  // common distance from the lobe vertices
};

/// The tree vertex of T2 minimizing the maximum distance to the given lobe
/// vertex set, asserted equidistant from all of them.
CentroidResult centroid(const std::vector<VertexId>& lobe_vertices, const BlockCutTree& t2);

struct FundamentalDomainReport {
    int vertex_orbit_count = 0;
    int arc_orbit_count = 0;
    std::vector<std::string> inversion_witnesses;
    std::string segment;  // "(alpha, x)"
    std::size_t covered_nodes = 0;
    std::size_t covered_arcs = 0;
    bool valid() const {
        return vertex_orbit_count == 2 && arc_orbit_count == 1 && inversion_witnesses.empty();
    }
};

/// Constructive orbit cover of the tree ball from the segment {alpha, x}:
/// every node is reached from alpha or x by an explicitly built group
/// element, every incident arc from the segment arc, with no inversions.
FundamentalDomainReport verify_segment_fundamental_domain(const ValidatedAmalgam& amalgam,
                                                          int tree_radius);

struct DecompositionReport {
    bool edge_group_nontrivial = false;
    bool edge_group_maximal = false;
    bool fixes_no_other_point = false;
    std::size_t vertex_group_order = 0;
    std::size_t edge_group_order = 0;
    std::size_t lobe_group_order = 0;
    bool valid() const {
        return edge_group_nontrivial && edge_group_maximal && fixes_no_other_point;
    }
};

/// Finite verification of the amalgam decomposition: H non-trivial, maximal
/// in P by exhaustive interpolation, fixing no carrier point besides delta.
DecompositionReport amalgam_decomposition_report(const ValidatedAmalgam& amalgam);

struct BlockSearchReport {
    bool witness_found = false;
    int radius = 0;
    std::vector<std::vector<VertexId>> witness_partition;  // interior classes
};

/// Searches for a nontrivial partition of the radius-r ball compatible with
/// the group action (closed under generators within radius r-1).
/// Falsification evidence for primitivity, not a proof.
BlockSearchReport block_search(const ValidatedAmalgam& amalgam, int radius,
                               std::size_t cap = kDefaultVertexCap);

}  // namespace oforge
