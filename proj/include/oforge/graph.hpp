#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oforge/amalgam.hpp"
#include "oforge/parallel.hpp"
#include "oforge/perm.hpp"

namespace oforge {

inline constexpr std::size_t kDefaultVertexCap = 1'000'000;

/// Canonical address of a vertex of Omega = G/A: alternating
/// (lobe-choice, in-lobe vertex) steps from the root. The empty address is
/// the root. Steps after the first use lobe-choice >= 1, because choice 0 at
/// a non-root vertex names the lobe towards the root.
struct AddressStep {
    int lobe;
    Point vertex;
    friend auto operator<=>(const AddressStep&, const AddressStep&) = default;
};

class VertexId {
public:
    VertexId() = default;
    explicit VertexId(std::vector<AddressStep> steps) : steps_(std::move(steps)) {}

    bool is_root() const { return steps_.empty(); }
    std::size_t length() const { return steps_.size(); }
    const std::vector<AddressStep>& steps() const { return steps_; }
    VertexId parent() const;
    VertexId child(int lobe, Point vertex) const;
    const AddressStep& last() const { return steps_.back(); }

    std::string to_string() const;  // "l0.v1/l1.v2", root -> ""
    static VertexId parse(const std::string& text);

    friend bool operator==(const VertexId&, const VertexId&) = default;
    friend auto operator<=>(const VertexId& a, const VertexId& b) {
        if (auto c = a.steps_.size() <=> b.steps_.size(); c != 0) return c;
        return a.steps_ <=> b.steps_;
    }

private:
    std::vector<AddressStep> steps_;
};

/// A vertex of the block-cut-vertex tree T: either an Omega-vertex or a lobe,
/// the latter named by its anchor (the lobe's vertex nearest the root) and
/// the lobe choice at that anchor.
struct TreeNode {
    bool is_lobe = false;
    VertexId vertex;  // the vertex itself, or the lobe's anchor
    int lobe = 0;

    static TreeNode omega(VertexId v) { return {false, std::move(v), 0}; }
    static TreeNode lobe_node(VertexId anchor, int lobe) { return {true, std::move(anchor), lobe}; }

    std::string to_string() const;  // lobes as "<anchor>#<l>"
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
    friend auto operator<=>(const TreeNode&, const TreeNode&) = default;
};

/// Tree depth of a node (Omega-vertices at even depths, lobes at odd).
int tree_depth(const TreeNode& node);
int tree_distance(const TreeNode& a, const TreeNode& b);

/// Validates an address against the amalgam (labels in range, no step equal
/// to delta, descent after the first step).
void check_address(const ValidatedAmalgam& amalgam, const VertexId& v);

/// The canonical group word reaching a vertex; the root's word is the
/// identity. act(word_of_vertex(v), root) == v.
NormalForm word_of_vertex(const ValidatedAmalgam& amalgam, const VertexId& v);
VertexId vertex_of_form(const ValidatedAmalgam& amalgam, const NormalForm& form);

VertexId act_on_vertex(const ValidatedAmalgam& amalgam, const NormalForm& g, const VertexId& v);

/// Lobe-choice `lobe` at vertex `v`, normalized so choice 0 at a non-root
/// vertex resolves to the parent's lobe.
TreeNode lobe_at(const ValidatedAmalgam& amalgam, const VertexId& v, int lobe);
TreeNode act_on_lobe(const ValidatedAmalgam& amalgam, const NormalForm& g, const TreeNode& lobe);

/// The unique lobe containing an arc whose endpoints are at tree distance 2.
TreeNode common_lobe(const TreeNode& u, const TreeNode& v);

struct NeighborInfo {
    VertexId vertex;
    int lobe_choice;
    Point label;
    bool arc_out;  // arc from the queried vertex to `vertex`
    bool arc_in;
};

/// Adjacency in Gamma(m, Lambda), in canonical order (lobe choice, label).
std::vector<NeighborInfo> neighbors(const ValidatedAmalgam& amalgam, const VertexId& v);

struct BallVertex {
    VertexId id;
    int depth;
};

struct BallArc {
    int from;
    int to;
    std::string lobe;  // empty when the source digraph is not lobe-tagged
    friend auto operator<=>(const BallArc&, const BallArc&) = default;
};

/// Induced subdigraph of radius r around a root, with canonical vertex order
/// (depth, then address) and sorted arcs.
class Ball {
public:
    VertexId root;
    int radius = 0;
    std::vector<BallVertex> vertices;
    std::vector<BallArc> arcs;
    bool lobe_tagged = false;
    int lobe_size = 0;  // |V Lambda| of the tagging structure, when tagged

    std::optional<int> index_of(const VertexId& v) const;
    bool contains(const VertexId& v) const { return index_of(v).has_value(); }
    int depth_of(int index) const { return vertices[static_cast<std::size_t>(index)].depth; }
    /// Indices [first, last) of the vertices at the given depth.
    std::pair<int, int> sphere(int depth) const;
    std::vector<std::vector<int>> undirected_adjacency() const;

    void finalize();  // sorts, builds the index; called by the builders

private:
    std::unordered_map<std::string, int> index_;
};

Ball expand_ball(const ValidatedAmalgam& amalgam, int radius,
                 std::size_t cap = kDefaultVertexCap, Kernel kernel = Kernel::kParallel);
Ball expand_ball_serial(const ValidatedAmalgam& amalgam, int radius,
                        std::size_t cap = kDefaultVertexCap);

/// Handle on the orbital digraph (Omega, (alpha, beta)^G).
class OrbitalHandle {
public:
    OrbitalHandle(ValidatedAmalgam amalgam, VertexId alpha, VertexId beta);

    const ValidatedAmalgam& amalgam() const { return amalgam_; }
    const VertexId& alpha() const { return alpha_; }
    const VertexId& beta() const { return beta_; }
    int t_span() const { return t_span_; }

    /// Out- and in-neighbors of a vertex in the orbital digraph, exact via
    /// the finite suborbits of the seed under the root stabilizer.
    std::vector<std::pair<VertexId, bool>> neighbors(const VertexId& v) const;  // (vertex, outgoing)

private:
    ValidatedAmalgam amalgam_;
    VertexId alpha_;
    VertexId beta_;
    int t_span_;
    std::vector<VertexId> out_base_;  // beta^{G_alpha}
    std::vector<VertexId> in_base_;   // alpha^{G_beta}
    NormalForm alpha_word_inv_;
    NormalForm beta_word_inv_;
};

Ball orbital_ball(const OrbitalHandle& handle, int radius,
                  std::size_t cap = kDefaultVertexCap, Kernel kernel = Kernel::kParallel);
Ball orbital_ball_serial(const OrbitalHandle& handle, int radius,
                         std::size_t cap = kDefaultVertexCap);

struct SuborbitReport {
    /// orbits[r] = the G_root-orbits on the sphere of radius r, each orbit a
    /// sorted list of addresses; orbits ordered by least member.
    std::vector<std::vector<std::vector<VertexId>>> orbits;
    std::vector<std::vector<std::size_t>> subdegrees() const;
    std::vector<std::size_t> flat_subdegrees() const;
};

SuborbitReport suborbits(const ValidatedAmalgam& amalgam, int rmax,
                         std::size_t cap = kDefaultVertexCap, Kernel kernel = Kernel::kParallel);
SuborbitReport suborbits(const OrbitalHandle& handle, int rmax,
                         std::size_t cap = kDefaultVertexCap, Kernel kernel = Kernel::kParallel);

/// Root-stabilizer elements of the ball's root as normal forms (the image of
/// A conjugated to the root).
std::vector<NormalForm> root_stabilizer_forms(const ValidatedAmalgam& amalgam, const VertexId& root);

}  // namespace oforge
