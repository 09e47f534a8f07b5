#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oforge {

using Point = int;

inline constexpr std::size_t kDefaultElementCap = 1'000'000;

/// A permutation of {0, ..., degree-1}, stored as its image list.
/// Permutations act on the right: apply(p) is p^g.
class Permutation {
public:
    explicit Permutation(std::vector<Point> images);
    static Permutation identity(int degree);

    int degree() const { return static_cast<int>(images_.size()); }
    Point apply(Point p) const { return images_[static_cast<std::size_t>(p)]; }

    /// Group product this * then, i.e. "apply this, then `then`".
    Permutation compose(const Permutation& then) const;
    Permutation inverse() const;
    bool is_identity() const;

    const std::vector<Point>& images() const { return images_; }
    std::string to_string() const;  // "[1,2,0]"

    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<Point> images_;
};

struct PrimitivityResult {
    bool primitive = false;
    // When imprimitive: a minimal nontrivial block containing point 0, sorted.
    std::vector<Point> witness_block;
};

/// Digraph on {0..vertex_count-1} without loops or duplicate arcs.
/// Arcs are kept sorted, so equality is arc-set equality.
struct FiniteDigraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> arcs;

    FiniteDigraph() = default;
    FiniteDigraph(int n, std::vector<std::pair<int, int>> arc_list);

    bool has_arc(int u, int v) const;
    std::vector<std::vector<int>> undirected_adjacency() const;
    std::vector<int> neighbors_of(int v) const;  // undirected, sorted
    int distance(int u, int v) const;            // undirected BFS; -1 if unreachable
    int eccentricity(int v) const;               // -1 if graph disconnected from v
    bool is_connected() const;

    bool operator==(const FiniteDigraph&) const = default;
};

/// Brute-force digraph isomorphism for small vertex counts.
bool digraphs_isomorphic(const FiniteDigraph& a, const FiniteDigraph& b);

/// Finite permutation group given by generators. Immutable after
/// construction; the element list is materialized on demand (capped) and
/// shared between copies.
class FiniteGroup {
public:
    FiniteGroup(int degree, std::vector<Permutation> generators);

    int degree() const { return degree_; }
    const std::vector<Permutation>& generators() const { return generators_; }

    /// All group elements, sorted by image list. Throws CapacityError if the
    /// closure exceeds the cap.
    const std::vector<Permutation>& elements() const;
    std::size_t order() const { return elements().size(); }
    bool contains(const Permutation& g) const;

    std::vector<Point> orbit(Point p) const;  // sorted
    bool is_transitive() const;

    FiniteGroup point_stabilizer(Point p) const;
    FiniteGroup setwise_stabilizer(std::span<const Point> subset) const;
    FiniteGroup pointwise_stabilizer(std::span<const Point> subset) const;

    /// Minimal-block closure over pairs {0, i}. Requires transitivity.
    PrimitivityResult primitivity() const;
    bool is_primitive() const { return primitivity().primitive; }
    bool is_regular() const;

    /// One digraph per non-diagonal arc orbit, deduplicated as arc sets,
    /// ordered by their least arc. Works for intransitive groups too.
    std::vector<FiniteDigraph> orbital_digraphs() const;

private:
    struct ElementCache {
        std::once_flag once;
        std::vector<Permutation> elems;
    };

    int degree_;
    std::vector<Permutation> generators_;
    std::shared_ptr<ElementCache> cache_;
};

/// Closure of a generating set, sorted; shared by FiniteGroup::elements and
/// subgroup-interpolation checks.
std::vector<Permutation> generate_closure(int degree,
                                          const std::vector<Permutation>& gens,
                                          std::size_t cap = kDefaultElementCap);

}  // namespace oforge
