#include "oforge/perm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "oforge/errors.hpp"

namespace oforge {

Permutation::Permutation(std::vector<Point> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (Point p : images_) {
        if (p < 0 || static_cast<std::size_t>(p) >= images_.size() || seen[static_cast<std::size_t>(p)]) {
            throw InputError("image list is not a permutation");
        }
        seen[static_cast<std::size_t>(p)] = true;
    }
}

Permutation Permutation::identity(int degree) {
    std::vector<Point> images(static_cast<std::size_t>(degree));
    std::iota(images.begin(), images.end(), 0);
    return Permutation(std::move(images));
}

Permutation Permutation::compose(const Permutation& then) const {
    std::vector<Point> images(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
        images[i] = then.images_[static_cast<std::size_t>(images_[i])];
    }
    return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
    std::vector<Point> images(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) {
        images[static_cast<std::size_t>(images_[i])] = static_cast<Point>(i);
    }
    return Permutation(std::move(images));
}

bool Permutation::is_identity() const {
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (images_[i] != static_cast<Point>(i)) return false;
    }
    return true;
}

std::string Permutation::to_string() const {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < images_.size(); ++i) {
        if (i) out << ',';
        out << images_[i];
    }
    out << ']';
    return out.str();
}

FiniteDigraph::FiniteDigraph(int n, std::vector<std::pair<int, int>> arc_list)
    : vertex_count(n), arcs(std::move(arc_list)) {
    for (auto& [u, v] : arcs) {
        if (u < 0 || u >= n || v < 0 || v >= n) throw InputError("arc endpoint out of range");
        if (u == v) throw InputError("loops are not allowed");
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
}

bool FiniteDigraph::has_arc(int u, int v) const {
    return std::binary_search(arcs.begin(), arcs.end(), std::make_pair(u, v));
}

std::vector<std::vector<int>> FiniteDigraph::undirected_adjacency() const {
    std::vector<std::set<int>> adj(static_cast<std::size_t>(vertex_count));
    for (auto& [u, v] : arcs) {
        adj[static_cast<std::size_t>(u)].insert(v);
        adj[static_cast<std::size_t>(v)].insert(u);
    }
    std::vector<std::vector<int>> out(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
    return out;
}

std::vector<int> FiniteDigraph::neighbors_of(int v) const {
    std::set<int> result;
    for (auto& [a, b] : arcs) {
        if (a == v) result.insert(b);
        if (b == v) result.insert(a);
    }
    return {result.begin(), result.end()};
}

int FiniteDigraph::distance(int u, int v) const {
    if (u == v) return 0;
    auto adj = undirected_adjacency();
    std::vector<int> dist(static_cast<std::size_t>(vertex_count), -1);
    dist[static_cast<std::size_t>(u)] = 0;
    std::deque<int> queue{u};
    while (!queue.empty()) {
        int x = queue.front();
        queue.pop_front();
        for (int y : adj[static_cast<std::size_t>(x)]) {
            if (dist[static_cast<std::size_t>(y)] < 0) {
                dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                if (y == v) return dist[static_cast<std::size_t>(y)];
                queue.push_back(y);
            }
        }
    }
    return -1;
}

int FiniteDigraph::eccentricity(int v) const {
    int ecc = 0;
    for (int u = 0; u < vertex_count; ++u) {
        int d = distance(v, u);
        if (d < 0) return -1;
        ecc = std::max(ecc, d);
    }
    return ecc;
}

bool FiniteDigraph::is_connected() const {
    if (vertex_count == 0) return true;
    return eccentricity(0) >= 0;
}

namespace {

bool iso_extend(const FiniteDigraph& a, const FiniteDigraph& b, std::vector<int>& map,
                std::vector<bool>& used, int next) {
    int n = a.vertex_count;
    if (next == n) return true;
    for (int cand = 0; cand < n; ++cand) {
        if (used[static_cast<std::size_t>(cand)]) continue;
        bool ok = true;
        for (int prev = 0; prev < next && ok; ++prev) {
            int pm = map[static_cast<std::size_t>(prev)];
            if (a.has_arc(prev, next) != b.has_arc(pm, cand)) ok = false;
            if (a.has_arc(next, prev) != b.has_arc(cand, pm)) ok = false;
        }
        if (!ok) continue;
        map[static_cast<std::size_t>(next)] = cand;
        used[static_cast<std::size_t>(cand)] = true;
        if (iso_extend(a, b, map, used, next + 1)) return true;
        used[static_cast<std::size_t>(cand)] = false;
    }
    return false;
}

}  // namespace

bool digraphs_isomorphic(const FiniteDigraph& a, const FiniteDigraph& b) {
    if (a.vertex_count != b.vertex_count) return false;
    if (a.arcs.size() != b.arcs.size()) return false;
    std::vector<int> map(static_cast<std::size_t>(a.vertex_count), -1);
    std::vector<bool> used(static_cast<std::size_t>(a.vertex_count), false);
    return iso_extend(a, b, map, used, 0);
}

std::vector<Permutation> generate_closure(int degree, const std::vector<Permutation>& gens,
                                          std::size_t cap) {
    std::set<Permutation> seen;
    std::deque<Permutation> queue;
    Permutation id = Permutation::identity(degree);
    seen.insert(id);
    queue.push_back(id);
    while (!queue.empty()) {
        Permutation x = queue.front();
        queue.pop_front();
        for (const Permutation& g : gens) {
            Permutation y = x.compose(g);
            if (seen.insert(y).second) {
                if (seen.size() > cap) {
                    throw CapacityError("group element enumeration exceeds cap", seen.size());
                }
                queue.push_back(std::move(y));
            }
        }
    }
    return {seen.begin(), seen.end()};
}

FiniteGroup::FiniteGroup(int degree, std::vector<Permutation> generators)
    : degree_(degree),
      generators_(std::move(generators)),
      cache_(std::make_shared<ElementCache>()) {
    for (const Permutation& g : generators_) {
        if (g.degree() != degree_) throw InputError("generator degree mismatch");
    }
}

const std::vector<Permutation>& FiniteGroup::elements() const {
    std::call_once(cache_->once, [this] {
        cache_->elems = generate_closure(degree_, generators_);
    });
    return cache_->elems;
}

bool FiniteGroup::contains(const Permutation& g) const {
    const auto& elems = elements();
    return std::binary_search(elems.begin(), elems.end(), g);
}

std::vector<Point> FiniteGroup::orbit(Point p) const {
    if (p < 0 || p >= degree_) throw InputError("point out of range");
    std::vector<bool> seen(static_cast<std::size_t>(degree_), false);
    seen[static_cast<std::size_t>(p)] = true;
    std::deque<Point> queue{p};
    std::vector<Point> result{p};
    while (!queue.empty()) {
        Point x = queue.front();
        queue.pop_front();
        for (const Permutation& g : generators_) {
            Point y = g.apply(x);
            if (!seen[static_cast<std::size_t>(y)]) {
                seen[static_cast<std::size_t>(y)] = true;
                result.push_back(y);
                queue.push_back(y);
            }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

bool FiniteGroup::is_transitive() const {
    return static_cast<int>(orbit(0).size()) == degree_;
}

FiniteGroup FiniteGroup::point_stabilizer(Point p) const {
    if (p < 0 || p >= degree_) throw InputError("point out of range");
    // Orbit with transversal, then Schreier generators.
    std::map<Point, Permutation> transversal;
    transversal.emplace(p, Permutation::identity(degree_));
    std::deque<Point> queue{p};
    while (!queue.empty()) {
        Point x = queue.front();
        queue.pop_front();
        for (const Permutation& g : generators_) {
            Point y = g.apply(x);
            if (!transversal.count(y)) {
                transversal.emplace(y, transversal.at(x).compose(g));
                queue.push_back(y);
            }
        }
    }
    std::set<Permutation> gens;
    for (const auto& [x, ux] : transversal) {
        for (const Permutation& g : generators_) {
            Point y = g.apply(x);
            Permutation schreier = ux.compose(g).compose(transversal.at(y).inverse());
            if (!schreier.is_identity()) gens.insert(std::move(schreier));
        }
    }
    return FiniteGroup(degree_, {gens.begin(), gens.end()});
}

FiniteGroup FiniteGroup::setwise_stabilizer(std::span<const Point> subset) const {
    std::set<Point> target(subset.begin(), subset.end());
    for (Point p : target) {
        if (p < 0 || p >= degree_) throw InputError("point out of range");
    }
    std::vector<Permutation> kept;
    for (const Permutation& g : elements()) {
        std::set<Point> image;
        for (Point p : target) image.insert(g.apply(p));
        if (image == target) kept.push_back(g);
    }
    return FiniteGroup(degree_, std::move(kept));
}

FiniteGroup FiniteGroup::pointwise_stabilizer(std::span<const Point> subset) const {
    for (Point p : subset) {
        if (p < 0 || p >= degree_) throw InputError("point out of range");
    }
    std::vector<Permutation> kept;
    for (const Permutation& g : elements()) {
        bool fixes = true;
        for (Point p : subset) {
            if (g.apply(p) != p) {
                fixes = false;
                break;
            }
        }
        if (fixes) kept.push_back(g);
    }
    return FiniteGroup(degree_, std::move(kept));
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    // Returns false if already joined.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (a > b) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        return true;
    }
};

}  // namespace

PrimitivityResult FiniteGroup::primitivity() const {
    if (!is_transitive()) {
        throw InputError("primitivity is only defined for transitive groups here");
    }
    if (degree_ == 1) return {true, {}};
    for (Point i = 1; i < degree_; ++i) {
        // Minimal block system in which 0 and i share a block.
        UnionFind uf(degree_);
        uf.unite(0, i);
        std::deque<std::pair<Point, Point>> queue{{0, i}};
        while (!queue.empty()) {
            auto [x, y] = queue.front();
            queue.pop_front();
            for (const Permutation& g : generators_) {
                int u = uf.find(g.apply(x));
                int v = uf.find(g.apply(y));
                if (u != v) {
                    uf.unite(u, v);
                    queue.emplace_back(u, v);
                }
            }
        }
        std::vector<Point> block;
        int root = uf.find(0);
        for (Point p = 0; p < degree_; ++p) {
            if (uf.find(p) == root) block.push_back(p);
        }
        if (static_cast<int>(block.size()) < degree_) {
            return {false, block};
        }
    }
    return {true, {}};
}

bool FiniteGroup::is_regular() const {
    if (!is_transitive()) {
        throw InputError("regularity is only defined for transitive groups here");
    }
    return point_stabilizer(0).elements().size() == 1;
}

std::vector<FiniteDigraph> FiniteGroup::orbital_digraphs() const {
    std::set<std::pair<Point, Point>> visited;
    std::vector<FiniteDigraph> result;
    for (Point a = 0; a < degree_; ++a) {
        for (Point b = 0; b < degree_; ++b) {
            if (a == b || visited.count({a, b})) continue;
            // Arc orbit of (a, b) under the generators.
            std::set<std::pair<Point, Point>> orbit_arcs{{a, b}};
            std::deque<std::pair<Point, Point>> queue{{a, b}};
            while (!queue.empty()) {
                auto [x, y] = queue.front();
                queue.pop_front();
                for (const Permutation& g : generators_) {
                    std::pair<Point, Point> img{g.apply(x), g.apply(y)};
                    if (orbit_arcs.insert(img).second) queue.push_back(img);
                }
            }
            visited.insert(orbit_arcs.begin(), orbit_arcs.end());
            result.emplace_back(degree_,
                                std::vector<std::pair<int, int>>(orbit_arcs.begin(), orbit_arcs.end()));
        }
    }
    // Orbits partition the pairs, but keep the set-equality merge in case a
    // caller feeds arcs back through a quotient.
    std::vector<FiniteDigraph> unique;
    for (auto& d : result) {
        bool dup = false;
        for (const auto& u : unique) {
            if (u == d) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(d));
    }
    return unique;
}

const char* to_string(ValidationCode code) {
    switch (code) {
        case ValidationCode::kEdgeGroupMismatch: return "edge group does not match the base point stabilizer";
        case ValidationCode::kEmbeddingNotHomomorphic: return "embedding is not a homomorphism";
        case ValidationCode::kEmbeddingNotInjective: return "embedding is not injective";
        case ValidationCode::kEmbeddingImageNotInVertexGroup: return "embedding image is not inside the vertex group";
        case ValidationCode::kIndexTooSmall: return "vertex group index over the edge group is below 2";
        case ValidationCode::kLobeTooSmall: return "lobe carrier has fewer than 3 points";
        case ValidationCode::kLobeGroupIntransitive: return "lobe group intransitive";
        case ValidationCode::kLobeGroupImprimitive: return "lobe group imprimitive";
        case ValidationCode::kLobeGroupRegular: return "lobe group regular";
        case ValidationCode::kDiagonalLambdaArc: return "lobe arc is diagonal";
        case ValidationCode::kOutOfRange: return "value out of range";
    }
    return "unknown validation error";
}

}  // namespace oforge
