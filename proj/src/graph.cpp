#include "oforge/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <unordered_set>

#include "oforge/errors.hpp"

namespace oforge {

VertexId VertexId::parent() const {
    if (steps_.empty()) throw InputError("the root has no parent");
    return VertexId(std::vector<AddressStep>(steps_.begin(), steps_.end() - 1));
}

VertexId VertexId::child(int lobe, Point vertex) const {
    std::vector<AddressStep> steps = steps_;
    steps.push_back({lobe, vertex});
    return VertexId(std::move(steps));
}

std::string VertexId::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (i) out << '/';
        out << 'l' << steps_[i].lobe << ".v" << steps_[i].vertex;
    }
    return out.str();
}

VertexId VertexId::parse(const std::string& text) {
    if (text.empty()) return VertexId{};
    std::vector<AddressStep> steps;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('/', pos);
        if (end == std::string::npos) end = text.size();
        std::string part = text.substr(pos, end - pos);
        std::size_t dot = part.find(".v");
        if (part.size() < 4 || part[0] != 'l' || dot == std::string::npos) {
            throw InputError("bad address step '" + part + "'");
        }
        try {
            int lobe = std::stoi(part.substr(1, dot - 1));
            Point vertex = std::stoi(part.substr(dot + 2));
            steps.push_back({lobe, vertex});
        } catch (const std::exception&) {
            throw InputError("bad address step '" + part + "'");
        }
        pos = end + 1;
    }
    return VertexId(std::move(steps));
}

std::string TreeNode::to_string() const {
    if (!is_lobe) return vertex.to_string();
    return vertex.to_string() + "#" + std::to_string(lobe);
}

namespace {

// One entry per T-edge on the path from the tree root: (0, lobe-choice) for
// the edge into a lobe node, (1, in-lobe label) for the edge into the vertex
// below it.
std::vector<std::pair<int, int>> tree_tokens(const TreeNode& node) {
    std::vector<std::pair<int, int>> tokens;
    for (const AddressStep& s : node.vertex.steps()) {
        tokens.emplace_back(0, s.lobe);
        tokens.emplace_back(1, s.vertex);
    }
    if (node.is_lobe) tokens.emplace_back(0, node.lobe);
    return tokens;
}

}  // namespace

int tree_depth(const TreeNode& node) {
    return 2 * static_cast<int>(node.vertex.length()) + (node.is_lobe ? 1 : 0);
}

int tree_distance(const TreeNode& a, const TreeNode& b) {
    auto ta = tree_tokens(a);
    auto tb = tree_tokens(b);
    std::size_t common = 0;
    while (common < ta.size() && common < tb.size() && ta[common] == tb[common]) ++common;
    return static_cast<int>(ta.size() - common) + static_cast<int>(tb.size() - common);
}

void check_address(const ValidatedAmalgam& amalgam, const VertexId& v) {
    const auto& steps = v.steps();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].lobe < 0 || steps[i].lobe >= amalgam.multiplicity()) {
            throw InputError("lobe choice out of range in address " + v.to_string());
        }
        if (i > 0 && steps[i].lobe == 0) {
            throw InputError("non-leading step uses lobe choice 0 in " + v.to_string());
        }
        if (steps[i].vertex < 0 || steps[i].vertex >= amalgam.lobe_size() ||
            steps[i].vertex == amalgam.delta()) {
            throw InputError("in-lobe label out of range in address " + v.to_string());
        }
    }
}

NormalForm word_of_vertex(const ValidatedAmalgam& amalgam, const VertexId& v) {
    check_address(amalgam, v);
    std::vector<Syllable> syllables;
    const auto& steps = v.steps();
    for (std::size_t i = steps.size(); i-- > 0;) {
        syllables.push_back(
            {Syllable::Side::kLobeGroup, amalgam.coset_index_for_point(steps[i].vertex)});
        if (steps[i].lobe != 0) {
            syllables.push_back({Syllable::Side::kVertexGroup, steps[i].lobe});
        }
    }
    return NormalForm(amalgam, Permutation::identity(amalgam.lobe_size()), std::move(syllables));
}

VertexId vertex_of_form(const ValidatedAmalgam& amalgam, const NormalForm& form) {
    // The coset A*x drops the head and any leading vertex-group syllable.
    const auto& sylls = form.syllables();
    std::size_t start = 0;
    if (!sylls.empty() && sylls[0].side == Syllable::Side::kVertexGroup) start = 1;
    std::vector<AddressStep> steps_rev;
    for (std::size_t i = start; i < sylls.size(); i += 2) {
        Point v = amalgam.point_for_coset(sylls[i].index);
        int lobe = 0;
        if (i + 1 < sylls.size()) lobe = sylls[i + 1].index;
        steps_rev.push_back({lobe, v});
    }
    std::vector<AddressStep> steps(steps_rev.rbegin(), steps_rev.rend());
    return VertexId(std::move(steps));
}

VertexId act_on_vertex(const ValidatedAmalgam& amalgam, const NormalForm& g, const VertexId& v) {
    return vertex_of_form(amalgam, amalgam.multiply(word_of_vertex(amalgam, v), g));
}

TreeNode lobe_at(const ValidatedAmalgam& amalgam, const VertexId& v, int lobe) {
    if (lobe < 0 || lobe >= amalgam.multiplicity()) throw InputError("lobe choice out of range");
    if (lobe == 0 && !v.is_root()) {
        return TreeNode::lobe_node(v.parent(), v.last().lobe);
    }
    return TreeNode::lobe_node(v, lobe);
}

TreeNode act_on_lobe(const ValidatedAmalgam& amalgam, const NormalForm& g, const TreeNode& node) {
    if (!node.is_lobe) throw InputError("not a lobe node");
    NormalForm word = word_of_vertex(amalgam, node.vertex);
    if (node.lobe != 0) {
        word = amalgam.multiply(
            amalgam.form_for_rep({Syllable::Side::kVertexGroup, node.lobe}), word);
    }
    word = amalgam.multiply(word, g);
    // Canonicalize the coset P*x: drop the head and a leading lobe-group
    // syllable; what remains is an A-leading tail naming (anchor, choice).
    const auto& sylls = word.syllables();
    std::size_t start = 0;
    if (!sylls.empty() && sylls[0].side == Syllable::Side::kLobeGroup) start = 1;
    if (start >= sylls.size()) return TreeNode::lobe_node(VertexId{}, 0);
    int choice = sylls[start].index;
    std::vector<Syllable> rest(sylls.begin() + static_cast<std::ptrdiff_t>(start) + 1, sylls.end());
    NormalForm anchor_form(amalgam, Permutation::identity(amalgam.lobe_size()), std::move(rest));
    return TreeNode::lobe_node(vertex_of_form(amalgam, anchor_form), choice);
}

TreeNode common_lobe(const TreeNode& u, const TreeNode& v) {
    if (u.is_lobe || v.is_lobe) throw InputError("common_lobe expects vertex nodes");
    const VertexId& a = u.vertex;
    const VertexId& b = v.vertex;
    if (a.length() == b.length() && !a.is_root()) {
        if (a.parent() == b.parent() && a.last().lobe == b.last().lobe) {
            return TreeNode::lobe_node(a.parent(), a.last().lobe);
        }
    } else if (a.length() == b.length() + 1) {
        if (a.parent() == b) return TreeNode::lobe_node(b, a.last().lobe);
    } else if (b.length() == a.length() + 1) {
        if (b.parent() == a) return TreeNode::lobe_node(a, b.last().lobe);
    }
    throw InputError("vertices do not share a lobe");
}

std::vector<NeighborInfo> neighbors(const ValidatedAmalgam& amalgam, const VertexId& v) {
    NormalForm word = word_of_vertex(amalgam, v);
    std::vector<NeighborInfo> result;
    result.reserve(static_cast<std::size_t>(amalgam.multiplicity()) *
                   amalgam.delta_adjacency().size());
    for (int lobe = 0; lobe < amalgam.multiplicity(); ++lobe) {
        for (const auto& [label, out, in] : amalgam.delta_adjacency()) {
            std::vector<Syllable> prefix{
                {Syllable::Side::kLobeGroup, amalgam.coset_index_for_point(label)}};
            if (lobe != 0) prefix.push_back({Syllable::Side::kVertexGroup, lobe});
            NormalForm step(amalgam, Permutation::identity(amalgam.lobe_size()), std::move(prefix));
            VertexId neighbor = vertex_of_form(amalgam, amalgam.multiply(step, word));
            result.push_back({std::move(neighbor), lobe, label, out, in});
        }
    }
    return result;
}

std::optional<int> Ball::index_of(const VertexId& v) const {
    auto it = index_.find(v.to_string());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::pair<int, int> Ball::sphere(int depth) const {
    auto lo = std::partition_point(vertices.begin(), vertices.end(),
                                   [&](const BallVertex& v) { return v.depth < depth; });
    auto hi = std::partition_point(lo, vertices.end(),
                                   [&](const BallVertex& v) { return v.depth <= depth; });
    return {static_cast<int>(lo - vertices.begin()), static_cast<int>(hi - vertices.begin())};
}

std::vector<std::vector<int>> Ball::undirected_adjacency() const {
    std::vector<std::set<int>> adj(vertices.size());
    for (const BallArc& arc : arcs) {
        adj[static_cast<std::size_t>(arc.from)].insert(arc.to);
        adj[static_cast<std::size_t>(arc.to)].insert(arc.from);
    }
    std::vector<std::vector<int>> out(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) out[i].assign(adj[i].begin(), adj[i].end());
    return out;
}

void Ball::finalize() {
    std::sort(vertices.begin(), vertices.end(), [](const BallVertex& a, const BallVertex& b) {
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id < b.id;
    });
    index_.clear();
    index_.reserve(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        index_.emplace(vertices[i].id.to_string(), static_cast<int>(i));
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
}

namespace {

// Generic BFS ball builder over a neighbor oracle returning
// (vertex, has_arc_out, has_arc_in, lobe_tag) tuples.
struct RawNeighbor {
    VertexId vertex;
    bool out;
    bool in;
    std::string tag;
};

template <typename NeighborFn>
Ball build_ball(VertexId root, int radius, std::size_t cap, Kernel kernel, bool tagged,
                int lobe_size, NeighborFn&& neighbor_fn) {
    const bool parallel = kernel == Kernel::kParallel;
    Ball ball;
    ball.root = root;
    ball.radius = radius;
    ball.lobe_tagged = tagged;
    ball.lobe_size = lobe_size;

    std::unordered_set<std::string> visited;
    visited.insert(root.to_string());
    std::vector<VertexId> current{root};
    ball.vertices.push_back({root, 0});

    for (int depth = 0; depth < radius && !current.empty(); ++depth) {
        std::vector<std::vector<RawNeighbor>> expansions(current.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(current.size()); ++i) {
            expansions[static_cast<std::size_t>(i)] =
                neighbor_fn(current[static_cast<std::size_t>(i)]);
        }
        std::vector<VertexId> next;
        for (const auto& bucket : expansions) {
            for (const RawNeighbor& n : bucket) {
                if (visited.insert(n.vertex.to_string()).second) {
                    next.push_back(n.vertex);
                }
            }
        }
        std::size_t projected = ball.vertices.size() + next.size();
        if (projected > cap) {
            throw CapacityError("ball expansion exceeds the vertex cap", projected);
        }
        std::sort(next.begin(), next.end());
        for (VertexId& v : next) ball.vertices.push_back({std::move(v), depth + 1});
        current.clear();
        auto [lo, hi] = std::pair<std::size_t, std::size_t>{ball.vertices.size() - next.size(),
                                                            ball.vertices.size()};
        for (std::size_t i = lo; i < hi; ++i) current.push_back(ball.vertices[i].id);
    }
    ball.finalize();

    // Arc pass over the finished vertex set: the ball is the induced
    // subdigraph, so every arc with both endpoints present is recorded.
    std::vector<std::vector<BallArc>> arc_buckets(ball.vertices.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(ball.vertices.size()); ++i) {
        const VertexId& v = ball.vertices[static_cast<std::size_t>(i)].id;
        for (const RawNeighbor& n : neighbor_fn(v)) {
            auto j = ball.index_of(n.vertex);
            if (!j) continue;
            if (n.out) arc_buckets[static_cast<std::size_t>(i)].push_back(
                {static_cast<int>(i), *j, n.tag});
            if (n.in) arc_buckets[static_cast<std::size_t>(i)].push_back(
                {*j, static_cast<int>(i), n.tag});
        }
    }
    for (auto& bucket : arc_buckets) {
        ball.arcs.insert(ball.arcs.end(), bucket.begin(), bucket.end());
    }
    ball.finalize();
    return ball;
}

}  // namespace

Ball expand_ball(const ValidatedAmalgam& amalgam, int radius, std::size_t cap, Kernel kernel) {
    if (radius < 0) throw InputError("radius must be non-negative");
    auto neighbor_fn = [&amalgam](const VertexId& v) {
        std::vector<RawNeighbor> out;
        for (NeighborInfo& n : neighbors(amalgam, v)) {
            std::string tag = lobe_at(amalgam, v, n.lobe_choice).to_string();
            out.push_back({std::move(n.vertex), n.arc_out, n.arc_in, std::move(tag)});
        }
        return out;
    };
    return build_ball(VertexId{}, radius, cap, kernel, true, amalgam.lobe_size(), neighbor_fn);
}

Ball expand_ball_serial(const ValidatedAmalgam& amalgam, int radius, std::size_t cap) {
    return expand_ball(amalgam, radius, cap, Kernel::kSerial);
}

OrbitalHandle::OrbitalHandle(ValidatedAmalgam amalgam, VertexId alpha, VertexId beta)
    : amalgam_(std::move(amalgam)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      t_span_(0),
      alpha_word_inv_(amalgam_.identity_form()),
      beta_word_inv_(amalgam_.identity_form()) {
    check_address(amalgam_, alpha_);
    check_address(amalgam_, beta_);
    if (alpha_ == beta_) {
        throw InputError("diagonal orbital digraphs are not represented");
    }
    t_span_ = tree_distance(TreeNode::omega(alpha_), TreeNode::omega(beta_));
    NormalForm alpha_word = word_of_vertex(amalgam_, alpha_);
    NormalForm beta_word = word_of_vertex(amalgam_, beta_);
    alpha_word_inv_ = amalgam_.invert(alpha_word);
    beta_word_inv_ = amalgam_.invert(beta_word);

    std::set<VertexId> out_set;
    std::set<VertexId> in_set;
    for (const Permutation& a : amalgam_.vertex_group().elements()) {
        NormalForm a_form = amalgam_.multiply_letter(amalgam_.identity_form(),
                                                     Syllable::Side::kVertexGroup, a);
        NormalForm g_alpha =
            amalgam_.multiply(amalgam_.multiply(alpha_word_inv_, a_form), alpha_word);
        NormalForm g_beta = amalgam_.multiply(amalgam_.multiply(beta_word_inv_, a_form), beta_word);
        out_set.insert(act_on_vertex(amalgam_, g_alpha, beta_));
        in_set.insert(act_on_vertex(amalgam_, g_beta, alpha_));
    }
    out_base_.assign(out_set.begin(), out_set.end());
    in_base_.assign(in_set.begin(), in_set.end());
}

std::vector<std::pair<VertexId, bool>> OrbitalHandle::neighbors(const VertexId& v) const {
    NormalForm word = word_of_vertex(amalgam_, v);
    NormalForm g_out = amalgam_.multiply(alpha_word_inv_, word);
    NormalForm g_in = amalgam_.multiply(beta_word_inv_, word);
    std::vector<std::pair<VertexId, bool>> result;
    result.reserve(out_base_.size() + in_base_.size());
    for (const VertexId& u : out_base_) {
        result.emplace_back(act_on_vertex(amalgam_, g_out, u), true);
    }
    for (const VertexId& u : in_base_) {
        result.emplace_back(act_on_vertex(amalgam_, g_in, u), false);
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

Ball orbital_ball(const OrbitalHandle& handle, int radius, std::size_t cap, Kernel kernel) {
    if (radius < 0) throw InputError("radius must be non-negative");
    const bool tagged = handle.t_span() == 2;
    const ValidatedAmalgam& amalgam = handle.amalgam();
    auto neighbor_fn = [&handle, &amalgam, tagged](const VertexId& v) {
        std::vector<RawNeighbor> out;
        for (auto& [vertex, outgoing] : handle.neighbors(v)) {
            std::string tag;
            if (tagged) {
                tag = common_lobe(TreeNode::omega(v), TreeNode::omega(vertex)).to_string();
            }
            out.push_back({vertex, outgoing, !outgoing, std::move(tag)});
        }
        // Merge out/in records for the same neighbor into one entry each way.
        std::vector<RawNeighbor> merged;
        for (RawNeighbor& n : out) {
            bool found = false;
            for (RawNeighbor& m : merged) {
                if (m.vertex == n.vertex) {
                    m.out = m.out || n.out;
                    m.in = m.in || n.in;
                    found = true;
                    break;
                }
            }
            if (!found) merged.push_back(std::move(n));
        }
        return merged;
    };
    return build_ball(handle.alpha(), radius, cap, kernel, tagged, amalgam.lobe_size(),
                      neighbor_fn);
}

Ball orbital_ball_serial(const OrbitalHandle& handle, int radius, std::size_t cap) {
    return orbital_ball(handle, radius, cap, Kernel::kSerial);
}

std::vector<NormalForm> root_stabilizer_forms(const ValidatedAmalgam& amalgam,
                                              const VertexId& root) {
    std::vector<NormalForm> forms;
    NormalForm word = word_of_vertex(amalgam, root);
    NormalForm word_inv = amalgam.invert(word);
    for (const Permutation& a : amalgam.vertex_group().elements()) {
        NormalForm a_form =
            amalgam.multiply_letter(amalgam.identity_form(), Syllable::Side::kVertexGroup, a);
        if (root.is_root()) {
            forms.push_back(std::move(a_form));
        } else {
            forms.push_back(amalgam.multiply(amalgam.multiply(word_inv, a_form), word));
        }
    }
    return forms;
}

namespace {

struct SimpleUnionFind {
    std::vector<int> parent;
    explicit SimpleUnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
    }
};

SuborbitReport suborbits_of_ball(const ValidatedAmalgam& amalgam, const Ball& ball, int rmax,
                                 Kernel kernel) {
    const bool parallel = kernel == Kernel::kParallel;
    std::vector<NormalForm> stab = root_stabilizer_forms(amalgam, ball.root);
    SuborbitReport report;
    for (int r = 0; r <= rmax; ++r) {
        auto [lo, hi] = ball.sphere(r);
        int count = hi - lo;
        if (count == 0) break;
        // Image table: for each sphere vertex, its images under the
        // stabilizer elements, as sphere-local indices.
        std::vector<std::vector<int>> images(static_cast<std::size_t>(count));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
        for (std::int64_t i = 0; i < count; ++i) {
            const VertexId& v = ball.vertices[static_cast<std::size_t>(lo + i)].id;
            std::vector<int> row;
            row.reserve(stab.size());
            for (const NormalForm& g : stab) {
                VertexId image = act_on_vertex(amalgam, g, v);
                auto idx = ball.index_of(image);
                if (!idx || *idx < lo || *idx >= hi) {
                    throw Error(ErrorFamily::kValidation,
                                "stabilizer action left the sphere");  // unreachable
                }
                row.push_back(*idx - lo);
            }
            images[static_cast<std::size_t>(i)] = std::move(row);
        }
        SimpleUnionFind uf(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            for (int j : images[static_cast<std::size_t>(i)]) uf.unite(i, j);
        }
        std::map<int, std::vector<VertexId>> classes;
        for (int i = 0; i < count; ++i) {
            classes[uf.find(i)].push_back(ball.vertices[static_cast<std::size_t>(lo + i)].id);
        }
        std::vector<std::vector<VertexId>> orbits;
        for (auto& [root_idx, members] : classes) orbits.push_back(std::move(members));
        // Sphere vertices are sorted, so classes keyed by least index are
        // already ordered by least member.
        report.orbits.push_back(std::move(orbits));
    }
    return report;
}

}  // namespace

SuborbitReport suborbits(const ValidatedAmalgam& amalgam, int rmax, std::size_t cap,
                         Kernel kernel) {
    Ball ball = expand_ball(amalgam, rmax, cap, kernel);
    return suborbits_of_ball(amalgam, ball, rmax, kernel);
}

SuborbitReport suborbits(const OrbitalHandle& handle, int rmax, std::size_t cap, Kernel kernel) {
    Ball ball = orbital_ball(handle, rmax, cap, kernel);
    return suborbits_of_ball(handle.amalgam(), ball, rmax, kernel);
}

std::vector<std::vector<std::size_t>> SuborbitReport::subdegrees() const {
    std::vector<std::vector<std::size_t>> result;
    for (const auto& sphere : orbits) {
        std::vector<std::size_t> sizes;
        sizes.reserve(sphere.size());
        for (const auto& orbit : sphere) sizes.push_back(orbit.size());
        result.push_back(std::move(sizes));
    }
    return result;
}

std::vector<std::size_t> SuborbitReport::flat_subdegrees() const {
    std::vector<std::size_t> result;
    for (const auto& sphere : subdegrees()) {
        result.insert(result.end(), sphere.begin(), sphere.end());
    }
    return result;
}

}  // namespace oforge
