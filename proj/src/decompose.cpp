#include "oforge/decompose.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>

#include "oforge/errors.hpp"

namespace oforge {

namespace {

struct BlockDecomposition {
    std::vector<std::vector<int>> blocks;     // vertex sets, each sorted
    std::vector<bool> articulation;
};

// Iterative Hopcroft–Tarjan on the undirected view of the ball.
BlockDecomposition biconnected_blocks(const std::vector<std::vector<int>>& adj) {
    int n = static_cast<int>(adj.size());
    BlockDecomposition result;
    result.articulation.assign(static_cast<std::size_t>(n), false);
    std::vector<int> disc(static_cast<std::size_t>(n), -1);
    std::vector<int> low(static_cast<std::size_t>(n), 0);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<int, int>> edge_stack;
    int timer = 0;

    for (int start = 0; start < n; ++start) {
        if (disc[static_cast<std::size_t>(start)] != -1) continue;
        // frame: (vertex, next child position)
        std::vector<std::pair<int, std::size_t>> stack{{start, 0}};
        disc[static_cast<std::size_t>(start)] = low[static_cast<std::size_t>(start)] = timer++;
        int root_children = 0;
        while (!stack.empty()) {
            auto& [u, pos] = stack.back();
            if (pos < adj[static_cast<std::size_t>(u)].size()) {
                int v = adj[static_cast<std::size_t>(u)][pos++];
                if (disc[static_cast<std::size_t>(v)] == -1) {
                    parent[static_cast<std::size_t>(v)] = u;
                    if (u == start) ++root_children;
                    edge_stack.emplace_back(u, v);
                    disc[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = timer++;
                    stack.emplace_back(v, 0);
                } else if (v != parent[static_cast<std::size_t>(u)] &&
                           disc[static_cast<std::size_t>(v)] < disc[static_cast<std::size_t>(u)]) {
                    edge_stack.emplace_back(u, v);
                    low[static_cast<std::size_t>(u)] =
                        std::min(low[static_cast<std::size_t>(u)], disc[static_cast<std::size_t>(v)]);
                }
            } else {
                stack.pop_back();
                if (stack.empty()) break;
                int p = stack.back().first;
                low[static_cast<std::size_t>(p)] =
                    std::min(low[static_cast<std::size_t>(p)], low[static_cast<std::size_t>(u)]);
                if (low[static_cast<std::size_t>(u)] >= disc[static_cast<std::size_t>(p)]) {
                    if (p != start || root_children > 1) {
                        result.articulation[static_cast<std::size_t>(p)] = true;
                    }
                    std::set<int> members;
                    while (!edge_stack.empty()) {
                        auto [a, b] = edge_stack.back();
                        if (disc[static_cast<std::size_t>(a)] < disc[static_cast<std::size_t>(u)] &&
                            !(a == p && b == u)) {
                            break;
                        }
                        edge_stack.pop_back();
                        members.insert(a);
                        members.insert(b);
                        if (a == p && b == u) break;
                    }
                    if (!members.empty()) {
                        result.blocks.emplace_back(members.begin(), members.end());
                    }
                }
            }
        }
    }
    std::sort(result.blocks.begin(), result.blocks.end());
    return result;
}

void require_connected(const Ball& ball) {
    if (ball.vertices.empty()) throw InputError("empty ball");
    auto adj = ball.undirected_adjacency();
    std::vector<bool> seen(ball.vertices.size(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                ++count;
                queue.push_back(v);
            }
        }
    }
    if (count != ball.vertices.size()) throw InputError("disconnected ball");
}

}  // namespace

LobeSet lobes(const Ball& ball) {
    require_connected(ball);
    auto decomposition = biconnected_blocks(ball.undirected_adjacency());

    // Arc tags keyed by unordered endpoint pair.
    std::map<std::pair<int, int>, std::string> edge_tags;
    if (ball.lobe_tagged) {
        for (const BallArc& arc : ball.arcs) {
            edge_tags[{std::min(arc.from, arc.to), std::max(arc.from, arc.to)}] = arc.lobe;
        }
    }

    LobeSet result;
    for (auto& block : decomposition.blocks) {
        bool certified = false;
        std::string tag;
        if (ball.lobe_tagged) {
            // A block is a complete lobe iff its arcs carry one tag and every
            // vertex of that lobe is present; ball blocks never span lobes.
            bool uniform = true;
            for (std::size_t i = 0; i < block.size() && uniform; ++i) {
                for (std::size_t j = i + 1; j < block.size() && uniform; ++j) {
                    auto it = edge_tags.find({block[i], block[j]});
                    if (it == edge_tags.end()) continue;
                    if (tag.empty()) {
                        tag = it->second;
                    } else if (tag != it->second) {
                        uniform = false;
                    }
                }
            }
            certified = uniform && static_cast<int>(block.size()) == ball.lobe_size;
        } else {
            certified = true;
            for (int v : block) {
                if (ball.depth_of(v) > ball.radius - 1) {
                    certified = false;
                    break;
                }
            }
        }
        if (certified) {
            result.certified.push_back({std::move(block), std::move(tag)});
        } else {
            result.boundary_blocks.push_back(std::move(block));
        }
    }
    return result;
}

std::vector<int> cut_vertices(const Ball& ball) {
    require_connected(ball);
    auto decomposition = biconnected_blocks(ball.undirected_adjacency());
    std::vector<int> result;
    for (std::size_t v = 0; v < ball.vertices.size(); ++v) {
        if (decomposition.articulation[v] &&
            ball.depth_of(static_cast<int>(v)) <= ball.radius - 1) {
            result.push_back(static_cast<int>(v));
        }
    }
    return result;
}

std::optional<int> BlockCutTree::node_of_ball_vertex(int ball_index) const {
    auto it = std::lower_bound(cuts.begin(), cuts.end(), ball_index);
    if (it == cuts.end() || *it != ball_index) return std::nullopt;
    return static_cast<int>(it - cuts.begin());
}

std::vector<int> BlockCutTree::distances_from(int node) const {
    std::vector<int> dist(static_cast<std::size_t>(node_count()), -1);
    dist[static_cast<std::size_t>(node)] = 0;
    std::deque<int> queue{node};
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (int v : adjacency[static_cast<std::size_t>(u)]) {
            if (dist[static_cast<std::size_t>(v)] < 0) {
                dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

BlockCutTree block_cut_tree(const Ball& ball) {
    BlockCutTree tree;
    tree.ball = &ball;
    if (ball.vertices.size() <= 1) return tree;  // nothing certifiable
    tree.cuts = cut_vertices(ball);
    LobeSet lobe_set = lobes(ball);
    tree.lobe_nodes = std::move(lobe_set.certified);
    tree.adjacency.assign(static_cast<std::size_t>(tree.node_count()), {});
    for (std::size_t j = 0; j < tree.lobe_nodes.size(); ++j) {
        int lobe_node = static_cast<int>(tree.cuts.size() + j);
        for (int v : tree.lobe_nodes[j].vertices) {
            if (auto cut_node = tree.node_of_ball_vertex(v)) {
                tree.adjacency[static_cast<std::size_t>(*cut_node)].push_back(lobe_node);
                tree.adjacency[static_cast<std::size_t>(lobe_node)].push_back(*cut_node);
            }
        }
    }
    for (auto& row : tree.adjacency) std::sort(row.begin(), row.end());
    tree.root = tree.node_of_ball_vertex(0);
    return tree;
}

TreeNode lobe_tree_node(const Ball& ball, const CertifiedLobe& lobe) {
    // Members are sorted by (depth, address); the first is the anchor and
    // every other member must be the anchor's child through one lobe choice.
    // Blocks of digraphs without the tree-lobe structure fail this check.
    if (lobe.vertices.size() < 2) throw InputError("degenerate block");
    const VertexId& anchor = ball.vertices[static_cast<std::size_t>(lobe.vertices.front())].id;
    const VertexId& child = ball.vertices[static_cast<std::size_t>(lobe.vertices[1])].id;
    if (child.is_root()) throw InputError("block is not anchored in the tree");
    int choice = child.last().lobe;
    for (std::size_t k = 1; k < lobe.vertices.size(); ++k) {
        const VertexId& member = ball.vertices[static_cast<std::size_t>(lobe.vertices[k])].id;
        if (member.is_root() || member.parent() != anchor || member.last().lobe != choice) {
            throw InputError("block is not a tree lobe");
        }
    }
    return TreeNode::lobe_node(anchor, choice);
}

const char* to_string(EndClass c) {
    switch (c) {
        case EndClass::kZero: return "zero";
        case EndClass::kOne: return "one";
        case EndClass::kTwo: return "two";
        case EndClass::kUncountable: return "uncountable";
        case EndClass::kUnresolved: return "unresolved";
    }
    return "?";
}

namespace {

struct ComponentCount {
    int certified_infinite = 0;
    // Signature of the sphere-(r+1) partition, for saturation comparisons.
    std::vector<std::vector<std::string>> classes;
};

// Components of the induced graph beyond depth r that reach depth r+1.
ComponentCount residue_components(const Ball& ball, int r) {
    auto adj = ball.undirected_adjacency();
    int n = static_cast<int>(ball.vertices.size());
    std::vector<int> parent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    };
    for (int u = 0; u < n; ++u) {
        if (ball.depth_of(u) <= r) continue;
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (ball.depth_of(v) > r) unite(u, v);
        }
    }
    std::map<int, std::vector<std::string>> classes;
    auto [lo, hi] = ball.sphere(r + 1);
    for (int i = lo; i < hi; ++i) {
        classes[find(i)].push_back(ball.vertices[static_cast<std::size_t>(i)].id.to_string());
    }
    ComponentCount result;
    result.certified_infinite = static_cast<int>(classes.size());
    for (auto& [key, members] : classes) result.classes.push_back(std::move(members));
    return result;
}

EndReport classify_from_certificate(std::vector<int> certificate, bool exhausted) {
    EndReport report;
    report.certificate = std::move(certificate);
    report.monotone = std::is_sorted(report.certificate.begin(), report.certificate.end());
    if (exhausted) {
        report.classification = EndClass::kZero;
        return report;
    }
    const auto& c = report.certificate;
    bool saw_three = std::any_of(c.begin(), c.end(), [](int x) { return x >= 3; });
    if (saw_three) {
        report.classification = EndClass::kUncountable;
        report.theorem_inference = true;
        return report;
    }
    // Stabilization needs at least two consecutive equal values.
    if (c.size() >= 2 && c[c.size() - 1] == c[c.size() - 2]) {
        if (c.back() == 1) {
            report.classification = EndClass::kOne;
        } else if (c.back() == 2) {
            report.classification = EndClass::kTwo;
        }
        return report;
    }
    report.classification = EndClass::kUnresolved;
    return report;
}

}  // namespace

EndReport classify_ends(const ValidatedAmalgam& amalgam, int max_radius, std::size_t cap) {
    if (max_radius < 0) throw InputError("radius must be non-negative");
    int diam = 0;
    for (int v = 0; v < amalgam.lobe_size(); ++v) {
        diam = std::max(diam, amalgam.lobe_digraph().eccentricity(v));
    }
    Ball ball = expand_ball(amalgam, max_radius + 1 + diam, cap);
    std::vector<int> certificate;
    for (int r = 0; r <= max_radius; ++r) {
        certificate.push_back(residue_components(ball, r).certified_infinite);
    }
    return classify_from_certificate(std::move(certificate), false);
}

EndReport classify_ends(const OrbitalHandle& handle, int max_radius, std::size_t cap) {
    if (max_radius < 0) throw InputError("radius must be non-negative");
    // A root-seeded tree-span-2 handle realizes Gamma(m, Lambda') for the arc
    // orbit of its seed; delegate to the exact lobe-window computation.
    if (handle.t_span() == 2 && handle.alpha().is_root()) {
        const ValidatedAmalgam& amalgam = handle.amalgam();
        VertexId beta = handle.beta();
        for (const Permutation& a : amalgam.vertex_group().elements()) {
            if (beta.steps().front().lobe == 0) break;
            GroupWord word;
            word.letters.push_back({Syllable::Side::kVertexGroup, a});
            VertexId image = act_on_vertex(amalgam, amalgam.form_from_word(word), handle.beta());
            if (image.steps().front().lobe == 0) beta = image;
        }
        if (beta.steps().front().lobe == 0) {
            return classify_ends(
                amalgam.with_lambda_arc({amalgam.delta(), beta.steps().front().vertex}),
                max_radius, cap);
        }
    }
    // Windowed saturation: grow the window until the sphere partitions are
    // stable across two consecutive window sizes. Components merge only
    // within the tree-span of an arc around the removed ball, so stability
    // past radius + span certifies the counts for the digraphs built here.
    int window = max_radius + handle.t_span();
    const int window_limit = window + 12;
    std::vector<std::vector<ComponentCount>> history;
    while (window <= window_limit) {
        Ball ball = orbital_ball(handle, window, cap);
        std::vector<ComponentCount> counts;
        bool exhausted = ball.sphere(window).first == ball.sphere(window).second;
        for (int r = 0; r <= max_radius; ++r) counts.push_back(residue_components(ball, r));
        if (exhausted) {
            std::vector<int> certificate;
            for (auto& c : counts) certificate.push_back(c.certified_infinite);
            return classify_from_certificate(std::move(certificate), true);
        }
        if (!history.empty()) {
            bool stable = true;
            const auto& prev = history.back();
            for (std::size_t i = 0; i < counts.size() && stable; ++i) {
                stable = prev[i].classes == counts[i].classes;
            }
            if (stable) {
                std::vector<int> certificate;
                for (auto& c : counts) certificate.push_back(c.certified_infinite);
                return classify_from_certificate(std::move(certificate), false);
            }
        }
        history.push_back(std::move(counts));
        window += 2;
    }
    throw CapacityError("end classification window did not stabilize", static_cast<std::size_t>(window));
}

EndReport classify_ends(const FiniteDigraph&) {
    EndReport report;
    report.classification = EndClass::kZero;
    report.monotone = true;
    return report;
}

std::vector<std::vector<int>> ball_distance_matrix(const Ball& ball,
                                                   const std::vector<int>& sources, Kernel kernel) {
    const bool parallel = kernel == Kernel::kParallel;
    auto adj = ball.undirected_adjacency();
    std::vector<std::vector<int>> rows(sources.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(sources.size()); ++s) {
        std::vector<int> dist(ball.vertices.size(), -1);
        std::deque<int> queue{sources[static_cast<std::size_t>(s)]};
        dist[static_cast<std::size_t>(sources[static_cast<std::size_t>(s)])] = 0;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                }
            }
        }
        rows[static_cast<std::size_t>(s)] = std::move(dist);
    }
    return rows;
}

QIReport quasi_isometry_check(const OrbitalHandle& h1, const OrbitalHandle& h2, int radius,
                              std::size_t cap, Kernel kernel) {
    if (!h1.amalgam().same_base(h2.amalgam())) {
        throw InputError("handles live over different amalgams");
    }
    int slack1 = std::max(h1.amalgam().lambda_eccentricity() + 1, h2.t_span());
    int slack2 = std::max(h2.amalgam().lambda_eccentricity() + 1, h1.t_span());
    Ball b1 = orbital_ball(h1, radius + slack1, cap, kernel);
    Ball b2 = orbital_ball(h2, radius + slack2, cap, kernel);

    auto seed_distance = [&](const Ball& ball, const VertexId& from, const VertexId& to) {
        auto i = ball.index_of(from);
        auto j = ball.index_of(to);
        if (!i || !j) {
            throw CapacityError("seed pair not mutually reachable inside the window",
                                ball.vertices.size());
        }
        int d = ball_distance_matrix(ball, {*i}, Kernel::kSerial)[0][static_cast<std::size_t>(*j)];
        if (d < 0) {
            throw CapacityError("seed pair not connected inside the window", ball.vertices.size());
        }
        return d;
    };

    QIReport report;
    report.m1 = seed_distance(b1, h2.alpha(), h2.beta());
    report.m2 = seed_distance(b2, h1.alpha(), h1.beta());
    report.a = std::max({report.m1, report.m2, 1});

    // Common vertices of the two radius-r balls.
    std::vector<std::pair<int, int>> common;  // (index in b1, index in b2)
    int hi1 = b1.sphere(radius).second;
    for (int i = 0; i < hi1; ++i) {
        auto j = b2.index_of(b1.vertices[static_cast<std::size_t>(i)].id);
        if (j && b2.depth_of(*j) <= radius) common.emplace_back(i, *j);
    }

    std::vector<int> sources1;
    std::vector<int> sources2;
    sources1.reserve(common.size());
    sources2.reserve(common.size());
    for (auto& [i, j] : common) {
        sources1.push_back(i);
        sources2.push_back(j);
    }
    auto rows1 = ball_distance_matrix(b1, sources1, kernel);
    auto rows2 = ball_distance_matrix(b2, sources2, kernel);

    for (std::size_t p = 0; p < common.size(); ++p) {
        for (std::size_t q = 0; q < common.size(); ++q) {
            if (p == q) continue;
            int d1 = rows1[p][static_cast<std::size_t>(common[q].first)];
            int d2 = rows2[p][static_cast<std::size_t>(common[q].second)];
            if (d1 < 0 || d2 < 0) {
                throw CapacityError("distance window too small for the pair set",
                                    b1.vertices.size() + b2.vertices.size());
            }
            ++report.verified_pairs;
            if (d2 > report.a * d1 || d1 > report.a * d2) {
                report.violations.push_back({b1.vertices[static_cast<std::size_t>(common[p].first)].id,
                                             b1.vertices[static_cast<std::size_t>(common[q].first)].id,
                                             d1, d2});
            }
        }
    }
    return report;
}

std::vector<TreeNode> tree_ball(const ValidatedAmalgam& amalgam, int tree_radius) {
    std::vector<TreeNode> nodes;
    std::deque<TreeNode> queue{TreeNode::omega(VertexId{})};
    nodes.push_back(queue.front());
    while (!queue.empty()) {
        TreeNode node = queue.front();
        queue.pop_front();
        if (tree_depth(node) >= tree_radius) continue;
        if (!node.is_lobe) {
            int first = node.vertex.is_root() ? 0 : 1;
            for (int l = first; l < amalgam.multiplicity(); ++l) {
                TreeNode child = TreeNode::lobe_node(node.vertex, l);
                nodes.push_back(child);
                queue.push_back(std::move(child));
            }
        } else {
            for (Point v = 0; v < amalgam.lobe_size(); ++v) {
                if (v == amalgam.delta()) continue;
                TreeNode child = TreeNode::omega(node.vertex.child(node.lobe, v));
                nodes.push_back(child);
                queue.push_back(std::move(child));
            }
        }
    }
    return nodes;
}

TreeIsometryClass classify_tree_automorphism(const ValidatedAmalgam& amalgam, const NormalForm& g,
                                             int tree_radius) {
    std::vector<TreeNode> nodes = tree_ball(amalgam, tree_radius);
    int best = -1;
    std::optional<TreeNode> witness;
    for (const TreeNode& node : nodes) {
        TreeNode image = node.is_lobe ? act_on_lobe(amalgam, g, node)
                                      : TreeNode::omega(act_on_vertex(amalgam, g, node.vertex));
        int displacement = tree_distance(node, image);
        if (best < 0 || displacement < best) {
            best = displacement;
            witness = node;
        }
        if (best == 0) break;
    }
    TreeIsometryClass result;
    if (best == 0) {
        result.kind = TreeIsometryClass::Kind::kElliptic;
        result.witness = *witness;
        result.translation_length = 0;
        return result;
    }
    if (tree_depth(*witness) >= tree_radius) {
        throw UnresolvedError("displacement minimum sits on the tree-ball boundary");
    }
    result.kind = TreeIsometryClass::Kind::kHyperbolic;
    result.witness = *witness;
    result.translation_length = best;
    return result;
}

}  // namespace oforge
