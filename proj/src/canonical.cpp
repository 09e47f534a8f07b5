#include "oforge/canonical.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "oforge/errors.hpp"
#include "oforge/parallel.hpp"

namespace oforge {

namespace {

OrbitalHandle seed_handle(const ValidatedAmalgam& amalgam) {
    VertexId beta = VertexId{}.child(0, amalgam.lambda_arc().second);
    return OrbitalHandle(amalgam, VertexId{}, beta);
}

std::vector<VertexId> root_lobe_vertices(const ValidatedAmalgam& amalgam) {
    std::vector<VertexId> members{VertexId{}};
    for (Point v = 0; v < amalgam.lobe_size(); ++v) {
        if (v != amalgam.delta()) members.push_back(VertexId{}.child(0, v));
    }
    std::sort(members.begin(), members.end());
    return members;
}

// Structural re-verification of a descriptor on a ball of the given radius.
void verify_descriptor(const CanonicalDescriptor& descriptor, int radius) {
    const ValidatedAmalgam& amalgam = descriptor.seed.amalgam();
    if (amalgam.lobe_size() < 3) {
        throw Error(ErrorFamily::kValidation, "canonical lobe has fewer than three vertices");
    }
    Ball ball = orbital_ball(descriptor.seed, radius);
    LobeSet lobe_set = lobes(ball);
    if (lobe_set.certified.empty()) {
        throw Error(ErrorFamily::kValidation, "no certified lobe inside the verification ball");
    }
    const bool parallel = lobe_set.certified.size() > 1;
    std::vector<std::string> failures(lobe_set.certified.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(lobe_set.certified.size()); ++i) {
        const CertifiedLobe& lobe = lobe_set.certified[static_cast<std::size_t>(i)];
        FiniteDigraph induced = [&] {
            std::map<int, int> local;
            for (std::size_t k = 0; k < lobe.vertices.size(); ++k) {
                local[lobe.vertices[k]] = static_cast<int>(k);
            }
            std::vector<std::pair<int, int>> arcs;
            for (const BallArc& arc : ball.arcs) {
                auto a = local.find(arc.from);
                auto b = local.find(arc.to);
                if (a != local.end() && b != local.end()) arcs.emplace_back(a->second, b->second);
            }
            return FiniteDigraph(static_cast<int>(lobe.vertices.size()), std::move(arcs));
        }();
        std::string& failure = failures[static_cast<std::size_t>(i)];
        try {
            if (!digraphs_isomorphic(induced, descriptor.lobe_digraph)) {
                failure = "certified lobe not isomorphic to the lobe digraph";
                continue;
            }
            FiniteGroup induced_group = lobe_group(amalgam, ball, lobe);
            if (!induced_group.is_primitive()) {
                failure = "induced lobe group imprimitive";
            } else if (induced_group.is_regular()) {
                failure = "induced lobe group regular";
            }
        } catch (const std::exception& e) {
            failure = e.what();
        }
    }
    for (const std::string& failure : failures) {
        if (!failure.empty()) throw Error(ErrorFamily::kValidation, failure);
    }
}

}  // namespace

CanonicalDescriptor construct_canonical(const ValidatedAmalgam& amalgam) {
    CanonicalDescriptor descriptor{amalgam.multiplicity(), amalgam.lobe_digraph(),
                                   amalgam.lobe_group(), seed_handle(amalgam),
                                   root_lobe_vertices(amalgam)};
    verify_descriptor(descriptor, 3);
    return descriptor;
}

FiniteGroup lobe_group(const ValidatedAmalgam& amalgam, const Ball& ball,
                       const CertifiedLobe& lobe) {
    if (lobe.vertices.size() < 2) throw InputError("degenerate lobe");
    TreeNode node = lobe_tree_node(ball, lobe);

    // Anchor word y with lobe = P^y; the induced action is y^-1 q y on the
    // member vertices.
    NormalForm anchor_word = word_of_vertex(amalgam, node.vertex);
    if (node.lobe != 0) {
        anchor_word = amalgam.multiply(
            amalgam.form_for_rep({Syllable::Side::kVertexGroup, node.lobe}), anchor_word);
    }
    NormalForm anchor_word_inv = amalgam.invert(anchor_word);

    std::map<std::string, int> local;
    std::vector<VertexId> members;
    for (std::size_t k = 0; k < lobe.vertices.size(); ++k) {
        const VertexId& v = ball.vertices[static_cast<std::size_t>(lobe.vertices[k])].id;
        local[v.to_string()] = static_cast<int>(k);
        members.push_back(v);
    }

    std::vector<Permutation> generators;
    for (const Permutation& q : amalgam.lobe_group().generators()) {
        GroupWord word;
        word.letters.push_back({Syllable::Side::kLobeGroup, q});
        NormalForm q_form = amalgam.form_from_word(word);
        NormalForm conj = amalgam.multiply(amalgam.multiply(anchor_word_inv, q_form), anchor_word);
        std::vector<Point> images(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
            VertexId image = act_on_vertex(amalgam, conj, members[k]);
            auto it = local.find(image.to_string());
            if (it == local.end()) {
                throw Error(ErrorFamily::kValidation, "lobe group does not preserve the lobe");
            }
            images[k] = it->second;
        }
        generators.emplace_back(std::move(images));
    }
    return FiniteGroup(static_cast<int>(members.size()), std::move(generators));
}

std::vector<CanonicalDescriptor> enumerate_canonical(const ValidatedAmalgam& amalgam) {
    std::vector<CanonicalDescriptor> result;
    for (const FiniteDigraph& orbital : amalgam.lobe_group().orbital_digraphs()) {
        Point target = -1;
        for (Point u = 0; u < amalgam.lobe_size(); ++u) {
            if (u != amalgam.delta() && orbital.has_arc(amalgam.delta(), u)) {
                target = u;
                break;
            }
        }
        if (target < 0) {
            throw Error(ErrorFamily::kValidation, "orbital digraph without an arc at delta");
        }
        ValidatedAmalgam realized = amalgam.with_lambda_arc({amalgam.delta(), target});
        CanonicalDescriptor descriptor{realized.multiplicity(), realized.lobe_digraph(),
                                       realized.lobe_group(), seed_handle(realized),
                                       root_lobe_vertices(realized)};
        if (descriptor.lobe_digraph != orbital) {
            throw Error(ErrorFamily::kValidation, "realized lobe digraph differs from the orbital");
        }
        verify_descriptor(descriptor, 2);
        result.push_back(std::move(descriptor));
    }
    return result;
}

namespace {

// Certified lobes of a ball as sorted families of address strings.
std::vector<std::vector<std::string>> certified_lobe_sets(const Ball& ball) {
    std::vector<std::vector<std::string>> sets;
    for (const CertifiedLobe& lobe : lobes(ball).certified) {
        std::vector<std::string> addresses;
        for (int v : lobe.vertices) {
            addresses.push_back(ball.vertices[static_cast<std::size_t>(v)].id.to_string());
        }
        std::sort(addresses.begin(), addresses.end());
        sets.push_back(std::move(addresses));
    }
    std::sort(sets.begin(), sets.end());
    return sets;
}

}  // namespace

bool check_equivalence(const CanonicalDescriptor& d1, const CanonicalDescriptor& d2, int radius) {
    if (!d1.seed.amalgam().same_base(d2.seed.amalgam())) {
        throw InputError("descriptors come from different amalgams");
    }
    if (d1.multiplicity != d2.multiplicity) return false;
    Ball b1 = orbital_ball(d1.seed, radius);
    Ball b2 = orbital_ball(d2.seed, radius);
    auto sets1 = certified_lobe_sets(b1);
    auto sets2 = certified_lobe_sets(b2);

    auto comparable_subset = [](const std::vector<std::vector<std::string>>& from,
                                const Ball& other_ball,
                                const std::vector<std::vector<std::string>>& other_sets,
                                std::size_t& compared) {
        for (const auto& lobe : from) {
            bool inside = true;
            for (const std::string& address : lobe) {
                if (!other_ball.contains(VertexId::parse(address))) {
                    inside = false;
                    break;
                }
            }
            if (!inside) continue;
            ++compared;
            if (!std::binary_search(other_sets.begin(), other_sets.end(), lobe)) return false;
        }
        return true;
    };

    std::size_t compared = 0;
    if (!comparable_subset(sets1, b2, sets2, compared)) return false;
    if (!comparable_subset(sets2, b1, sets1, compared)) return false;
    return compared > 0;
}

bool is_connectivity_one(const OrbitalHandle& handle, std::size_t cap) {
    EndReport report = classify_ends(handle, 0, cap);
    return !report.certificate.empty() && report.certificate[0] >= 2;
}

namespace {

// Terminal-stage extraction: the certified lobe at the root of a certified
// connectivity-one digraph, accepted only in the canonical shape (tree lobe,
// at least three vertices, primitive non-regular induced group).
struct RootLobeResult {
    bool found = false;       // a certified lobe at the root exists
    bool canonical = false;   // it satisfies the canonical-shape conditions
    int lobe_count = 0;       // certified lobes through the root
    std::vector<VertexId> members;
    FiniteDigraph digraph;
    FiniteGroup action{1, {}};
    std::string marker;
};

RootLobeResult root_lobe_of(const OrbitalHandle& handle, const RefineCaps& caps) {
    RootLobeResult result;
    for (int radius = 2; radius <= caps.lobe_radius; ++radius) {
        Ball ball = orbital_ball(handle, radius, caps.vertex_cap);
        LobeSet lobe_set = lobes(ball);
        std::vector<const CertifiedLobe*> at_root;
        for (const CertifiedLobe& lobe : lobe_set.certified) {
            if (std::binary_search(lobe.vertices.begin(), lobe.vertices.end(), 0)) {
                at_root.push_back(&lobe);
            }
        }
        if (at_root.empty()) continue;
        if (static_cast<int>(at_root.size()) < handle.amalgam().multiplicity() &&
            radius < caps.lobe_radius) {
            continue;  // not every lobe through the root is certified yet
        }
        result.found = true;
        result.lobe_count = static_cast<int>(at_root.size());
        const CertifiedLobe& lobe = *at_root.front();
        std::map<int, int> local;
        for (std::size_t k = 0; k < lobe.vertices.size(); ++k) {
            result.members.push_back(ball.vertices[static_cast<std::size_t>(lobe.vertices[k])].id);
            local[lobe.vertices[k]] = static_cast<int>(k);
        }
        if (result.members.size() < 3) {
            result.marker = "lobe below three vertices";
            return result;
        }
        std::vector<std::pair<int, int>> arcs;
        for (const BallArc& arc : ball.arcs) {
            auto a = local.find(arc.from);
            auto b = local.find(arc.to);
            if (a != local.end() && b != local.end()) arcs.emplace_back(a->second, b->second);
        }
        result.digraph = FiniteDigraph(static_cast<int>(result.members.size()), std::move(arcs));
        try {
            result.action = lobe_group(handle.amalgam(), ball, lobe);
            result.marker = "setwise stabilizer: conjugate of the lobe group by " +
                            lobe_tree_node(ball, lobe).to_string();
        } catch (const InputError& e) {
            result.marker = e.what();
            return result;
        }
        if (!result.action.is_primitive() || result.action.is_regular()) {
            result.marker = "induced lobe group not primitive non-regular";
            return result;
        }
        result.canonical = true;
        return result;
    }
    return result;
}

}  // namespace

RefineResult refine_to_canonical(const OrbitalHandle& handle, const RefineCaps& caps) {
    RefineResult result;
    EndReport source_ends = classify_ends(handle, 0, caps.vertex_cap);
    if (source_ends.classification == EndClass::kZero) {
        throw InputError("refinement requires a source with more than one end");
    }

    // Candidate seeds enumerated once: root-stabilizer orbit representatives
    // by increasing distance in the reference digraph, then least address.
    SuborbitReport candidates = suborbits(handle.amalgam(), caps.search_radius, caps.vertex_cap);

    OrbitalHandle current = handle;
    std::set<std::string> tried_seeds{current.beta().to_string()};
    for (int stage = 1; stage <= caps.max_stages; ++stage) {
        RefinementStage record;
        record.seed_alpha = current.alpha();
        record.seed_beta = current.beta();
        record.connectivity_one = is_connectivity_one(current, caps.vertex_cap);
        if (record.connectivity_one) {
            RootLobeResult lobe = root_lobe_of(current, caps);
            if (lobe.canonical) {
                record.lobe_vertices = lobe.members;
                record.group_marker = lobe.marker;
                record.lobe_end_count = 0;  // finite lobe
                result.trace.stages.push_back(record);
                result.trace.terminal_index = static_cast<int>(result.trace.stages.size());
                result.trace.resolved = true;

                CanonicalDescriptor descriptor{lobe.lobe_count, std::move(lobe.digraph),
                                               std::move(lobe.action), current,
                                               std::move(lobe.members)};
                std::vector<CanonicalDescriptor> family = enumerate_canonical(current.amalgam());
                for (std::size_t i = 0; i < family.size(); ++i) {
                    if (check_equivalence(descriptor, family[i], 3)) {
                        result.trace.matched_descriptor = static_cast<int>(i);
                        break;
                    }
                }
                if (result.trace.matched_descriptor < 0) {
                    throw UnresolvedError(
                        "refinement terminal is not equivalent to any enumerated descriptor");
                }
                result.descriptor = std::move(descriptor);
                return result;
            }
            // Connectivity one but the root lobe is outside the canonical
            // shape (bridge blocks and the like): keep searching seeds.
            record.lobe_vertices = lobe.members;
            record.group_marker = lobe.found ? lobe.marker : "no certified lobe within caps";
        } else {
            record.group_marker = "seed search";
        }
        result.trace.stages.push_back(record);

        bool reseeded = false;
        for (std::size_t r = 1; r < candidates.orbits.size() && !reseeded; ++r) {
            for (const auto& orbit : candidates.orbits[r]) {
                const VertexId& candidate = orbit.front();
                if (!tried_seeds.insert(candidate.to_string()).second) continue;
                OrbitalHandle next(current.amalgam(), current.alpha(), candidate);
                if (is_connectivity_one(next, caps.vertex_cap)) {
                    current = std::move(next);
                    reseeded = true;
                    break;
                }
            }
        }
        if (!reseeded) return result;  // unresolved: candidate list exhausted
    }
    return result;  // unresolved: stage cap reached
}

CentroidResult centroid(const std::vector<VertexId>& lobe_vertices, const BlockCutTree& t2) {
    if (lobe_vertices.empty()) throw InputError("empty lobe vertex set");
    if (t2.ball == nullptr || t2.node_count() == 0) {
        throw UnresolvedError("tree has no certified region");
    }
    std::vector<int> member_nodes;
    for (const VertexId& v : lobe_vertices) {
        auto ball_index = t2.ball->index_of(v);
        if (!ball_index) throw UnresolvedError("lobe vertex outside the tree ball");
        auto node = t2.node_of_ball_vertex(*ball_index);
        if (!node) throw UnresolvedError("lobe vertex is not a certified cut vertex of the tree");
        member_nodes.push_back(*node);
    }
    int best_node = -1;
    int best_max = -1;
    for (int node = 0; node < t2.node_count(); ++node) {
        // Candidate centroids scan the whole certified tree.
        std::vector<int> dist = t2.distances_from(node);
        int worst = 0;
        bool reachable = true;
        for (int member : member_nodes) {
            int d = dist[static_cast<std::size_t>(member)];
            if (d < 0) {
                reachable = false;
                break;
            }
            worst = std::max(worst, d);
        }
        if (!reachable) continue;
        if (best_max < 0 || worst < best_max) {
            best_max = worst;
            best_node = node;
        }
    }
    if (best_node < 0) throw UnresolvedError("no tree node reaches the whole lobe");
    std::vector<int> dist = t2.distances_from(best_node);
    for (int member : member_nodes) {
        if (dist[static_cast<std::size_t>(member)] != best_max) {
            throw Error(ErrorFamily::kValidation, "centroid is not equidistant from the lobe");
        }
    }
    CentroidResult result;
    result.distance = best_max;
    if (t2.is_lobe_node(best_node)) {
        result.node = lobe_tree_node(
            *t2.ball, t2.lobe_nodes[static_cast<std::size_t>(best_node) - t2.cuts.size()]);
    } else {
        result.node = TreeNode::omega(
            t2.ball->vertices[static_cast<std::size_t>(t2.cuts[static_cast<std::size_t>(best_node)])]
                .id);
    }
    return result;
}

FundamentalDomainReport verify_segment_fundamental_domain(const ValidatedAmalgam& amalgam,
                                                          int tree_radius) {
    if (tree_radius < 2) throw InputError("tree radius must be at least 2");
    FundamentalDomainReport report;
    report.segment = "(" + VertexId{}.to_string() + ", " +
                     TreeNode::lobe_node(VertexId{}, 0).to_string() + ")";

    std::vector<TreeNode> nodes = tree_ball(amalgam, tree_radius);
    const VertexId root;
    const TreeNode segment_lobe = TreeNode::lobe_node(VertexId{}, 0);

    std::size_t omega_covered = 0;
    std::size_t lobe_covered = 0;
    for (const TreeNode& node : nodes) {
        if (!node.is_lobe) {
            NormalForm g = word_of_vertex(amalgam, node.vertex);
            if (act_on_vertex(amalgam, g, root) != node.vertex) {
                throw UnresolvedError("orbit cover failed at " + node.to_string());
            }
            // The same element must not carry the root into the lobe part.
            TreeNode lobe_image = act_on_lobe(amalgam, g, segment_lobe);
            if (!lobe_image.is_lobe) {
                report.inversion_witnesses.push_back(node.to_string());
            }
            ++omega_covered;
        } else {
            NormalForm g = word_of_vertex(amalgam, node.vertex);
            if (node.lobe != 0) {
                g = amalgam.multiply(amalgam.form_for_rep({Syllable::Side::kVertexGroup, node.lobe}),
                                     g);
            }
            if (act_on_lobe(amalgam, g, segment_lobe) != node) {
                throw UnresolvedError("orbit cover failed at " + node.to_string());
            }
            ++lobe_covered;
        }
    }
    report.covered_nodes = omega_covered + lobe_covered;
    report.vertex_orbit_count = (omega_covered > 0 ? 1 : 0) + (lobe_covered > 0 ? 1 : 0);

    // Arc orbit: every incident (vertex, lobe) pair in the ball must be the
    // image of the segment arc under an explicitly constructed element.
    bool arc_cover_complete = true;
    for (const TreeNode& node : nodes) {
        if (!node.is_lobe) continue;
        // Arcs from each member vertex of this lobe node within the ball.
        std::vector<VertexId> members{node.vertex};
        if (2 * node.vertex.length() + 2 <= static_cast<std::size_t>(tree_radius)) {
            for (Point v = 0; v < amalgam.lobe_size(); ++v) {
                if (v != amalgam.delta()) members.push_back(node.vertex.child(node.lobe, v));
            }
        }
        for (const VertexId& member : members) {
            NormalForm g = word_of_vertex(amalgam, member);
            TreeNode expected_lobe = node;
            if (member != node.vertex) {
                // member reaches the lobe as its parent lobe (choice 0)
            } else if (node.lobe != 0) {
                g = amalgam.multiply(amalgam.form_for_rep({Syllable::Side::kVertexGroup, node.lobe}),
                                     g);
            }
            bool vertex_ok = act_on_vertex(amalgam, g, root) == member;
            bool lobe_ok = act_on_lobe(amalgam, g, segment_lobe) == expected_lobe;
            if (!vertex_ok || !lobe_ok) {
                arc_cover_complete = false;
            } else {
                ++report.covered_arcs;
            }
        }
    }
    if (!arc_cover_complete) {
        throw UnresolvedError("arc orbit cover incomplete");
    }
    report.arc_orbit_count = 1;
    return report;
}

DecompositionReport amalgam_decomposition_report(const ValidatedAmalgam& amalgam) {
    DecompositionReport report;
    const auto& edge_elems = amalgam.edge_group_elements_p();
    const auto& lobe_elems = amalgam.lobe_group().elements();
    report.edge_group_order = edge_elems.size();
    report.lobe_group_order = lobe_elems.size();
    report.vertex_group_order = amalgam.vertex_group().order();
    report.edge_group_nontrivial = edge_elems.size() >= 2;

    // Exhaustive interpolation: H is maximal iff adjoining any outside
    // element generates the whole lobe group.
    report.edge_group_maximal = true;
    for (const Permutation& g : lobe_elems) {
        if (std::binary_search(edge_elems.begin(), edge_elems.end(), g)) continue;
        std::vector<Permutation> gens = edge_elems;
        gens.push_back(g);
        if (generate_closure(amalgam.lobe_group().degree(), gens).size() != lobe_elems.size()) {
            report.edge_group_maximal = false;
            break;
        }
    }

    report.fixes_no_other_point = true;
    for (Point v = 0; v < amalgam.lobe_size(); ++v) {
        if (v == amalgam.delta()) continue;
        bool moved = false;
        for (const Permutation& h : edge_elems) {
            if (h.apply(v) != v) {
                moved = true;
                break;
            }
        }
        if (!moved) {
            report.fixes_no_other_point = false;
            break;
        }
    }
    return report;
}

BlockSearchReport block_search(const ValidatedAmalgam& amalgam, int radius, std::size_t cap) {
    Ball ball = expand_ball(amalgam, radius, cap);
    int n = static_cast<int>(ball.vertices.size());
    int interior_end = ball.sphere(radius - 1).second;  // depth <= radius-1

    // Generator action tables over the interior.
    std::vector<NormalForm> generators;
    for (const Permutation& a : amalgam.vertex_group().generators()) {
        GroupWord word;
        word.letters.push_back({Syllable::Side::kVertexGroup, a});
        generators.push_back(amalgam.form_from_word(word));
    }
    for (const Permutation& p : amalgam.lobe_group().generators()) {
        GroupWord word;
        word.letters.push_back({Syllable::Side::kLobeGroup, p});
        generators.push_back(amalgam.form_from_word(word));
    }
    std::vector<std::vector<int>> action(generators.size(),
                                         std::vector<int>(static_cast<std::size_t>(n), -1));
    for (std::size_t g = 0; g < generators.size(); ++g) {
        for (int i = 0; i < interior_end; ++i) {
            VertexId image =
                act_on_vertex(amalgam, generators[g], ball.vertices[static_cast<std::size_t>(i)].id);
            if (auto idx = ball.index_of(image)) action[g][static_cast<std::size_t>(i)] = *idx;
        }
    }

    BlockSearchReport report;
    report.radius = radius;
    for (int seed = 1; seed < n; ++seed) {
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
        std::deque<std::pair<int, int>> queue{{0, seed}};
        parent[static_cast<std::size_t>(std::max(0, seed))] = std::min(0, seed);
        while (!queue.empty()) {
            auto [x, y] = queue.front();
            queue.pop_front();
            if (x >= interior_end || y >= interior_end) continue;
            for (std::size_t g = 0; g < generators.size(); ++g) {
                int xi = action[g][static_cast<std::size_t>(x)];
                int yi = action[g][static_cast<std::size_t>(y)];
                if (xi < 0 || yi < 0) continue;
                int rx = find(xi);
                int ry = find(yi);
                if (rx != ry) {
                    parent[static_cast<std::size_t>(std::max(rx, ry))] = std::min(rx, ry);
                    queue.emplace_back(rx, ry);
                }
            }
        }
        // Witness iff the root class is a proper nonempty subset of the
        // interior.
        int root_class = find(0);
        std::size_t in_class = 0;
        for (int i = 0; i < interior_end; ++i) {
            if (find(i) == root_class) ++in_class;
        }
        if (in_class < static_cast<std::size_t>(interior_end)) {
            report.witness_found = true;
            std::map<int, std::vector<VertexId>> classes;
            for (int i = 0; i < interior_end; ++i) {
                classes[find(i)].push_back(ball.vertices[static_cast<std::size_t>(i)].id);
            }
            for (auto& [key, members] : classes) {
                report.witness_partition.push_back(std::move(members));
            }
            return report;
        }
    }
    return report;
}

}  // namespace oforge
