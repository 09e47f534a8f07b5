#include "oforge/verify.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "oforge/canonical.hpp"
#include "oforge/decompose.hpp"
#include "oforge/errors.hpp"

namespace oforge {

namespace {

// splitmix64; cheap, reproducible across platforms.
std::uint64_t next_random(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
    std::ostringstream out;
    for (std::size_t i = 0; i < sizes.size(); ++i) out << (i ? "," : "") << sizes[i];
    return out.str();
}

}  // namespace

GroupWord random_word(const ValidatedAmalgam& amalgam, std::uint64_t& state, int max_letters) {
    GroupWord word;
    int count = 1 + static_cast<int>(next_random(state) % static_cast<std::uint64_t>(max_letters));
    for (int i = 0; i < count; ++i) {
        if (next_random(state) % 2 == 0) {
            const auto& elems = amalgam.vertex_group().elements();
            word.letters.push_back({Syllable::Side::kVertexGroup,
                                    elems[next_random(state) % elems.size()]});
        } else {
            const auto& elems = amalgam.lobe_group().elements();
            word.letters.push_back({Syllable::Side::kLobeGroup,
                                    elems[next_random(state) % elems.size()]});
        }
    }
    return word;
}

VertexId act_letters(const ValidatedAmalgam& amalgam, const GroupWord& word, const VertexId& v) {
    VertexId current = v;
    for (const auto& letter : word.letters) {
        GroupWord single;
        single.letters.push_back(letter);
        current = act_on_vertex(amalgam, amalgam.form_from_word(single), current);
    }
    return current;
}

std::vector<std::vector<VertexId>> brute_force_sphere_orbits(const ValidatedAmalgam& amalgam,
                                                             const Ball& ball, int radius) {
    auto [lo, hi] = ball.sphere(radius);
    std::set<std::string> unseen;
    std::map<std::string, VertexId> by_key;
    for (int i = lo; i < hi; ++i) {
        const VertexId& v = ball.vertices[static_cast<std::size_t>(i)].id;
        unseen.insert(v.to_string());
        by_key.emplace(v.to_string(), v);
    }
    std::vector<std::vector<VertexId>> orbits;
    while (!unseen.empty()) {
        VertexId seed = by_key.at(*unseen.begin());
        std::set<std::string> orbit;
        std::vector<VertexId> frontier{seed};
        orbit.insert(seed.to_string());
        while (!frontier.empty()) {
            VertexId v = frontier.back();
            frontier.pop_back();
            for (const Permutation& a : amalgam.vertex_group().elements()) {
                GroupWord word;
                word.letters.push_back({Syllable::Side::kVertexGroup, a});
                VertexId image = act_letters(amalgam, word, v);
                if (orbit.insert(image.to_string()).second) frontier.push_back(image);
            }
        }
        std::vector<VertexId> members;
        for (const std::string& key : orbit) {
            members.push_back(by_key.at(key));
            unseen.erase(key);
        }
        std::sort(members.begin(), members.end());
        orbits.push_back(std::move(members));
    }
    std::sort(orbits.begin(), orbits.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return orbits;
}

namespace {

CheckResult check_ends_trichotomy(const ValidatedAmalgam& amalgam,
                                  const std::vector<CanonicalDescriptor>& family) {
    CheckResult result{"ends_trichotomy", true, ""};
    EndReport report = classify_ends(amalgam, 3);
    std::ostringstream detail;
    detail << "certificate";
    for (int c : report.certificate) detail << ' ' << c;
    if (report.classification != EndClass::kUncountable) {
        result.pass = false;
        detail << "; expected uncountable, got " << to_string(report.classification);
    }
    for (std::size_t i = 1; i < report.certificate.size(); ++i) {
        if (report.certificate[i] <= report.certificate[i - 1]) {
            result.pass = false;
            detail << "; certificate not strictly growing";
            break;
        }
    }
    for (const CanonicalDescriptor& d : family) {
        EndReport r = classify_ends(d.seed, 2);
        if (r.classification == EndClass::kTwo) {
            result.pass = false;
            detail << "; descriptor produced the excluded two-ended classification";
        }
    }
    result.detail = detail.str();
    return result;
}

CheckResult check_canonical_structure(const ValidatedAmalgam& amalgam,
                                      const std::vector<CanonicalDescriptor>& family) {
    CheckResult result{"canonical_structure", true, ""};
    std::ostringstream detail;
    for (std::size_t d = 0; d < family.size(); ++d) {
        const CanonicalDescriptor& descriptor = family[d];
        if (descriptor.lobe_digraph.vertex_count < 3) {
            result.pass = false;
            detail << "descriptor " << d << ": lobe below three vertices; ";
            continue;
        }
        Ball ball = orbital_ball(descriptor.seed, 3);
        LobeSet lobe_set = lobes(ball);
        if (lobe_set.certified.empty()) {
            result.pass = false;
            detail << "descriptor " << d << ": no certified lobes; ";
            continue;
        }
        for (const CertifiedLobe& lobe : lobe_set.certified) {
            std::map<int, int> local;
            for (std::size_t k = 0; k < lobe.vertices.size(); ++k) local[lobe.vertices[k]] = static_cast<int>(k);
            std::vector<std::pair<int, int>> arcs;
            for (const BallArc& arc : ball.arcs) {
                auto a = local.find(arc.from);
                auto b = local.find(arc.to);
                if (a != local.end() && b != local.end()) arcs.emplace_back(a->second, b->second);
            }
            FiniteDigraph induced(static_cast<int>(lobe.vertices.size()), std::move(arcs));
            if (!digraphs_isomorphic(induced, descriptor.lobe_digraph)) {
                result.pass = false;
                detail << "descriptor " << d << ": lobe not isomorphic; ";
                break;
            }
            FiniteGroup group = lobe_group(amalgam, ball, lobe);
            if (!group.is_primitive() || group.is_regular()) {
                result.pass = false;
                detail << "descriptor " << d << ": lobe group not primitive non-regular; ";
                break;
            }
        }
        detail << "descriptor " << d << ": " << lobe_set.certified.size() << " certified lobes; ";
    }
    result.detail = detail.str();
    return result;
}

CheckResult check_uniqueness(const std::vector<CanonicalDescriptor>& family) {
    CheckResult result{"uniqueness_equivalence", true, ""};
    std::ostringstream detail;
    detail << family.size() << " descriptors";
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i; j < family.size(); ++j) {
            if (!check_equivalence(family[i], family[j], 3)) {
                result.pass = false;
                detail << "; pair (" << i << "," << j << ") not equivalent";
            }
        }
    }
    // Certified cut vertices agree wherever both balls certify.
    for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        Ball b1 = orbital_ball(family[i].seed, 3);
        Ball b2 = orbital_ball(family[i + 1].seed, 3);
        auto cut_set = [](const Ball& ball) {
            std::set<std::string> cuts;
            for (int v : cut_vertices(ball)) {
                cuts.insert(ball.vertices[static_cast<std::size_t>(v)].id.to_string());
            }
            return cuts;
        };
        auto zone = [](const Ball& ball) {
            std::set<std::string> addresses;
            int hi = ball.sphere(ball.radius - 1).second;
            for (int v = 0; v < hi; ++v) {
                addresses.insert(ball.vertices[static_cast<std::size_t>(v)].id.to_string());
            }
            return addresses;
        };
        std::set<std::string> c1 = cut_set(b1);
        std::set<std::string> c2 = cut_set(b2);
        std::set<std::string> z1 = zone(b1);
        std::set<std::string> z2 = zone(b2);
        std::set<std::string> c1_in_z2;
        std::set<std::string> c2_in_z1;
        for (const auto& v : c1) {
            if (z2.count(v)) c1_in_z2.insert(v);
        }
        for (const auto& v : c2) {
            if (z1.count(v)) c2_in_z1.insert(v);
        }
        if (c1_in_z2 != c2_in_z1) {
            result.pass = false;
            detail << "; cut-vertex sets disagree on the common certified zone";
        }
    }
    result.detail = detail.str();
    return result;
}

CheckResult check_refinement(const ValidatedAmalgam& amalgam,
                             const std::vector<CanonicalDescriptor>& family) {
    CheckResult result{"enumeration_refinement", true, ""};
    std::ostringstream detail;
    // Seeds across the root cut vertex: distance-2 pairs through two lobes.
    std::vector<VertexId> seeds;
    for (const auto& [u, out, in] : amalgam.delta_adjacency()) {
        for (const auto& [w, out2, in2] : amalgam.delta_adjacency()) {
            if (seeds.size() >= 3 || amalgam.multiplicity() < 2) break;
            seeds.push_back(VertexId{}.child(0, u).child(1, w));
        }
    }
    int refined = 0;
    for (const VertexId& beta : seeds) {
        OrbitalHandle handle(amalgam, VertexId{}, beta);
        RefineResult refine = refine_to_canonical(handle);
        if (!refine.trace.resolved || refine.trace.matched_descriptor < 0 ||
            refine.trace.matched_descriptor >= static_cast<int>(family.size())) {
            result.pass = false;
            detail << "seed " << beta.to_string() << " unresolved; ";
            continue;
        }
        if (refine.trace.terminal_index > 3) {
            result.pass = false;
            detail << "seed " << beta.to_string() << " needed too many stages; ";
        }
        ++refined;
        detail << "seed " << beta.to_string() << " -> descriptor "
               << refine.trace.matched_descriptor << " (n=" << refine.trace.terminal_index
               << "); ";
    }
    if (refined < static_cast<int>(seeds.size())) result.pass = false;
    result.detail = detail.str();
    return result;
}

CheckResult check_quasi_isometry(const std::vector<CanonicalDescriptor>& family) {
    CheckResult result{"quasi_isometry", true, ""};
    std::ostringstream detail;
    const OrbitalHandle& h1 = family.front().seed;
    const OrbitalHandle& h2 = family.size() > 1 ? family[1].seed : family.front().seed;
    QIReport report = quasi_isometry_check(h1, h2, 4);
    detail << "m1=" << report.m1 << " m2=" << report.m2 << " a=" << report.a << " pairs="
           << report.verified_pairs << " violations=" << report.violations.size();
    if (!report.valid()) result.pass = false;
    if (family.size() == 1 && report.a != 1) result.pass = false;
    result.detail = detail.str();
    return result;
}

CheckResult check_decomposition(const ValidatedAmalgam& amalgam) {
    CheckResult result{"amalgam_decomposition", true, ""};
    DecompositionReport report = amalgam_decomposition_report(amalgam);
    std::ostringstream detail;
    if (!report.edge_group_nontrivial) {
        result.pass = false;
        detail << "nontriviality failed; ";
    }
    if (!report.edge_group_maximal) {
        result.pass = false;
        detail << "maximality failed; ";
    }
    if (!report.fixes_no_other_point) {
        result.pass = false;
        detail << "fixed-point freeness failed; ";
    }
    detail << "|A|=" << report.vertex_group_order << " |H|=" << report.edge_group_order
           << " |P|=" << report.lobe_group_order;
    result.detail = detail.str();
    return result;
}

CheckResult check_fundamental_domain(const ValidatedAmalgam& amalgam) {
    CheckResult result{"fundamental_domain", true, ""};
    FundamentalDomainReport report = verify_segment_fundamental_domain(amalgam, 3);
    std::ostringstream detail;
    detail << report.vertex_orbit_count << " vertex orbits, " << report.arc_orbit_count
           << " arc orbit, " << report.inversion_witnesses.size() << " inversions over "
           << report.covered_nodes << " nodes";
    result.pass = report.valid();
    result.detail = detail.str();
    return result;
}

CheckResult check_word_problem(const ValidatedAmalgam& amalgam, std::uint64_t seed) {
    CheckResult result{"word_problem", true, ""};
    std::ostringstream detail;
    Ball ball = expand_ball(amalgam, 6);

    const int kTrials = 1000;
    std::vector<std::uint8_t> disagreement(kTrials, 0);
    std::vector<std::uint8_t> was_equal(kTrials, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (int trial = 0; trial < kTrials; ++trial) {
        // Per-trial stream keeps the draw deterministic under any schedule.
        std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(trial + 1);
        GroupWord wx = random_word(amalgam, state, 5);
        GroupWord wy;
        if (trial % 5 == 0) {
            // An engineered equal pair: pad with h (via A) and h^-1 (via P),
            // which cancels only through the amalgamation.
            wy = wx;
            const auto& h_elems = amalgam.edge_group_elements_p();
            const Permutation& h = h_elems[next_random(state) % h_elems.size()];
            wy.letters.push_back({Syllable::Side::kVertexGroup, amalgam.embed_to_a(h)});
            wy.letters.push_back({Syllable::Side::kLobeGroup, h.inverse()});
        } else {
            wy = random_word(amalgam, state, 5);
        }
        bool nf_equal = amalgam.equal(amalgam.form_from_word(wx), amalgam.form_from_word(wy));
        was_equal[static_cast<std::size_t>(trial)] = nf_equal;
        bool images_equal = true;
        for (const BallVertex& v : ball.vertices) {
            if (act_letters(amalgam, wx, v.id) != act_letters(amalgam, wy, v.id)) {
                images_equal = false;
                break;
            }
        }
        disagreement[static_cast<std::size_t>(trial)] = nf_equal != images_equal;
    }
    int disagreements = 0;
    int equal_pairs = 0;
    for (int trial = 0; trial < kTrials; ++trial) {
        disagreements += disagreement[static_cast<std::size_t>(trial)];
        equal_pairs += was_equal[static_cast<std::size_t>(trial)];
    }
    if (disagreements > 0) result.pass = false;
    detail << kTrials << " pairs, " << equal_pairs << " equal, " << disagreements
           << " disagreements";

    // Group axioms.
    std::uint64_t state = seed ^ 0xa5a5a5a5a5a5a5a5ULL;
    for (int trial = 0; trial < 100; ++trial) {
        NormalForm x = amalgam.form_from_word(random_word(amalgam, state, 4));
        NormalForm y = amalgam.form_from_word(random_word(amalgam, state, 4));
        NormalForm z = amalgam.form_from_word(random_word(amalgam, state, 4));
        if (!(amalgam.multiply(amalgam.multiply(x, y), z) ==
              amalgam.multiply(x, amalgam.multiply(y, z)))) {
            result.pass = false;
            detail << "; associativity failed";
            break;
        }
        if (!amalgam.multiply(x, amalgam.invert(x)).is_identity() ||
            !amalgam.multiply(amalgam.invert(x), x).is_identity()) {
            result.pass = false;
            detail << "; inverse law failed";
            break;
        }
    }
    result.detail = detail.str();
    return result;
}

CheckResult check_subdegrees(const ValidatedAmalgam& amalgam) {
    CheckResult result{"subdegrees", true, ""};
    SuborbitReport report = suborbits(amalgam, 3);
    Ball ball = expand_ball(amalgam, 3);
    std::ostringstream detail;
    for (int r = 0; r <= 3; ++r) {
        auto oracle = brute_force_sphere_orbits(amalgam, ball, r);
        const auto& got = report.orbits[static_cast<std::size_t>(r)];
        bool match = oracle.size() == got.size();
        for (std::size_t i = 0; match && i < oracle.size(); ++i) {
            match = oracle[i] == got[i];
        }
        if (!match) {
            result.pass = false;
            detail << "radius " << r << " partition mismatch; ";
        }
    }
    detail << "subdegrees " << join_sizes(report.flat_subdegrees());
    result.detail = detail.str();
    return result;
}

CheckResult check_tits(const ValidatedAmalgam& amalgam) {
    CheckResult result{"tits_classification", true, ""};
    std::ostringstream detail;

    // Brute-force displacement minimum over the explicit tree ball.
    auto oracle_min = [&](const NormalForm& g) {
        int best = -1;
        for (const TreeNode& node : tree_ball(amalgam, 4)) {
            TreeNode image = node.is_lobe ? act_on_lobe(amalgam, g, node)
                                          : TreeNode::omega(act_on_vertex(amalgam, g, node.vertex));
            int d = tree_distance(node, image);
            if (best < 0 || d < best) best = d;
        }
        return best;
    };

    NormalForm identity = amalgam.identity_form();
    TreeIsometryClass id_class = classify_tree_automorphism(amalgam, identity, 4);
    if (id_class.kind != TreeIsometryClass::Kind::kElliptic) {
        result.pass = false;
        detail << "identity not elliptic; ";
    }
    for (const Permutation& a : amalgam.vertex_group().elements()) {
        GroupWord word;
        word.letters.push_back({Syllable::Side::kVertexGroup, a});
        TreeIsometryClass cls = classify_tree_automorphism(amalgam, amalgam.form_from_word(word), 4);
        if (cls.kind != TreeIsometryClass::Kind::kElliptic) {
            result.pass = false;
            detail << "vertex-group element not elliptic; ";
            break;
        }
    }

    // a * p with a outside H and p moving delta: hyperbolic of length 2.
    Permutation a_out = Permutation::identity(amalgam.vertex_group().degree());
    for (const Permutation& a : amalgam.vertex_group().elements()) {
        if (!amalgam.in_edge_group_a(a)) {
            a_out = a;
            break;
        }
    }
    Permutation p_out = Permutation::identity(amalgam.lobe_size());
    for (const Permutation& p : amalgam.lobe_group().elements()) {
        if (!amalgam.in_edge_group_p(p)) {
            p_out = p;
            break;
        }
    }
    GroupWord word;
    word.letters.push_back({Syllable::Side::kVertexGroup, a_out});
    word.letters.push_back({Syllable::Side::kLobeGroup, p_out});
    NormalForm g = amalgam.form_from_word(word);
    TreeIsometryClass cls = classify_tree_automorphism(amalgam, g, 4);
    int oracle = oracle_min(g);
    detail << "a*p displacement " << cls.translation_length << " (oracle " << oracle << ")";
    if (cls.kind != TreeIsometryClass::Kind::kHyperbolic || cls.translation_length != 2 ||
        oracle != 2) {
        result.pass = false;
    }
    result.detail = detail.str();
    return result;
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const ValidatedAmalgam& amalgam,
                                                std::uint64_t seed) {
    std::vector<CheckResult> results;
    auto guarded = [&results](const std::string& name, auto&& check) {
        try {
            results.push_back(check());
        } catch (const std::exception& e) {
            results.push_back({name, false, e.what()});
        }
    };

    std::vector<CanonicalDescriptor> family;
    bool enumerated = false;
    guarded("canonical_enumeration", [&] {
        family = enumerate_canonical(amalgam);
        enumerated = true;
        return CheckResult{"canonical_enumeration", true,
                           std::to_string(family.size()) + " descriptors"};
    });
    if (enumerated) {
        guarded("ends_trichotomy", [&] { return check_ends_trichotomy(amalgam, family); });
        guarded("canonical_structure", [&] { return check_canonical_structure(amalgam, family); });
        guarded("uniqueness_equivalence", [&] { return check_uniqueness(family); });
        guarded("enumeration_refinement", [&] { return check_refinement(amalgam, family); });
        guarded("quasi_isometry", [&] { return check_quasi_isometry(family); });
    } else {
        results.push_back({"ends_trichotomy", false, "skipped: enumeration failed"});
        results.push_back({"canonical_structure", false, "skipped: enumeration failed"});
        results.push_back({"uniqueness_equivalence", false, "skipped: enumeration failed"});
        results.push_back({"enumeration_refinement", false, "skipped: enumeration failed"});
        results.push_back({"quasi_isometry", false, "skipped: enumeration failed"});
    }
    guarded("amalgam_decomposition", [&] { return check_decomposition(amalgam); });
    guarded("fundamental_domain", [&] { return check_fundamental_domain(amalgam); });
    guarded("word_problem", [&] { return check_word_problem(amalgam, seed); });
    guarded("subdegrees", [&] { return check_subdegrees(amalgam); });
    guarded("tits_classification", [&] { return check_tits(amalgam); });
    return results;
}

}  // namespace oforge
