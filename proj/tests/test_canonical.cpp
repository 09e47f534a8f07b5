#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "oforge/canonical.hpp"
#include "oforge/errors.hpp"

using namespace oforge;

namespace {

ValidatedAmalgam ex1() {
    FiniteGroup p(3, {Permutation({1, 2, 0}), Permutation({0, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    return ValidatedAmalgam::validate(AmalgamSpec{
        p, 0, {Permutation({0, 2, 1})}, a,
        {{Permutation({0, 2, 1}), Permutation({1, 0, 2, 3})}}, {0, 1}});
}

ValidatedAmalgam ex2() {
    FiniteGroup p(5, {Permutation({1, 2, 3, 4, 0}), Permutation({0, 4, 3, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    return ValidatedAmalgam::validate(AmalgamSpec{
        p, 0, {Permutation({0, 4, 3, 2, 1})}, a,
        {{Permutation({0, 4, 3, 2, 1}), Permutation({1, 0, 2, 3})}}, {0, 1}});
}

// The C4 toy slips past validation only through the test bypass; it powers
// the falsification fixtures below.
ValidatedAmalgam c4_toy() {
    FiniteGroup p(4, {Permutation({1, 2, 3, 0})});
    FiniteGroup a(2, {Permutation({1, 0})});
    return ValidatedAmalgam::validate_unchecked(AmalgamSpec{p, 0, {}, a, {}, {0, 1}});
}

}  // namespace

TEST_CASE("construct_canonical") {
    CanonicalDescriptor ex1_descriptor = construct_canonical(ex1());
    CHECK(ex1_descriptor.multiplicity == 2);
    CHECK(ex1_descriptor.lobe_digraph.vertex_count == 3);
    CHECK(ex1_descriptor.lobe_digraph.arcs.size() == 6);
    CHECK(ex1_descriptor.root_lobe.size() == 3);

    CanonicalDescriptor ex2_descriptor = construct_canonical(ex2());
    CHECK(ex2_descriptor.multiplicity == 2);
    CHECK(ex2_descriptor.lobe_digraph.arcs.size() == 10);
    CHECK(ex2_descriptor.lobe_digraph.has_arc(0, 1));

    CanonicalDescriptor gram = construct_canonical(ex2().with_lambda_arc({0, 2}));
    CHECK(gram.lobe_digraph.has_arc(0, 2));
    CHECK_FALSE(gram.lobe_digraph.has_arc(0, 1));
}

TEST_CASE("lobe groups are conjugates of the lobe group") {
    ValidatedAmalgam amalgam = ex1();
    Ball ball = expand_ball(amalgam, 3);
    LobeSet lobe_set = lobes(ball);
    REQUIRE_FALSE(lobe_set.certified.empty());
    for (const CertifiedLobe& lobe : lobe_set.certified) {
        FiniteGroup group = lobe_group(amalgam, ball, lobe);
        CHECK(group.order() == 6);
        CHECK(group.is_primitive());
        CHECK_FALSE(group.is_regular());
    }

    ValidatedAmalgam pentagon = ex2();
    Ball pentagon_ball = expand_ball(pentagon, 3);
    for (const CertifiedLobe& lobe : lobes(pentagon_ball).certified) {
        FiniteGroup group = lobe_group(pentagon, pentagon_ball, lobe);
        CHECK(group.order() == 10);
        CHECK(group.is_primitive());
        CHECK_FALSE(group.is_regular());
    }
}

TEST_CASE("enumerate_canonical") {
    std::vector<CanonicalDescriptor> ex1_family = enumerate_canonical(ex1());
    CHECK(ex1_family.size() == 1);  // Sym(3) is 2-transitive

    std::vector<CanonicalDescriptor> ex2_family = enumerate_canonical(ex2());
    REQUIRE(ex2_family.size() == 2);  // pentagon and pentagram
    CHECK(ex2_family[0].lobe_digraph.has_arc(0, 1));
    CHECK(ex2_family[1].lobe_digraph.has_arc(0, 2));
    CHECK(digraphs_isomorphic(ex2_family[0].lobe_digraph, ex2_family[1].lobe_digraph));

    // Count equals the number of non-diagonal arc orbits of the lobe group.
    CHECK(ex2_family.size() == ex2().lobe_group().orbital_digraphs().size());
}

TEST_CASE("equivalence of canonical digraphs") {
    std::vector<CanonicalDescriptor> family = enumerate_canonical(ex2());
    REQUIRE(family.size() == 2);
    CHECK(check_equivalence(family[0], family[1], 3));
    CHECK(check_equivalence(family[0], family[0], 3));
    CHECK(check_equivalence(family[1], family[1], 3));

    std::vector<CanonicalDescriptor> other = enumerate_canonical(ex1());
    CHECK_THROWS_AS(check_equivalence(family[0], other[0], 3), InputError);
}

TEST_CASE("refinement from the seed arc terminates immediately") {
    ValidatedAmalgam amalgam = ex1();
    OrbitalHandle handle(amalgam, VertexId{}, VertexId{}.child(0, 1));
    RefineResult result = refine_to_canonical(handle);
    REQUIRE(result.trace.resolved);
    CHECK(result.trace.terminal_index == 1);
    CHECK(result.trace.matched_descriptor == 0);
    CHECK(result.descriptor->multiplicity == 2);
}

TEST_CASE("refinement across the root cut vertex") {
    ValidatedAmalgam amalgam = ex1();
    OrbitalHandle handle(amalgam, VertexId{}, VertexId{}.child(0, 1).child(1, 1));
    RefineResult result = refine_to_canonical(handle);
    REQUIRE(result.trace.resolved);
    CHECK(result.trace.terminal_index <= 2);
    CHECK(result.trace.matched_descriptor == 0);
    // The first stage saw connectivity one with degenerate bridge lobes.
    CHECK(result.trace.stages.size() >= 2);

    std::vector<CanonicalDescriptor> family = enumerate_canonical(amalgam);
    CHECK(check_equivalence(*result.descriptor, family[0], 3));
}

TEST_CASE("refinement of the pentagram seed") {
    ValidatedAmalgam amalgam = ex2();
    OrbitalHandle handle(amalgam.with_lambda_arc({0, 2}), VertexId{}, VertexId{}.child(0, 2));
    RefineResult result = refine_to_canonical(handle);
    REQUIRE(result.trace.resolved);
    CHECK(result.trace.terminal_index == 1);
    CHECK(result.trace.matched_descriptor >= 0);
}

TEST_CASE("refinement terminal is equivalent to exactly one enumerated descriptor") {
    ValidatedAmalgam amalgam = ex2();
    std::vector<CanonicalDescriptor> family = enumerate_canonical(amalgam);
    OrbitalHandle handle(amalgam, VertexId{}, VertexId{}.child(0, 1).child(1, 4));
    RefineResult result = refine_to_canonical(handle);
    REQUIRE(result.trace.resolved);
    int matches = 0;
    for (const CanonicalDescriptor& d : family) {
        if (check_equivalence(*result.descriptor, d, 3)) ++matches;
    }
    // Both enumerated descriptors are equivalent, so the terminal matches
    // every member of the family.
    CHECK(matches == static_cast<int>(family.size()));
    CHECK(result.trace.matched_descriptor >= 0);
}

TEST_CASE("centroid of a lobe in the other tree") {
    ValidatedAmalgam pentagon = ex2();
    ValidatedAmalgam pentagram = pentagon.with_lambda_arc({0, 2});

    CanonicalDescriptor pentagon_descriptor = construct_canonical(pentagon);
    Ball gram_ball = expand_ball(pentagram, 3);
    BlockCutTree t2 = block_cut_tree(gram_ball);

    CentroidResult result = centroid(pentagon_descriptor.root_lobe, t2);
    CHECK(result.distance == 1);
    CHECK(result.node.is_lobe);

    // Singleton sets are accepted and give distance zero.
    CentroidResult single = centroid({VertexId{}}, t2);
    CHECK(single.distance == 0);
    CHECK(single.node == TreeNode::omega(VertexId{}));

    // Self case: the lobe against its own tree.
    Ball ex1_ball = expand_ball(ex1(), 3);
    BlockCutTree t1 = block_cut_tree(ex1_ball);
    CentroidResult self = centroid(construct_canonical(ex1()).root_lobe, t1);
    CHECK(self.distance == 1);
    CHECK(self.node.is_lobe);

    // A lobe leaving the certified region is unresolved.
    CHECK_THROWS_AS(centroid({VertexId{}.child(0, 1).child(1, 1).child(1, 1)}, t1),
                    UnresolvedError);
}

TEST_CASE("segment fundamental domain") {
    for (const ValidatedAmalgam& amalgam : {ex1(), ex2()}) {
        FundamentalDomainReport report = verify_segment_fundamental_domain(amalgam, 3);
        CHECK(report.vertex_orbit_count == 2);
        CHECK(report.arc_orbit_count == 1);
        CHECK(report.inversion_witnesses.empty());
        CHECK(report.valid());
        CHECK(report.covered_nodes > 0);
        CHECK(report.covered_arcs > 0);
    }
    CHECK_THROWS_AS(verify_segment_fundamental_domain(ex1(), 0), InputError);
}

TEST_CASE("amalgam decomposition report") {
    DecompositionReport ex1_report = amalgam_decomposition_report(ex1());
    CHECK(ex1_report.valid());
    CHECK(ex1_report.vertex_group_order == 4);
    CHECK(ex1_report.edge_group_order == 2);
    CHECK(ex1_report.lobe_group_order == 6);

    DecompositionReport ex2_report = amalgam_decomposition_report(ex2());
    CHECK(ex2_report.valid());
    CHECK(ex2_report.lobe_group_order == 10);

    // The bypassed C4 toy fails: H is trivial, hence neither nontrivial nor
    // maximal (1 < C2 < C4).
    DecompositionReport toy_report = amalgam_decomposition_report(c4_toy());
    CHECK_FALSE(toy_report.edge_group_nontrivial);
    CHECK_FALSE(toy_report.edge_group_maximal);
    CHECK_FALSE(toy_report.valid());
}

TEST_CASE("block search") {
    BlockSearchReport ex1_r2 = block_search(ex1(), 2);
    CHECK_FALSE(ex1_r2.witness_found);
    BlockSearchReport ex1_r3 = block_search(ex1(), 3);
    CHECK_FALSE(ex1_r3.witness_found);
    BlockSearchReport ex2_r2 = block_search(ex2(), 2);
    CHECK_FALSE(ex2_r2.witness_found);

    // The imprimitive toy yields a witness partition.
    BlockSearchReport toy = block_search(c4_toy(), 3);
    CHECK(toy.witness_found);
    CHECK_FALSE(toy.witness_partition.empty());
}

TEST_CASE("certified cut vertices agree across the canonical family") {
    std::vector<CanonicalDescriptor> family = enumerate_canonical(ex2());
    REQUIRE(family.size() == 2);
    Ball b1 = orbital_ball(family[0].seed, 3);
    Ball b2 = orbital_ball(family[1].seed, 3);
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
    std::set<std::string> restricted1;
    std::set<std::string> restricted2;
    for (const auto& v : c1) {
        if (zone(b2).count(v)) restricted1.insert(v);
    }
    for (const auto& v : c2) {
        if (zone(b1).count(v)) restricted2.insert(v);
    }
    CHECK(restricted1 == restricted2);
    CHECK_FALSE(restricted1.empty());
}
