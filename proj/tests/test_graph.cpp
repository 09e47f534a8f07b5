#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <vector>

#include "doctest.h"
#include "oforge/errors.hpp"
#include "oforge/graph.hpp"
#include "oforge/verify.hpp"

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

std::size_t sphere_size(const Ball& ball, int depth) {
    auto [lo, hi] = ball.sphere(depth);
    return static_cast<std::size_t>(hi - lo);
}

}  // namespace

TEST_CASE("addresses round-trip and order canonically") {
    VertexId v = VertexId{}.child(0, 1).child(1, 2);
    CHECK(v.to_string() == "l0.v1/l1.v2");
    CHECK(VertexId::parse("l0.v1/l1.v2") == v);
    CHECK(VertexId::parse("") == VertexId{});
    CHECK(v.parent() == VertexId{}.child(0, 1));
    CHECK(VertexId{} < v);
    CHECK_THROWS_AS(VertexId::parse("x3"), InputError);
}

TEST_CASE("tree distance") {
    TreeNode root = TreeNode::omega(VertexId{});
    TreeNode lobe0 = TreeNode::lobe_node(VertexId{}, 0);
    TreeNode child = TreeNode::omega(VertexId{}.child(0, 1));
    TreeNode sibling = TreeNode::omega(VertexId{}.child(0, 2));
    TreeNode other = TreeNode::omega(VertexId{}.child(1, 1));
    CHECK(tree_distance(root, root) == 0);
    CHECK(tree_distance(root, lobe0) == 1);
    CHECK(tree_distance(root, child) == 2);
    CHECK(tree_distance(child, sibling) == 2);
    CHECK(tree_distance(child, other) == 4);
    CHECK(tree_distance(child, TreeNode::omega(VertexId{}.child(0, 1).child(1, 1))) == 2);
    CHECK(tree_depth(lobe0) == 1);
}

TEST_CASE("ball expansion on EX1") {
    ValidatedAmalgam amalgam = ex1();
    Ball b0 = expand_ball(amalgam, 0);
    CHECK(b0.vertices.size() == 1);
    CHECK(b0.arcs.empty());

    Ball b1 = expand_ball(amalgam, 1);
    CHECK(b1.vertices.size() == 5);
    CHECK(b1.arcs.size() == 12);  // two complete lobes through the root

    Ball b2 = expand_ball(amalgam, 2);
    CHECK(sphere_size(b2, 0) == 1);
    CHECK(sphere_size(b2, 1) == 4);
    CHECK(sphere_size(b2, 2) == 8);
}

TEST_CASE("sphere recurrence for EX1") {
    Ball ball = expand_ball(ex1(), 6);
    for (int r = 1; r <= 6; ++r) {
        CHECK(sphere_size(ball, r) == static_cast<std::size_t>(4) << (r - 1));
    }
}

TEST_CASE("neighbors") {
    ValidatedAmalgam amalgam = ex2();
    auto root_neighbors = neighbors(amalgam, VertexId{});
    CHECK(root_neighbors.size() == 4);  // two per lobe: labels 1 and 4
    std::set<std::string> expected{"l0.v1", "l0.v4", "l1.v1", "l1.v4"};
    std::set<std::string> got;
    for (const NeighborInfo& n : root_neighbors) {
        got.insert(n.vertex.to_string());
        CHECK(n.arc_out);
        CHECK(n.arc_in);
    }
    CHECK(got == expected);

    // Degree law: m times the in-lobe degree of delta.
    ValidatedAmalgam k3 = ex1();
    CHECK(neighbors(k3, VertexId{}.child(1, 2)).size() ==
          static_cast<std::size_t>(k3.multiplicity() * k3.degree_per_lobe()));
}

TEST_CASE("parallel expansion matches the serial reference") {
    for (const ValidatedAmalgam& amalgam : {ex1(), ex2()}) {
        Ball serial = expand_ball_serial(amalgam, 5);
        Ball parallel = expand_ball(amalgam, 5, kDefaultVertexCap, Kernel::kParallel);
        REQUIRE(serial.vertices.size() == parallel.vertices.size());
        for (std::size_t i = 0; i < serial.vertices.size(); ++i) {
            CHECK(serial.vertices[i].id == parallel.vertices[i].id);
            CHECK(serial.vertices[i].depth == parallel.vertices[i].depth);
        }
        CHECK(serial.arcs == parallel.arcs);
    }
}

TEST_CASE("orbital ball with the seed arc reproduces the direct expansion") {
    for (const ValidatedAmalgam& amalgam : {ex1(), ex2()}) {
        VertexId beta = VertexId{}.child(0, amalgam.lambda_arc().second);
        OrbitalHandle handle(amalgam, VertexId{}, beta);
        CHECK(handle.t_span() == 2);
        for (int radius = 1; radius <= 3; ++radius) {
            Ball direct = expand_ball(amalgam, radius);
            Ball orbital = orbital_ball(handle, radius);
            REQUIRE(direct.vertices.size() == orbital.vertices.size());
            for (std::size_t i = 0; i < direct.vertices.size(); ++i) {
                CHECK(direct.vertices[i].id == orbital.vertices[i].id);
            }
            CHECK(direct.arcs == orbital.arcs);
        }
    }
}

TEST_CASE("pentagram handle") {
    ValidatedAmalgam amalgam = ex2();
    OrbitalHandle handle(amalgam.with_lambda_arc({0, 2}), VertexId{}, VertexId{}.child(0, 2));
    Ball ball = orbital_ball(handle, 1);
    CHECK(ball.vertices.size() == 5);  // root plus 4 neighbors
}

TEST_CASE("diagonal handles are rejected") {
    ValidatedAmalgam amalgam = ex1();
    CHECK_THROWS_AS(OrbitalHandle(amalgam, VertexId{}, VertexId{}), InputError);
}

TEST_CASE("address words act as expected") {
    ValidatedAmalgam amalgam = ex2();
    Ball ball = expand_ball(amalgam, 3);
    for (const BallVertex& v : ball.vertices) {
        NormalForm word = word_of_vertex(amalgam, v.id);
        CHECK(act_on_vertex(amalgam, word, VertexId{}) == v.id);
        CHECK(vertex_of_form(amalgam, word) == v.id);
    }
    // No two ball vertices share an address.
    std::set<std::string> addresses;
    for (const BallVertex& v : ball.vertices) {
        CHECK(addresses.insert(v.id.to_string()).second);
    }
}

TEST_CASE("vertex transitivity witness") {
    ValidatedAmalgam amalgam = ex1();
    Ball ball = expand_ball(amalgam, 2);
    std::uint64_t state = 3;
    for (int trial = 0; trial < 4; ++trial) {
        NormalForm g = amalgam.form_from_word(random_word(amalgam, state, 3));
        // The image of every ball arc is an arc of the infinite digraph.
        for (const BallArc& arc : ball.arcs) {
            VertexId from =
                act_on_vertex(amalgam, g, ball.vertices[static_cast<std::size_t>(arc.from)].id);
            VertexId to =
                act_on_vertex(amalgam, g, ball.vertices[static_cast<std::size_t>(arc.to)].id);
            bool found = false;
            for (const NeighborInfo& n : neighbors(amalgam, from)) {
                if (n.vertex == to && n.arc_out) found = true;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("suborbits on EX1") {
    ValidatedAmalgam amalgam = ex1();
    SuborbitReport report = suborbits(amalgam, 2);
    REQUIRE(report.orbits.size() == 3);
    CHECK(report.subdegrees()[0] == std::vector<std::size_t>{1});
    CHECK(report.subdegrees()[1] == std::vector<std::size_t>{4});
    CHECK(report.subdegrees()[2] == std::vector<std::size_t>{4, 4});

    // Independent brute-force partition of the explicit ball.
    Ball ball = expand_ball(amalgam, 2);
    for (int r = 0; r <= 2; ++r) {
        auto oracle = brute_force_sphere_orbits(amalgam, ball, r);
        REQUIRE(oracle.size() == report.orbits[static_cast<std::size_t>(r)].size());
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            CHECK(oracle[i] == report.orbits[static_cast<std::size_t>(r)][i]);
        }
    }

    // Sphere sizes are recovered by the subdegrees.
    for (int r = 0; r <= 2; ++r) {
        std::size_t total = 0;
        for (std::size_t size : report.subdegrees()[static_cast<std::size_t>(r)]) total += size;
        CHECK(total == sphere_size(ball, r));
    }
}

TEST_CASE("suborbits of a handle match the amalgam") {
    ValidatedAmalgam amalgam = ex2();
    OrbitalHandle handle(amalgam, VertexId{}, VertexId{}.child(0, 1));
    SuborbitReport from_handle = suborbits(handle, 2);
    SuborbitReport from_amalgam = suborbits(amalgam, 2);
    CHECK(from_handle.flat_subdegrees() == from_amalgam.flat_subdegrees());
}

TEST_CASE("capacity cap") {
    ValidatedAmalgam amalgam = ex1();
    CHECK_THROWS_AS(expand_ball(amalgam, 4, 10), CapacityError);
    try {
        expand_ball(amalgam, 4, 10);
    } catch (const CapacityError& e) {
        CHECK(e.projected() > 10);
    }
}

TEST_CASE("lobe tags are consistent from both endpoints") {
    ValidatedAmalgam amalgam = ex2();
    Ball ball = expand_ball(amalgam, 3);
    std::map<std::pair<int, int>, std::string> seen;
    for (const BallArc& arc : ball.arcs) {
        auto key = std::make_pair(std::min(arc.from, arc.to), std::max(arc.from, arc.to));
        auto [it, inserted] = seen.emplace(key, arc.lobe);
        if (!inserted) CHECK(it->second == arc.lobe);
    }
}
