#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <vector>

#include "doctest.h"
#include "oforge/amalgam.hpp"
#include "oforge/errors.hpp"
#include "oforge/graph.hpp"
#include "oforge/verify.hpp"

using namespace oforge;

namespace {

AmalgamSpec ex1_spec() {
    FiniteGroup p(3, {Permutation({1, 2, 0}), Permutation({0, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    return AmalgamSpec{p, 0, {Permutation({0, 2, 1})}, a,
                       {{Permutation({0, 2, 1}), Permutation({1, 0, 2, 3})}}, {0, 1}};
}

AmalgamSpec ex2_spec() {
    FiniteGroup p(5, {Permutation({1, 2, 3, 4, 0}), Permutation({0, 4, 3, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    return AmalgamSpec{p, 0, {Permutation({0, 4, 3, 2, 1})}, a,
                       {{Permutation({0, 4, 3, 2, 1}), Permutation({1, 0, 2, 3})}}, {0, 1}};
}

ValidationCode code_of(const AmalgamSpec& spec) {
    try {
        ValidatedAmalgam::validate(spec);
    } catch (const ValidationError& e) {
        return e.code();
    }
    FAIL("expected a validation error");
    return ValidationCode::kOutOfRange;
}

}  // namespace

TEST_CASE("EX1 validates") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    CHECK(amalgam.multiplicity() == 2);
    CHECK(amalgam.lobe_size() == 3);
    CHECK(amalgam.lobe_digraph().arcs.size() == 6);  // complete digraph on 3 vertices
    CHECK(amalgam.coset_reps_a().size() == 2);
    CHECK(amalgam.coset_reps_p().size() == 3);
    CHECK(amalgam.coset_reps_a()[0].is_identity());
    CHECK(amalgam.coset_reps_p()[0].is_identity());
}

TEST_CASE("EX2 validates") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex2_spec());
    CHECK(amalgam.multiplicity() == 2);
    CHECK(amalgam.lobe_size() == 5);
    CHECK(amalgam.lobe_digraph().arcs.size() == 10);  // pentagon, both directions
    CHECK(amalgam.lobe_digraph().has_arc(0, 1));
    CHECK_FALSE(amalgam.lobe_digraph().has_arc(0, 2));
}

TEST_CASE("validation error codes") {
    // Regular lobe group (C5): trivial stabilizer.
    {
        AmalgamSpec spec = ex2_spec();
        spec.lobe_group = FiniteGroup(5, {Permutation({1, 2, 3, 4, 0})});
        spec.edge_group_gens = {};
        spec.embedding_gens = {};
        CHECK(code_of(spec) == ValidationCode::kLobeGroupRegular);
    }
    // Imprimitive lobe group (C4), reported before regularity.
    {
        AmalgamSpec spec = ex1_spec();
        spec.lobe_group = FiniteGroup(4, {Permutation({1, 2, 3, 0})});
        spec.edge_group_gens = {};
        spec.embedding_gens = {};
        CHECK(code_of(spec) == ValidationCode::kLobeGroupImprimitive);
    }
    // Carrier below three points.
    {
        AmalgamSpec spec = ex1_spec();
        spec.lobe_group = FiniteGroup(2, {Permutation({1, 0})});
        CHECK(code_of(spec) == ValidationCode::kLobeTooSmall);
    }
    // Index [A : H] below 2.
    {
        AmalgamSpec spec = ex1_spec();
        spec.vertex_group = FiniteGroup(2, {Permutation({1, 0})});
        spec.embedding_gens = {{Permutation({0, 2, 1}), Permutation({1, 0})}};
        CHECK(code_of(spec) == ValidationCode::kIndexTooSmall);
    }
    // Declared edge group is not the stabilizer of delta.
    {
        AmalgamSpec spec = ex1_spec();
        spec.edge_group_gens = {};
        spec.embedding_gens = {};
        CHECK(code_of(spec) == ValidationCode::kEdgeGroupMismatch);
    }
    // Non-homomorphic embedding: order 2 mapped onto an order-4 element.
    {
        AmalgamSpec spec = ex1_spec();
        spec.vertex_group = FiniteGroup(4, {Permutation({1, 2, 3, 0})});
        spec.embedding_gens = {{Permutation({0, 2, 1}), Permutation({1, 2, 3, 0})}};
        CHECK(code_of(spec) == ValidationCode::kEmbeddingNotHomomorphic);
    }
    // Non-injective embedding: the involution mapped to the identity.
    {
        AmalgamSpec spec = ex1_spec();
        spec.embedding_gens = {{Permutation({0, 2, 1}), Permutation({0, 1, 2, 3})}};
        CHECK(code_of(spec) == ValidationCode::kEmbeddingNotInjective);
    }
    // Image outside the vertex group.
    {
        AmalgamSpec spec = ex1_spec();
        spec.vertex_group = FiniteGroup(4, {Permutation({1, 0, 2, 3})});
        spec.embedding_gens = {{Permutation({0, 2, 1}), Permutation({0, 1, 3, 2})}};
        CHECK(code_of(spec) == ValidationCode::kEmbeddingImageNotInVertexGroup);
    }
    // Diagonal lobe arc.
    {
        AmalgamSpec spec = ex1_spec();
        spec.lambda_arc = {0, 0};
        CHECK(code_of(spec) == ValidationCode::kDiagonalLambdaArc);
    }
}

TEST_CASE("normal forms: identity and edge-group letters") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    CHECK(amalgam.form_from_word(GroupWord{}).is_identity());

    // h entered through either factor yields the same form: head h, no
    // syllables.
    Permutation h_p({0, 2, 1});
    GroupWord via_p;
    via_p.letters.push_back({Syllable::Side::kLobeGroup, h_p});
    GroupWord via_a;
    via_a.letters.push_back({Syllable::Side::kVertexGroup, amalgam.embed_to_a(h_p)});
    NormalForm x = amalgam.form_from_word(via_p);
    NormalForm y = amalgam.form_from_word(via_a);
    CHECK(amalgam.equal(x, y));
    CHECK(x.head() == h_p);
    CHECK(x.syllables().empty());
}

TEST_CASE("normal form of an alternating word") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    Permutation a({0, 1, 3, 2});   // in A but not in the embedded edge group
    Permutation p({1, 2, 0});
    GroupWord word;
    word.letters.push_back({Syllable::Side::kVertexGroup, a});
    word.letters.push_back({Syllable::Side::kLobeGroup, p});
    word.letters.push_back({Syllable::Side::kVertexGroup, a});
    NormalForm form = amalgam.form_from_word(word);
    CHECK(form.syllables().size() == 3);
    CHECK(form.syllables()[0].side == Syllable::Side::kVertexGroup);
    CHECK(form.syllables()[1].side == Syllable::Side::kLobeGroup);
    CHECK(form.syllables()[2].side == Syllable::Side::kVertexGroup);

    // Idempotence: re-folding the spelled-out form reproduces it.
    CHECK(amalgam.equal(amalgam.form_from_word(amalgam.word_of_form(form)), form));

    // Ball-action oracle: the form acts like the letters.
    Ball ball = expand_ball(amalgam, 4);
    for (const BallVertex& v : ball.vertices) {
        CHECK(act_on_vertex(amalgam, form, v.id) == act_letters(amalgam, word, v.id));
    }
}

TEST_CASE("group axioms and the ball-action oracle for products") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    std::uint64_t state = 41;
    Ball ball = expand_ball(amalgam, 5);
    for (int trial = 0; trial < 25; ++trial) {
        GroupWord wx = random_word(amalgam, state, 4);
        GroupWord wy = random_word(amalgam, state, 4);
        NormalForm x = amalgam.form_from_word(wx);
        NormalForm y = amalgam.form_from_word(wy);
        NormalForm xy = amalgam.multiply(x, y);
        CHECK(amalgam.multiply(x, amalgam.invert(x)).is_identity());
        CHECK(amalgam.equal(amalgam.multiply(amalgam.identity_form(), y), y));
        for (int probe = 0; probe < 8; ++probe) {
            const VertexId& v =
                ball.vertices[(trial * 131 + probe * 17) % ball.vertices.size()].id;
            CHECK(act_on_vertex(amalgam, xy, v) ==
                  act_on_vertex(amalgam, y, act_on_vertex(amalgam, x, v)));
        }
    }
}

TEST_CASE("alternation invariant holds after arithmetic") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex2_spec());
    std::uint64_t state = 7;
    for (int trial = 0; trial < 50; ++trial) {
        NormalForm x = amalgam.form_from_word(random_word(amalgam, state, 5));
        NormalForm y = amalgam.form_from_word(random_word(amalgam, state, 5));
        NormalForm product = amalgam.multiply(x, amalgam.invert(y));
        const auto& sylls = product.syllables();
        for (std::size_t i = 1; i < sylls.size(); ++i) {
            CHECK(sylls[i - 1].side != sylls[i].side);
            CHECK(sylls[i].index != 0);
        }
    }
}

TEST_CASE("action on vertices") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    VertexId root;
    CHECK(act_on_vertex(amalgam, amalgam.identity_form(), root) == root);

    // The root stabilizer is exactly the image of A.
    for (const Permutation& a : amalgam.vertex_group().elements()) {
        GroupWord word;
        word.letters.push_back({Syllable::Side::kVertexGroup, a});
        CHECK(act_on_vertex(amalgam, amalgam.form_from_word(word), root) == root);
    }

    // A rotation moves the root to the in-lobe neighbor with label 1, lobe 0.
    GroupWord rotation;
    rotation.letters.push_back({Syllable::Side::kLobeGroup, Permutation({1, 2, 0})});
    CHECK(act_on_vertex(amalgam, amalgam.form_from_word(rotation), root) ==
          VertexId{}.child(0, 1));
}

TEST_CASE("action preserves adjacency") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex2_spec());
    Ball ball = expand_ball(amalgam, 3);
    std::uint64_t state = 11;
    for (int trial = 0; trial < 5; ++trial) {
        NormalForm g = amalgam.form_from_word(random_word(amalgam, state, 4));
        for (std::size_t i = 0; i < ball.arcs.size(); i += 7) {
            const BallArc& arc = ball.arcs[i];
            VertexId from = act_on_vertex(
                amalgam, g, ball.vertices[static_cast<std::size_t>(arc.from)].id);
            VertexId to =
                act_on_vertex(amalgam, g, ball.vertices[static_cast<std::size_t>(arc.to)].id);
            bool adjacent = false;
            for (const NeighborInfo& n : neighbors(amalgam, from)) {
                if (n.vertex == to && n.arc_out) adjacent = true;
            }
            CHECK(adjacent);
        }
    }
}

TEST_CASE("mixed amalgam inputs are rejected") {
    ValidatedAmalgam ex1 = ValidatedAmalgam::validate(ex1_spec());
    ValidatedAmalgam ex2 = ValidatedAmalgam::validate(ex2_spec());
    NormalForm x = ex1.identity_form();
    NormalForm y = ex2.identity_form();
    CHECK_THROWS_AS(ex1.multiply(x, y), InputError);
    CHECK_THROWS_AS(ex2.equal(x, y), InputError);
    // A lambda-arc variant shares the base, so forms carry over.
    ValidatedAmalgam gram = ex2.with_lambda_arc({0, 2});
    CHECK(gram.same_base(ex2));
    CHECK(gram.equal(y, gram.identity_form()));
}

TEST_CASE("serialization formats") {
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1_spec());
    GroupWord word;
    word.letters.push_back({Syllable::Side::kVertexGroup, Permutation({0, 1, 3, 2})});
    word.letters.push_back({Syllable::Side::kLobeGroup, Permutation({1, 2, 0})});
    NormalForm form = amalgam.form_from_word(word);
    std::string text = form.to_string(amalgam);
    CHECK(text.find(" | ") != std::string::npos);
    CHECK(text.find("A:") != std::string::npos);
    CHECK(text.find("P:") != std::string::npos);
    CHECK(amalgam.identity_form().to_string(amalgam) == "[0,1,2] |");
}

TEST_CASE("multiplicity equals observed lobes per vertex") {
    for (const AmalgamSpec& spec : {ex1_spec(), ex2_spec()}) {
        ValidatedAmalgam amalgam = ValidatedAmalgam::validate(spec);
        Ball ball = expand_ball(amalgam, 3);
        // Count distinct lobe tags on arcs through each interior vertex.
        auto [lo, hi] = ball.sphere(1);
        for (int v = lo; v < hi; ++v) {
            std::set<std::string> tags;
            for (const BallArc& arc : ball.arcs) {
                if (arc.from == v || arc.to == v) tags.insert(arc.lobe);
            }
            CHECK(static_cast<int>(tags.size()) == amalgam.multiplicity());
        }
    }
}
