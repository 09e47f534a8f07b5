#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "doctest.h"
#include "oforge/errors.hpp"
#include "oforge/exports.hpp"
#include "oforge/graph.hpp"
#include "oforge/specfile.hpp"

using namespace oforge;

namespace {

const std::string kMinimalSpec = R"(group P {
  degree 3
  gen (0 1 2)
  gen (1 2)
}
group A {
  degree 4
  gen [1,0,2,3]
  gen (2 3)
}
amalgam {
  lobe_group P
  vertex_group A
  delta 0
  embed (1 2) -> (0 1)
  lambda_arc 0 1
}
)";

}  // namespace

TEST_CASE("parsing permutation literals") {
    CHECK(parse_permutation("(0 1 2)", 3).to_string() == "[1,2,0]");
    CHECK(parse_permutation("(0 1)(2 3)", 4).to_string() == "[1,0,3,2]");
    CHECK(parse_permutation("[1,2,0]", 3).to_string() == "[1,2,0]");
    CHECK_THROWS_AS(parse_permutation("(0 1", 3), ParseError);
    CHECK_THROWS_AS(parse_permutation("[1,1,0]", 3), ParseError);
    CHECK_THROWS_AS(parse_permutation("[1,0]", 3), ParseError);
    CHECK_THROWS_AS(parse_permutation("(0 9)", 3), ParseError);
}

TEST_CASE("parsing the shipped fixtures") {
    SpecFile ex1 = parse_spec_file(std::string(OFORGE_FIXTURE_DIR) + "/ex1.spec");
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(ex1.spec);
    CHECK(amalgam.multiplicity() == 2);
    CHECK(amalgam.lobe_size() == 3);
    CHECK(ex1.limits.max_vertices == 1000000);
    CHECK(ex1.limits.max_radius == 16);

    SpecFile ex2 = parse_spec_file(std::string(OFORGE_FIXTURE_DIR) + "/ex2.spec");
    CHECK(ValidatedAmalgam::validate(ex2.spec).lobe_size() == 5);
}

TEST_CASE("minimal inline spec") {
    SpecFile file = parse_spec_text(kMinimalSpec);
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    CHECK(amalgam.multiplicity() == 2);
    CHECK(file.limits.max_vertices == kDefaultVertexCap);  // limits block optional
}

TEST_CASE("parse errors carry line numbers") {
    std::string bad = kMinimalSpec;
    bad.replace(bad.find("gen (0 1 2)"), 11, "gen (0 1 2 ");
    try {
        parse_spec_text(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("unterminated") != std::string::npos);
    }

    std::string unknown = kMinimalSpec;
    unknown.replace(unknown.find("delta 0"), 7, "delta 0\n  colour red");
    CHECK_THROWS_AS(parse_spec_text(unknown), ParseError);

    CHECK_THROWS_AS(parse_spec_text("group P {\n degree 3\n}\n"), ParseError);  // no amalgam
    CHECK_THROWS_AS(parse_spec_text("amalgam {\n"), ParseError);                // unterminated
}

TEST_CASE("deterministic outputs for a fixed input") {
    SpecFile first = parse_spec_text(kMinimalSpec);
    SpecFile second = parse_spec_text(kMinimalSpec);
    CHECK(digest_hex(first.raw) == digest_hex(second.raw));

    Ball ball_a = expand_ball(ValidatedAmalgam::validate(first.spec), 2);
    Ball ball_b = expand_ball(ValidatedAmalgam::validate(second.spec), 2);
    CHECK(ball_to_json(ball_a).dump(2) == ball_to_json(ball_b).dump(2));
    CHECK(ball_to_dot(ball_a) == ball_to_dot(ball_b));
}

TEST_CASE("export shapes") {
    SpecFile file = parse_spec_text(kMinimalSpec);
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    Ball ball = expand_ball(amalgam, 1);
    Json json = ball_to_json(ball);
    CHECK(json["root"] == "");
    CHECK(json["radius"] == 1);
    CHECK(json["vertices"].size() == 5);
    CHECK(json["arcs"].size() == 12);
    CHECK(json["vertices"][1]["address"] == "l0.v1");

    std::string dot = ball_to_dot(ball);
    CHECK(dot.find("digraph ball") != std::string::npos);
    CHECK(dot.find("->") != std::string::npos);
}
