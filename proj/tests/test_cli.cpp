#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string out_file = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                           "/oforge_cli_out.txt";
    std::string command = (env.empty() ? std::string() : env + " ") + OFORGE_CLI_PATH + " " +
                          args + " > " + out_file + " 2>&1";
    int status = std::system(command.c_str());
    std::ifstream in(out_file);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {exit_code, buffer.str()};
}

std::string fixture(const std::string& name) {
    return std::string(OFORGE_FIXTURE_DIR) + "/" + name;
}

std::string data(const std::string& name) {
    return std::string(OFORGE_TEST_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("validate exit codes") {
    RunResult ok = run_cli("validate " + fixture("ex1.spec"));
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("m=2") != std::string::npos);

    RunResult imprimitive = run_cli("validate " + data("c4.spec"));
    CHECK(imprimitive.exit_code == 2);
    CHECK(imprimitive.output.find("imprimitive") != std::string::npos);
    CHECK(imprimitive.output.find("{0,2}") != std::string::npos);  // witness block

    RunResult regular = run_cli("validate " + data("c5.spec"));
    CHECK(regular.exit_code == 2);
    CHECK(regular.output.find("regular") != std::string::npos);

    RunResult malformed = run_cli("validate " + data("malformed.spec"));
    CHECK(malformed.exit_code == 1);
    CHECK(malformed.output.find("line 3") != std::string::npos);
}

TEST_CASE("expand output") {
    RunResult json_run = run_cli("expand " + fixture("ex1.spec") + " --radius 1 --format json");
    REQUIRE(json_run.exit_code == 0);
    auto parsed = nlohmann::json::parse(json_run.output);
    CHECK(parsed["vertices"].size() == 5);
    CHECK(parsed["arcs"].size() == 12);

    RunResult trivial = run_cli("expand " + fixture("ex1.spec") + " --radius 0");
    auto trivial_parsed = nlohmann::json::parse(trivial.output);
    CHECK(trivial_parsed["vertices"].size() == 1);
    CHECK(trivial_parsed["arcs"].empty());

    RunResult dot_run = run_cli("expand " + fixture("ex2.spec") + " --radius 2 --format dot");
    REQUIRE(dot_run.exit_code == 0);
    CHECK(dot_run.output.find("digraph ball") != std::string::npos);
    // 1 + 4 + 12 vertices.
    CHECK(dot_run.output.find("n16") != std::string::npos);
    CHECK(dot_run.output.find("n17") == std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs") {
    RunResult first = run_cli("expand " + fixture("ex2.spec") + " --radius 2 --format json");
    RunResult second = run_cli("expand " + fixture("ex2.spec") + " --radius 2 --format json");
    CHECK(first.output == second.output);

    RunResult analyze_a = run_cli("analyze " + fixture("ex1.spec") + " --radius 2");
    RunResult analyze_b = run_cli("analyze " + fixture("ex1.spec") + " --radius 2");
    REQUIRE(analyze_a.exit_code == 0);
    auto payload_a = nlohmann::json::parse(analyze_a.output)["payload"];
    auto payload_b = nlohmann::json::parse(analyze_b.output)["payload"];
    CHECK(payload_a.dump() == payload_b.dump());
    CHECK(nlohmann::json::parse(analyze_a.output)["input_digest"] ==
          nlohmann::json::parse(analyze_b.output)["input_digest"]);
}

TEST_CASE("analyze payload") {
    RunResult run = run_cli("analyze " + fixture("ex1.spec") + " --radius 2");
    REQUIRE(run.exit_code == 0);
    auto payload = nlohmann::json::parse(run.output)["payload"];
    CHECK(payload["ends"]["classification"] == "uncountable");
    CHECK(payload["ends"]["certificate"] == nlohmann::json::array({2, 4, 8}));
    CHECK(payload["suborbits"]["subdegrees"] == nlohmann::json::array({1, 4, 4, 4}));

    RunResult shallow = run_cli("analyze " + fixture("ex1.spec") + " --radius 0");
    REQUIRE(shallow.exit_code == 0);
    auto shallow_payload = nlohmann::json::parse(shallow.output)["payload"];
    CHECK(shallow_payload["ends"]["classification"] == "unresolved");
    CHECK(shallow_payload["ends"].contains("note"));
    CHECK(shallow_payload["suborbits"]["subdegrees"] == nlohmann::json::array({1}));
}

TEST_CASE("canonical subcommands") {
    RunResult enumerate = run_cli("canonical " + fixture("ex2.spec") + " --enumerate");
    REQUIRE(enumerate.exit_code == 0);
    auto descriptors = nlohmann::json::parse(enumerate.output)["payload"]["descriptors"];
    CHECK(descriptors.size() == 2);

    RunResult equiv = run_cli("canonical " + fixture("ex2.spec") + " --equiv 0 1");
    REQUIRE(equiv.exit_code == 0);
    CHECK(nlohmann::json::parse(equiv.output)["payload"]["equivalent"] == true);

    RunResult refine = run_cli("canonical " + fixture("ex1.spec") + " --refine l0.v1");
    REQUIRE(refine.exit_code == 0);
    auto trace = nlohmann::json::parse(refine.output)["payload"]["trace"];
    CHECK(trace["resolved"] == true);
    CHECK(trace["terminal_index"] == 1);
    CHECK(trace["matched_descriptor"] == 0);
}

TEST_CASE("capacity override through the environment") {
    RunResult capped =
        run_cli("expand " + fixture("ex1.spec") + " --radius 6", "ORBITAL_FORGE_MAX_VERTICES=10");
    CHECK(capped.exit_code == 3);
}

TEST_CASE("verify on a bypassed degenerate amalgam fails with the table") {
    // The C4 toy passes only under --unchecked; the decomposition row must
    // name the maximality failure, and the exit code is the verify family.
    RunResult run = run_cli("verify " + data("c4.spec") + " --unchecked");
    CHECK(run.exit_code == 5);
    CHECK(run.output.find("FAIL") != std::string::npos);
    CHECK(run.output.find("amalgam_decomposition") != std::string::npos);
    CHECK(run.output.find("maximality") != std::string::npos);
}
