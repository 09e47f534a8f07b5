#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "oforge/canonical.hpp"
#include "oforge/decompose.hpp"
#include "oforge/errors.hpp"
#include "oforge/exports.hpp"
#include "oforge/specfile.hpp"
#include "oforge/verify.hpp"

namespace {

using namespace oforge;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

std::size_t effective_cap(const Limits& limits) {
    if (const char* env = std::getenv("ORBITAL_FORGE_MAX_VERTICES")) {
        try {
            return static_cast<std::size_t>(std::stoull(env));
        } catch (const std::exception&) {
            throw InputError("bad ORBITAL_FORGE_MAX_VERTICES value");
        }
    }
    return limits.max_vertices;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + out_path + "'");
    out << content;
}

int cmd_validate(const std::string& path) {
    SpecFile file = parse_spec_file(path);
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    std::cout << "valid: m=" << amalgam.multiplicity() << ", |Delta|=" << amalgam.lobe_size()
              << ", lobe arcs=" << amalgam.lobe_digraph().arcs.size() << "\n";
    return 0;
}

int cmd_expand(const std::string& path, int radius, const std::string& format,
               const std::string& out_path) {
    SpecFile file = parse_spec_file(path);
    if (radius > file.limits.max_radius) {
        throw CapacityError("requested radius exceeds the spec-file radius cap",
                            static_cast<std::size_t>(radius));
    }
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    Ball ball = expand_ball(amalgam, radius, effective_cap(file.limits));
    if (format == "dot") {
        write_output(out_path, ball_to_dot(ball));
    } else {
        write_output(out_path, ball_to_json(ball).dump(2) + "\n");
    }
    return 0;
}

int cmd_analyze(const std::string& path, int radius, const std::string& out_path) {
    auto start = std::chrono::steady_clock::now();
    SpecFile file = parse_spec_file(path);
    if (radius > file.limits.max_radius) {
        throw CapacityError("requested radius exceeds the spec-file radius cap",
                            static_cast<std::size_t>(radius));
    }
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    std::size_t cap = effective_cap(file.limits);

    EndReport ends = classify_ends(amalgam, radius, cap);
    Ball ball = expand_ball(amalgam, radius, cap);
    Json payload;
    payload["ends"] = end_report_to_json(ends);
    if (ends.classification == EndClass::kUnresolved) {
        payload["ends"]["note"] = "radius too small to certify a classification";
    }
    if (radius >= 1) {
        LobeSet lobe_set = lobes(ball);
        BlockCutTree tree = block_cut_tree(ball);
        payload["lobes"] = Json{{"certified", lobe_set.certified.size()},
                                {"boundary_blocks", lobe_set.boundary_blocks.size()}};
        Json tree_json{{"cut_vertices", tree.cuts.size()}, {"lobe_nodes", tree.lobe_nodes.size()}};
        if (tree.root) {
            tree_json["root_degree"] =
                tree.adjacency[static_cast<std::size_t>(*tree.root)].size();
        }
        payload["block_cut_tree"] = std::move(tree_json);
    } else {
        payload["lobes"] = Json{{"certified", 0}, {"boundary_blocks", 0}};
        payload["block_cut_tree"] = Json{{"cut_vertices", 0}, {"lobe_nodes", 0}};
    }
    payload["suborbits"] = suborbit_report_to_json(suborbits(amalgam, radius, cap));

    Json envelope = make_envelope("analyze", digest_hex(file.raw), std::move(payload),
                                  elapsed_ms(start));
    write_output(out_path, envelope.dump(2) + "\n");
    return 0;
}

int cmd_canonical(const std::string& path, bool enumerate, const std::string& refine_address,
                  std::optional<std::pair<int, int>> equiv, const std::string& out_path) {
    auto start = std::chrono::steady_clock::now();
    SpecFile file = parse_spec_file(path);
    ValidatedAmalgam amalgam = ValidatedAmalgam::validate(file.spec);
    Json payload;
    int exit_code = 0;

    if (enumerate) {
        Json list = Json::array();
        for (const CanonicalDescriptor& d : enumerate_canonical(amalgam)) {
            list.push_back(descriptor_to_json(d));
        }
        payload["descriptors"] = std::move(list);
    } else if (!refine_address.empty()) {
        VertexId beta = VertexId::parse(refine_address);
        OrbitalHandle handle(amalgam, VertexId{}, beta);
        RefineResult result = refine_to_canonical(handle);
        payload["trace"] = trace_to_json(result.trace);
        if (result.descriptor) {
            payload["descriptor"] = descriptor_to_json(*result.descriptor);
        }
        if (!result.trace.resolved) exit_code = 4;
    } else if (equiv) {
        std::vector<CanonicalDescriptor> family = enumerate_canonical(amalgam);
        auto [i, j] = *equiv;
        if (i < 0 || j < 0 || i >= static_cast<int>(family.size()) ||
            j >= static_cast<int>(family.size())) {
            throw InputError("descriptor index out of range");
        }
        payload["equivalent"] = check_equivalence(family[static_cast<std::size_t>(i)],
                                                  family[static_cast<std::size_t>(j)], 3);
        payload["pair"] = Json::array({i, j});
    } else {
        payload["descriptor"] = descriptor_to_json(construct_canonical(amalgam));
    }

    Json envelope = make_envelope("canonical", digest_hex(file.raw), std::move(payload),
                                  elapsed_ms(start));
    write_output(out_path, envelope.dump(2) + "\n");
    return exit_code;
}

int cmd_verify(const std::string& path, std::uint64_t seed, bool unchecked) {
    SpecFile file = parse_spec_file(path);
    ValidatedAmalgam amalgam = unchecked ? ValidatedAmalgam::validate_unchecked(file.spec)
                                         : ValidatedAmalgam::validate(file.spec);
    std::vector<CheckResult> results = run_verification_suite(amalgam, seed);
    bool all_pass = true;
    for (const CheckResult& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 5;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbital-forge: connectivity-one orbital digraph engine"};
    app.require_subcommand(1);

    std::string path;
    std::string out_path;
    std::string format = "json";
    std::string refine_address;
    std::vector<int> equiv_pair;
    int radius = 2;
    std::uint64_t seed = 0;
    bool enumerate = false;
    bool unchecked = false;

    CLI::App* validate = app.add_subcommand("validate", "validate an amalgam spec file");
    validate->add_option("path", path)->required();

    CLI::App* expand = app.add_subcommand("expand", "expand a ball and export it");
    expand->add_option("path", path)->required();
    expand->add_option("--radius,-r", radius);
    expand->add_option("--format,-f", format)->check(CLI::IsMember({"json", "dot"}));
    expand->add_option("--out,-o", out_path);

    CLI::App* analyze = app.add_subcommand("analyze", "ends, lobes, tree and subdegrees");
    analyze->add_option("path", path)->required();
    analyze->add_option("--radius,-R", radius);
    analyze->add_option("--out,-o", out_path);

    CLI::App* canonical = app.add_subcommand("canonical", "canonical digraph operations");
    canonical->add_option("path", path)->required();
    canonical->add_flag("--enumerate", enumerate);
    canonical->add_option("--refine", refine_address, "seed address to refine from");
    canonical->add_option("--equiv", equiv_pair, "two descriptor indices")->expected(2);
    canonical->add_option("--out,-o", out_path);

    CLI::App* verify = app.add_subcommand("verify", "run the property suite");
    verify->add_option("path", path)->required();
    verify->add_option("--seed", seed);
    verify->add_flag("--unchecked", unchecked, "skip structural validation (test harness)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return cmd_validate(path);
        if (expand->parsed()) return cmd_expand(path, radius, format, out_path);
        if (analyze->parsed()) return cmd_analyze(path, radius, out_path);
        if (canonical->parsed()) {
            std::optional<std::pair<int, int>> equiv;
            if (equiv_pair.size() == 2) equiv = {equiv_pair[0], equiv_pair[1]};
            return cmd_canonical(path, enumerate, refine_address, equiv, out_path);
        }
        if (verify->parsed()) return cmd_verify(path, seed, unchecked);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.family());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
