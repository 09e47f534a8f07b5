#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oforge/amalgam.hpp"
#include "oforge/graph.hpp"

namespace oforge {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// The property suite behind the `verify` command: structural theorems
/// checked on finite balls of the given amalgam. Randomized checks draw from
/// the given seed.
std::vector<CheckResult> run_verification_suite(const ValidatedAmalgam& amalgam,
                                                std::uint64_t seed);

/// Independent orbit partition of a ball sphere under the root stabilizer,
/// used as the brute-force subdegree oracle.
std::vector<std::vector<VertexId>> brute_force_sphere_orbits(const ValidatedAmalgam& amalgam,
                                                             const Ball& ball, int radius);

/// Random free word over the two factors.
GroupWord random_word(const ValidatedAmalgam& amalgam, std::uint64_t& state, int max_letters);

/// Image of a vertex under a word applied letter by letter; the oracle route
/// around the normal-form multiplication.
VertexId act_letters(const ValidatedAmalgam& amalgam, const GroupWord& word, const VertexId& v);

}  // namespace oforge
