// Benchmark comparing the OpenMP kernels against their serial references:
// ball expansion, suborbit partitioning and the all-pairs distance check.

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "oforge/canonical.hpp"
#include "oforge/decompose.hpp"
#include "oforge/graph.hpp"
#include "oforge/parallel.hpp"

namespace {

using namespace oforge;
using Clock = std::chrono::steady_clock;

ValidatedAmalgam make_ex1() {
    FiniteGroup p(3, {Permutation({1, 2, 0}), Permutation({0, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    AmalgamSpec spec{p, 0, {Permutation({0, 2, 1})}, a,
                     {{Permutation({0, 2, 1}), Permutation({1, 0, 2, 3})}},
                     {0, 1}};
    return ValidatedAmalgam::validate(spec);
}

ValidatedAmalgam make_ex2() {
    FiniteGroup p(5, {Permutation({1, 2, 3, 4, 0}), Permutation({0, 4, 3, 2, 1})});
    FiniteGroup a(4, {Permutation({1, 0, 2, 3}), Permutation({0, 1, 3, 2})});
    AmalgamSpec spec{p, 0, {Permutation({0, 4, 3, 2, 1})}, a,
                     {{Permutation({0, 4, 3, 2, 1}), Permutation({1, 0, 2, 3})}},
                     {0, 1}};
    return ValidatedAmalgam::validate(spec);
}

template <typename Fn>
double time_ms(Fn&& fn) {
    auto start = Clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "outputs identical" : "OUTPUT MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oforge-bench: serial vs OpenMP kernel comparison"};
    int expand_radius = 13;
    int qi_radius = 4;
    int suborbit_radius = 9;
    app.add_option("--expand-radius", expand_radius);
    app.add_option("--qi-radius", qi_radius);
    app.add_option("--suborbit-radius", suborbit_radius);
    CLI11_PARSE(app, argc, argv);

    std::printf("threads available: %d\n\n", max_threads());

    ValidatedAmalgam ex1 = make_ex1();
    ValidatedAmalgam ex2 = make_ex2();

    {
        Ball serial;
        Ball parallel;
        double s = time_ms([&] { serial = expand_ball_serial(ex1, expand_radius); });
        double p = time_ms([&] { parallel = expand_ball(ex1, expand_radius); });
        bool same = serial.arcs == parallel.arcs &&
                    serial.vertices.size() == parallel.vertices.size();
        std::printf("ball: %zu vertices, %zu arcs\n", parallel.vertices.size(),
                    parallel.arcs.size());
        report("expand_ball", s, p, same);
    }

    {
        SuborbitReport serial;
        SuborbitReport parallel;
        double s = time_ms([&] {
            serial = suborbits(ex1, suborbit_radius, kDefaultVertexCap, Kernel::kSerial);
        });
        double p = time_ms([&] {
            parallel = suborbits(ex1, suborbit_radius, kDefaultVertexCap, Kernel::kParallel);
        });
        bool same = serial.subdegrees() == parallel.subdegrees();
        report("suborbits", s, p, same);
    }

    {
        std::vector<CanonicalDescriptor> family = enumerate_canonical(ex2);
        const OrbitalHandle& h1 = family[0].seed;
        const OrbitalHandle& h2 = family.size() > 1 ? family[1].seed : family[0].seed;
        QIReport serial;
        QIReport parallel;
        double s = time_ms([&] {
            serial = quasi_isometry_check(h1, h2, qi_radius, kDefaultVertexCap, Kernel::kSerial);
        });
        double p = time_ms([&] {
            parallel =
                quasi_isometry_check(h1, h2, qi_radius, kDefaultVertexCap, Kernel::kParallel);
        });
        bool same = serial.verified_pairs == parallel.verified_pairs &&
                    serial.violations.size() == parallel.violations.size() &&
                    serial.a == parallel.a;
        std::printf("qi: %zu pairs checked, a=%d\n", parallel.verified_pairs, parallel.a);
        report("quasi_isometry_check", s, p, same);
    }
    return 0;
}
