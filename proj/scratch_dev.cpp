// temporary development probe, not part of the build
#include <chrono>
#include <cstdio>

#include "core/diagrams.hpp"
#include "core/exterior.hpp"
#include "core/invariants.hpp"
#include "core/propagators.hpp"

using namespace knotmc;

int main() {
    // parity suites on the spun knot
    {
        for (auto& c : parity_suite("theta1", 5, 100, 3))
            std::printf("theta1 m=5 parity %s: %.3e\n", c.involution.c_str(), c.max_residual);
        for (auto& c : parity_suite("theta2", 4, 100, 3))
            std::printf("theta2 m=4 parity %s %s: %.3e\n", c.term.c_str(), c.involution.c_str(), c.max_residual);
        auto t0 = std::chrono::steady_clock::now();
        for (auto& c : parity_suite("theta3", 5, 30, 3))
            std::printf("theta3 m=5 %s: %s %.3e\n", c.term.c_str(), c.involution.c_str(), c.max_residual);
        auto t1 = std::chrono::steady_clock::now();
        std::printf("theta3 search took %.2f s\n", std::chrono::duration<double>(t1 - t0).count());
    }
    // embedding diagnostics for the default spun knots
    for (int m : {4, 5}) {
        LongKnot spun = LongKnot::spun(m, 0.5, 2.0, {1.0, -1.3}, {0.4, 1.1, -1.5}, {0.3, -0.6});
        try {
            spun.validate_embedding();
            std::printf("spun m=%d embedding diagnostics pass\n", m);
        } catch (const std::exception& e) {
            std::printf("spun m=%d FAILS: %s\n", m, e.what());
        }
    }
    // dtheta1 probe on a spun-amplitude path at m=4 (pins the rhs sign)
    {
        LongKnot spun = LongKnot::spun(4, 0.6, 2.0, {1.0, -1.3}, {0.4, 1.1, -1.5}, {0.3, -0.6});
        IsotopyPath path(IsotopyPath::Kind::SpunAmplitude, spun);
        RunOptions opt;
        opt.n = 2000000;
        opt.seed = 5;
        auto t0 = std::chrono::steady_clock::now();
        ProbeResult pr = dtheta1_probe(path, 0.5, opt);
        auto t1 = std::chrono::steady_clock::now();
        std::printf("dtheta1 spun: lhs = %.6f +- %.6f ; rhs = %.6f +- %.6f (%.2f s)\n", pr.lhs.value,
                    pr.lhs.stderr_, pr.rhs.value, pr.rhs.stderr_,
                    std::chrono::duration<double>(t1 - t0).count());
    }
    // theta1 on a spun knot at m=4 (should be nonzero / self-consistent)
    {
        LongKnot spun = LongKnot::spun(4, 0.6, 2.0, {1.0, -1.3}, {0.4, 1.1, -1.5}, {0.3, -0.6});
        RunOptions opt;
        opt.n = 500000;
        opt.seed = 11;
        auto r1 = theta1(spun, opt);
        opt.seed = 12;
        auto r2 = theta1(spun, opt);
        std::printf("theta1 spun m=4: seed11 %.6f +- %.6f ; seed12 %.6f +- %.6f\n", r1.total.value,
                    r1.total.stderr_, r2.total.value, r2.total.stderr_);
    }
    return 0;
}
