#include <cstdio>
#include <cmath>

#include "core/propagators.hpp"

using namespace knotmc;

int main() {
    LongKnot knot = LongKnot::bump(5, {0.0, 0.0, 0.0}, 1.3, {0.3, 0.2, 0.1, 0.5, 0.4});
    ConfigurationPoint cfg;
    cfg.s = 2;
    cfg.t = 0;
    cfg.m = 5;
    cfg.xs = {0.3, -0.2, 0.5, 1.1, 0.4, -0.7};

    AltForm t12 = theta_at(cfg, knot, 1, 2);
    AltForm t21 = theta_at(cfg, knot, 2, 1);
    double worst = 0.0;
    for (const auto& t : t12.terms()) {
        double rel = std::fabs(t21.coeff(t.mask) - (-1.0) * t.coeff) / std::max(1e-30, std::fabs(t.coeff));
        worst = std::max(worst, rel);
    }
    std::printf("theta swap (m=5, want t21 == -t12): worst rel %.3e  (n12=%zu n21=%zu)\n", worst,
                t12.terms().size(), t21.terms().size());

    AltForm e12 = eta_at(cfg, 1, 2);
    AltForm e21 = eta_at(cfg, 2, 1);
    worst = 0.0;
    for (const auto& t : e12.terms()) {
        double rel = std::fabs(e21.coeff(t.mask) - (-1.0) * t.coeff) / std::max(1e-30, std::fabs(t.coeff));
        worst = std::max(worst, rel);
    }
    std::printf("eta swap (m=5, want e21 == -e12): worst rel %.3e\n", worst);

    // full theta1 integrand swap by hand
    double g = wedge_top(std::vector<AltForm>{t12, e12});
    ConfigurationPoint swapped = cfg;
    // swap the two points
    swapped.xs = {1.1, 0.4, -0.7, 0.3, -0.2, 0.5};
    AltForm t12s = theta_at(swapped, knot, 1, 2);
    AltForm e12s = eta_at(swapped, 1, 2);
    double gs = wedge_top(std::vector<AltForm>{t12s, e12s});
    std::printf("g = %.6e  g(swapped) = %.6e  (want opposite signs)\n", g, gs);

    // cross-check: wedge_top of [t21, e21] at the ORIGINAL config should
    // equal g up to the two (-1)^m flips = +g, and relate to gs by the
    // column permutation determinant
    double gt = wedge_top(std::vector<AltForm>{t21, e21});
    std::printf("top(t21^e21) = %.6e vs g = %.6e\n", gt, g);
    return 0;
}
