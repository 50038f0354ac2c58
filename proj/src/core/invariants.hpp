#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/diagrams.hpp"
#include "core/geometry.hpp"
#include "core/mc.hpp"

namespace knotmc {

struct TermResult {
    std::string label;
    int s = 0, t = 0;
    Estimate estimate;  // printed coefficient included
};

struct InvariantResult {
    std::string name;
    int m = 4;
    std::string knot;
    std::string form;
    std::vector<TermResult> terms;
    Estimate total;  // sum of term values, stderr combined in quadrature
    bool parity_vanishing = false;

    void combine();
};

struct RunOptions {
    long long n = 100000;
    uint64_t seed = 1;
    int workers = 1;
    bool antithetic = false;
    ProposalSpec proposal;  // scale 0 means "auto from knot feature scale"

    ProposalSpec resolved_proposal(const LongKnot& knot) const;
};

/// Gauss-map linking number of a long knot and a disjoint loop. Estimated
/// exactly as the pullback integral over R^{m-2} x S^1; the value is an
/// integer for disjoint pairs. Throws std::invalid_argument if the images
/// come within 1e-6 of each other on a validation grid.
Estimate linking_number(const LongKnot& knot, const LoopCurve& loop, const RunOptions& opt);

/// Signed transverse-intersection count of the loop's spanning disk with
/// the flat knot plane: the integer the linking-number estimate must hit
/// for the flat knot. Only meaningful for circles around the flat knot.
int linking_number_oracle_flat(const LoopCurve& loop);

InvariantResult theta1(const LongKnot& knot, const RunOptions& opt);
InvariantResult theta2(const LongKnot& knot, const RunOptions& opt, Theta2Form form = Theta2Form::Printed);
InvariantResult theta3(const LongKnot& knot, const RunOptions& opt, Theta3Form form = Theta3Form::Printed);

/// Both sides of the boundary-formula probe for theta1 along an isotopy
/// path: lhs is the same-sample central finite difference of theta1 at t,
/// rhs the boundary integral contracted with the deformation field,
/// integrated over R^{m-2} x S^{m-3} through the normalized-jacobian map.
struct ProbeResult {
    Estimate lhs;
    Estimate rhs;
    double fd_step;
};
ProbeResult dtheta1_probe(const IsotopyPath& path, double t, const RunOptions& opt, double fd_step = 1e-3);

/// trace of exp(-hbar * lk * xi) for a square matrix xi (row-major),
/// computed by scaling and squaring.
double mixed_expectation(double lk_value, const std::vector<double>& xi_matrix, int dim, double hbar);

/// Pointwise parity checks: max over sampled configurations of the
/// normalized residual |g(z) + g(inv z)|.
struct ParityCheck {
    std::string term;
    std::string involution;
    double max_residual = 0.0;
    bool involution_found = true;  // false when the search found none
};

/// theta1 swap antisymmetry (odd m), the three printed theta2 involutions
/// (even m), or an automatic involution search per theta3 term (odd m).
std::vector<ParityCheck> parity_suite(const std::string& invariant, int m, int points, uint64_t seed);

/// Maximum |integrand| over random configurations on the flat knot,
/// normalized by the accumulated product magnitude (roundoff envelope).
struct FlatCheck {
    std::string term;
    double max_residual = 0.0;
};
std::vector<FlatCheck> flat_annihilation(int m, int points, uint64_t seed);

/// deterministic random configuration generator for pointwise suites
ConfigurationPoint random_config(int s, int t, int m, uint64_t seed, uint64_t index, double box = 2.0);

}  // namespace knotmc
