#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "core/configspace.hpp"
#include "core/geometry.hpp"

namespace knotmc {

/// Gradings of a diagram built from snakes sigma_n, polygons tau_n and
/// trivalent ambient vertices. hbar orders are half-integers and are kept
/// doubled so everything stays in exact integer arithmetic.
struct GradingReport {
    std::map<int, int> snakes;    // length n -> count s_n
    std::map<int, int> polygons;  // length n -> count t_n
    int vertices = 0;             // ambient interaction vertices v
    int hbar_twice = 0;           // sum (n+1) s_n + sum n t_n + v
    int xi_degree = 0;            // sum s_n
    int a_degree = 0;             // sum n s_n + sum n t_n + 2 v
    int b_degree = 0;             // sum s_n + v

    /// a_degree - b_degree == sum (n-1) s_n + sum n t_n + v; zero exactly
    /// when the diagram is a fully contracted vacuum diagram
    int balance() const { return a_degree - b_degree; }
};

/// Connected diagram of the Wilson-surface expansion. On-knot vertices are
/// numbered first (component by component, snake chains tail to head), then
/// ambient vertices. eta edges are directed along the chain/cycle; theta
/// edges are directed from the a-side to the B-side of the Wick pairing.
/// Tadpoles (self edges) are unrepresentable by construction. compile_* hold
/// the edge lists actually wedged by compile_integrand, in a fixed printed
/// order for the catalogued low orders.
struct Diagram {
    std::vector<int> snake_lengths;    // one entry per snake (sigma_n has n+1 vertices)
    std::vector<int> polygon_lengths;  // one entry per polygon (tau_n has n vertices)
    int ambient = 0;

    std::vector<std::pair<int, int>> eta;    // 0-based
    std::vector<std::pair<int, int>> theta;  // 0-based, a -> B

    int onknot_vertices() const;
    int order() const { return static_cast<int>(snake_lengths.size()); }

    // compile data: 1-based labels, thetas wedged before etas
    std::vector<std::pair<int, int>> compile_theta;
    std::vector<std::pair<int, int>> compile_eta;

    long long symmetry = 1;
    std::string label;
};

enum class Parity { Even, Odd };

/// Complete list of connected vacuum diagrams at the given hbar order, with
/// tadpoles excluded, identically vanishing contractions dropped, and
/// isomorphic duplicates merged. The catalogue is the same for both ambient
/// parities through order 4; the parameter is kept for the interface.
const std::vector<Diagram>& enumerate_connected(int order, Parity m_parity = Parity::Even);

GradingReport grading(const Diagram& d);

/// Order of the automorphism group of the diagram (vertex-kind preserving
/// permutations fixing both directed edge lists).
long long symmetry_factor(const Diagram& d);

/// Evaluates the top-degree coefficient of the wedge of all edge propagator
/// forms in the fixed tangent-frame order, divided by the symmetry factor.
/// Throws std::invalid_argument if the edge degrees do not sum to the
/// configuration dimension.
std::function<double(const ConfigurationPoint&)> compile_integrand(const Diagram& d, int m,
                                                                   const LongKnot* knot);

/// One wedge factor of a printed integrand: a signed sum of directed
/// propagator edges (plain edges have a single part).
struct WedgeFactorSpec {
    bool is_theta = false;
    struct Part {
        int i, j;  // 1-based
        double sign;
    };
    std::vector<Part> parts;

    static WedgeFactorSpec theta(int i, int j) { return {true, {{i, j, 1.0}}}; }
    static WedgeFactorSpec eta(int i, int j) { return {false, {{i, j, 1.0}}}; }
};

/// One term of a printed invariant: configuration space, ordered wedge
/// factors and the printed signed coefficient.
struct TermSpec {
    std::string label;
    int s = 0, t = 0;
    std::vector<WedgeFactorSpec> factors;
    double coefficient = 1.0;
};

enum class Theta2Form { Printed, Compact };
enum class Theta3Form { Printed, EvenCompact };

const std::vector<TermSpec>& theta1_terms();
const std::vector<TermSpec>& theta2_terms(Theta2Form form);
const std::vector<TermSpec>& theta3_terms(Theta3Form form);

/// Integrand of a single term (coefficient included).
std::function<double(const ConfigurationPoint&)> compile_term(const TermSpec& term, int m,
                                                              const LongKnot* knot);

/// Term value together with its cancellation envelope (the sum of absolute
/// products feeding the top coefficient), which is the scale roundoff in
/// the value is measured against.
struct TermValue {
    double value;
    double envelope;
};
TermValue eval_term_with_envelope(const TermSpec& term, int m, const LongKnot* knot,
                                  const ConfigurationPoint& cfg);

/// Edge-degree bookkeeping: sum of propagator degrees vs configuration
/// dimension for the term at ambient dimension m.
struct DegreeAudit {
    std::string label;
    int s, t;
    int edge_degree_sum;
    int config_dim;
    bool ok() const { return edge_degree_sum == config_dim; }
};
std::vector<DegreeAudit> degree_audit(const std::vector<TermSpec>& terms, int m);

}  // namespace knotmc
