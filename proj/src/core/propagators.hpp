#pragma once

#include <span>
#include <vector>

#include "core/configspace.hpp"
#include "core/exterior.hpp"
#include "core/geometry.hpp"

namespace knotmc {

/// Coordinate frame on the tangent space of C_{s,t}(f): the on-knot
/// parameters come first, in point order, each contributing m-2 coordinate
/// directions; then the ambient points, each contributing m. Every pullback
/// appearing in one integrand uses this frame, which fixes the fiber
/// orientation once and for all.
struct TangentFrame {
    int s, t, m;

    int dim() const { return s * (m - 2) + t * m; }
    int onknot_col(int i) const { return i * (m - 2); }          // first column of x_i, 0-based i
    int ambient_col(int j) const { return s * (m - 2) + j * m; }  // first column of y_j, 0-based j

    static TangentFrame of(const ConfigurationPoint& cfg) { return {cfg.s, cfg.t, cfg.m}; }
};

/// Cached knot images and jacobians for one configuration, shared by all
/// edges of an integrand.
class EvalContext {
  public:
    EvalContext(const ConfigurationPoint& cfg, const LongKnot* knot);

    const ConfigurationPoint& cfg() const { return *cfg_; }
    const LongKnot* knot() const { return knot_; }
    const TangentFrame& frame() const { return frame_; }

    std::span<const double> image(int i) const;   // f(x_i), 0-based on-knot index
    const Mat& jac(int i) const;                   // df(x_i)

  private:
    const ConfigurationPoint* cfg_;
    const LongKnot* knot_;
    TangentFrame frame_;
    mutable std::vector<std::vector<double>> images_;
    mutable std::vector<Mat> jacs_;
    mutable std::vector<char> have_;
    void ensure(int i) const;
};

/// Superpropagator eta between two on-knot points: the pullback of the
/// normalized SO(m-2)-invariant volume form of S^{m-3} via the Gauss map
/// (x_i, x_j) -> (x_j - x_i)/|x_j - x_i|, expressed in the configuration
/// frame. Degree m-3. Indices are 1-based and must differ (no tadpoles);
/// coincident points are rejected.
AltForm eta_at(const EvalContext& ctx, int i, int j);
AltForm eta_at(const ConfigurationPoint& cfg, int i, int j);

/// Superpropagator theta between any two of the s+t points: the pullback of
/// the normalized SO(m)-invariant volume form of S^{m-1} via the Gauss map of
/// the pair projection (on-knot indices map through the knot). Degree m-1.
AltForm theta_at(const EvalContext& ctx, int i, int j);
AltForm theta_at(const ConfigurationPoint& cfg, const LongKnot& knot, int i, int j);

}  // namespace knotmc
