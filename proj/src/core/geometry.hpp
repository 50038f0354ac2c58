#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace knotmc {

/// Long (m-2)-knot: an embedding R^{m-2} -> R^m from a built-in family that
/// agrees with the linear inclusion sigma(x) = (x, 0, 0) outside a compact
/// set. Descriptors are immutable; evaluation is pure.
class LongKnot {
  public:
    enum class Family { Flat, Bump, Spun };

    static LongKnot flat(int m);
    /// sigma(x) + chi(|x-c|^2/r^2) * v with the standard bump profile
    /// chi(s) = exp(1 - 1/(1-s)) on [0,1), 0 beyond; chi(0) = 1.
    static LongKnot bump(int m, std::vector<double> center, double radius, std::vector<double> displacement);
    /// Rotational family: f(x) = (H(s) x, P(s), Q(s)) with s = |x|^2 / R^2,
    /// H = 1 + A w(s) h(s), P = A w(s) p(s), Q = A w(s) q(s), w the bump
    /// profile and p, q, h polynomials. Amplitude 0 gives the flat knot.
    static LongKnot spun(int m, double amplitude, double radius, std::vector<double> pcoef,
                         std::vector<double> qcoef, std::vector<double> hcoef);

    int m() const { return m_; }
    int domain_dim() const { return m_ - 2; }
    Family family() const { return family_; }
    /// radius beyond which f == sigma exactly
    double support_radius() const;
    /// rough size of the region where the knot differs from sigma, used to
    /// scale samplers
    double feature_scale() const;

    void eval(std::span<const double> x, std::span<double> out) const;
    std::vector<double> eval(std::span<const double> x) const;

    /// m x (m-2) matrix of partials, analytic per family.
    void jacobian(std::span<const double> x, Mat& J) const;
    Mat jacobian(std::span<const double> x) const;

    /// Statistical injectivity / rank diagnostic on a grid; throws
    /// std::domain_error with a description on failure.
    void validate_embedding() const;

    std::string describe() const;

    // descriptor access (used by the C API and result records)
    const std::vector<double>& center() const { return center_; }
    double radius() const { return radius_; }
    const std::vector<double>& displacement() const { return displacement_; }
    double amplitude() const { return amplitude_; }
    const std::vector<double>& pcoef() const { return pcoef_; }
    const std::vector<double>& qcoef() const { return qcoef_; }
    const std::vector<double>& hcoef() const { return hcoef_; }

  private:
    LongKnot() = default;

    int m_ = 4;
    Family family_ = Family::Flat;
    // bump
    std::vector<double> center_;
    double radius_ = 1.0;
    std::vector<double> displacement_;
    // spun
    double amplitude_ = 0.0;
    std::vector<double> pcoef_, qcoef_, hcoef_;
};

/// Closed regular loop in R^m with an orientation sign. Reversing the
/// orientation flips the reported derivative without reparametrizing, so a
/// reversed loop integrates to exactly minus the original with equal samples.
class LoopCurve {
  public:
    enum class Kind { Meridian, OffsetCircle, PolylineSmoothed };

    /// circle of the given radius in the (m-1, m) coordinate plane centered
    /// at sigma(center_domain)
    static LoopCurve meridian(int m, std::vector<double> center_domain, double radius, int orientation = 1);
    /// circle centered at an arbitrary ambient point, spanning the plane of
    /// coordinate axes (axis1, axis2), zero-based
    static LoopCurve offset_circle(int m, std::vector<double> center, double radius, int axis1, int axis2,
                                   int orientation = 1);
    /// closed Catmull-Rom spline through the given ambient points
    static LoopCurve polyline(int m, std::vector<std::vector<double>> points, int orientation = 1);

    int m() const { return m_; }
    Kind kind() const { return kind_; }
    int orientation() const { return orientation_; }
    LoopCurve reversed() const;

    /// position and derivative at parameter s in [0,1]
    void eval(double s, std::span<double> pos, std::span<double> deriv) const;

    double circle_radius() const { return radius_; }
    std::string describe() const;

  private:
    LoopCurve() = default;

    int m_ = 4;
    Kind kind_ = Kind::Meridian;
    int orientation_ = 1;
    std::vector<double> center_;  // ambient center for circles
    double radius_ = 1.0;
    int axis1_ = 0, axis2_ = 1;
    std::vector<std::vector<double>> points_;
};

/// One-parameter family of long knots obtained by scaling one designated
/// parameter of a base descriptor by t in [0,1].
class IsotopyPath {
  public:
    enum class Kind {
        BumpDisplacement,  // scales the bump displacement vector; t=0 is flat
        BumpCenterShift,   // translates the bump center by t * offset
        SpunAmplitude      // scales the spun amplitude; t=0 is flat
    };

    IsotopyPath(Kind kind, LongKnot base, std::vector<double> offset = {});

    Kind kind() const { return kind_; }
    int m() const { return base_.m(); }
    LongKnot knot_at(double t) const;

    /// deformation field df_t/dt at x (independent of t for these families
    /// except the center shift, which is evaluated at the given t)
    std::vector<double> deformation(double t, std::span<const double> x) const;
    /// x-derivative of the deformation field applied to a domain vector v
    std::vector<double> deformation_jacobian_times(double t, std::span<const double> x,
                                                   std::span<const double> v) const;

    std::string describe() const;

  private:
    Kind kind_;
    LongKnot base_;
    std::vector<double> offset_;
};

}  // namespace knotmc
