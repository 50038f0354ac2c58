#include "core/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace knotmc {

namespace {

// bump profile in the squared radial variable: chi(s) = exp(1 - 1/(1-s)) on
// [0,1), 0 beyond; smooth on all of R, chi(0) = 1
inline double chi(double s) {
    if (s >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s));
}

inline double chi_prime(double s) {
    if (s >= 1.0) return 0.0;
    double inv = 1.0 / (1.0 - s);
    return -chi(s) * inv * inv;
}

inline double chi_second(double s) {
    if (s >= 1.0) return 0.0;
    double inv = 1.0 / (1.0 - s);
    return chi(s) * (inv * inv * inv * inv - 2.0 * inv * inv * inv);
}

inline double poly_eval(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (size_t i = c.size(); i-- > 0;) v = v * s + c[i];
    return v;
}

inline double poly_deriv(const std::vector<double>& c, double s) {
    double v = 0.0;
    for (size_t i = c.size(); i-- > 1;) v = v * s + c[i] * static_cast<double>(i);
    return v;
}

void check_m(int m) {
    if (m < 4) throw std::invalid_argument("LongKnot: ambient dimension must be >= 4");
    if (m > 16) throw std::invalid_argument("LongKnot: ambient dimension too large");
}

}  // namespace

LongKnot LongKnot::flat(int m) {
    check_m(m);
    LongKnot k;
    k.m_ = m;
    k.family_ = Family::Flat;
    return k;
}

LongKnot LongKnot::bump(int m, std::vector<double> center, double radius, std::vector<double> displacement) {
    check_m(m);
    if (static_cast<int>(center.size()) != m - 2) throw std::invalid_argument("LongKnot::bump: center size != m-2");
    if (static_cast<int>(displacement.size()) != m) throw std::invalid_argument("LongKnot::bump: displacement size != m");
    if (!(radius > 0.0)) throw std::invalid_argument("LongKnot::bump: radius must be positive");
    LongKnot k;
    k.m_ = m;
    k.family_ = Family::Bump;
    k.center_ = std::move(center);
    k.radius_ = radius;
    k.displacement_ = std::move(displacement);
    return k;
}

LongKnot LongKnot::spun(int m, double amplitude, double radius, std::vector<double> pcoef,
                        std::vector<double> qcoef, std::vector<double> hcoef) {
    check_m(m);
    if (!(radius > 0.0)) throw std::invalid_argument("LongKnot::spun: radius must be positive");
    LongKnot k;
    k.m_ = m;
    k.family_ = Family::Spun;
    k.amplitude_ = amplitude;
    k.radius_ = radius;
    k.pcoef_ = std::move(pcoef);
    k.qcoef_ = std::move(qcoef);
    k.hcoef_ = std::move(hcoef);
    if (k.pcoef_.empty()) k.pcoef_ = {1.0};
    if (k.qcoef_.empty()) k.qcoef_ = {0.0, 1.0};
    if (k.hcoef_.empty()) k.hcoef_ = {0.0};
    return k;
}

double LongKnot::support_radius() const {
    switch (family_) {
        case Family::Flat:
            return 0.0;
        case Family::Bump:
            return norm(center_) + radius_;
        case Family::Spun:
            return radius_;
    }
    return 0.0;
}

double LongKnot::feature_scale() const {
    double s = support_radius();
    if (family_ == Family::Bump) s += norm(displacement_);
    return std::max(1.0, s);
}

void LongKnot::eval(std::span<const double> x, std::span<double> out) const {
    const int n = m_ - 2;
    if (static_cast<int>(x.size()) != n || static_cast<int>(out.size()) != m_)
        throw std::invalid_argument("LongKnot::eval: size mismatch");
    for (int i = 0; i < n; ++i) out[i] = x[i];
    out[n] = 0.0;
    out[n + 1] = 0.0;
    switch (family_) {
        case Family::Flat:
            break;
        case Family::Bump: {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - center_[i];
                s += d * d;
            }
            s /= radius_ * radius_;
            double c = chi(s);
            if (c != 0.0)
                for (int j = 0; j < m_; ++j) out[j] += c * displacement_[j];
            break;
        }
        case Family::Spun: {
            double s = dot(x, x) / (radius_ * radius_);
            double w = chi(s);
            if (w != 0.0) {
                double hfac = amplitude_ * w * poly_eval(hcoef_, s);
                for (int i = 0; i < n; ++i) out[i] += hfac * x[i];
                out[n] += amplitude_ * w * poly_eval(pcoef_, s);
                out[n + 1] += amplitude_ * w * poly_eval(qcoef_, s);
            }
            break;
        }
    }
}

std::vector<double> LongKnot::eval(std::span<const double> x) const {
    std::vector<double> out(static_cast<size_t>(m_));
    eval(x, out);
    return out;
}

void LongKnot::jacobian(std::span<const double> x, Mat& J) const {
    const int n = m_ - 2;
    if (static_cast<int>(x.size()) != n) throw std::invalid_argument("LongKnot::jacobian: size mismatch");
    if (J.rows != m_ || J.cols != n) J = Mat(m_, n);
    std::fill(J.a.begin(), J.a.end(), 0.0);
    for (int i = 0; i < n; ++i) J(i, i) = 1.0;
    switch (family_) {
        case Family::Flat:
            break;
        case Family::Bump: {
            double r2 = radius_ * radius_;
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - center_[i];
                s += d * d;
            }
            s /= r2;
            double cp = chi_prime(s);
            if (cp != 0.0) {
                for (int i = 0; i < n; ++i) {
                    double g = cp * 2.0 * (x[i] - center_[i]) / r2;
                    for (int j = 0; j < m_; ++j) J(j, i) += displacement_[j] * g;
                }
            }
            break;
        }
        case Family::Spun: {
            double r2 = radius_ * radius_;
            double s = dot(x, x) / r2;
            double w = chi(s), wp = chi_prime(s);
            if (w == 0.0 && wp == 0.0) break;
            double h = poly_eval(hcoef_, s), hp = poly_deriv(hcoef_, s);
            double p = poly_eval(pcoef_, s), pp = poly_deriv(pcoef_, s);
            double q = poly_eval(qcoef_, s), qp = poly_deriv(qcoef_, s);
            double H = amplitude_ * w * h;
            double Hp = amplitude_ * (wp * h + w * hp);
            double Pp = amplitude_ * (wp * p + w * pp);
            double Qp = amplitude_ * (wp * q + w * qp);
            for (int i = 0; i < n; ++i) {
                double ds = 2.0 * x[i] / r2;
                for (int j = 0; j < n; ++j) J(j, i) += Hp * ds * x[j];
                J(i, i) += H;
                J(n, i) += Pp * ds;
                J(n + 1, i) += Qp * ds;
            }
            break;
        }
    }
}

Mat LongKnot::jacobian(std::span<const double> x) const {
    Mat J(m_, m_ - 2);
    jacobian(x, J);
    return J;
}

void LongKnot::validate_embedding() const {
    const int n = m_ - 2;
    const double R = support_radius() + 1.0;
    int per_dim = (n <= 2) ? 15 : (n == 3 ? 9 : 5);
    std::vector<std::vector<double>> pts;
    std::vector<std::vector<double>> imgs;
    std::vector<int> idx(static_cast<size_t>(n), 0);
    for (;;) {
        std::vector<double> x(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = -R + 2.0 * R * idx[static_cast<size_t>(i)] / (per_dim - 1);
        imgs.push_back(eval(x));
        // rank check via Gram determinant
        Mat J = jacobian(x);
        Mat G(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double s = 0.0;
                for (int r = 0; r < m_; ++r) s += J(r, a) * J(r, b);
                G(a, b) = s;
            }
        if (det_colmajor(n, G.a.data()) < 1e-12) {
            std::ostringstream os;
            os << "LongKnot::validate_embedding: rank-deficient jacobian at grid point";
            throw std::domain_error(os.str());
        }
        pts.push_back(std::move(x));
        int d = 0;
        while (d < n && ++idx[static_cast<size_t>(d)] == per_dim) idx[static_cast<size_t>(d++)] = 0;
        if (d == n) break;
    }
    const double scale = feature_scale();
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = i + 1; j < pts.size(); ++j) {
            double dd = dist(pts[i], pts[j]);
            double di = dist(imgs[i], imgs[j]);
            if (di < scale / 100.0 && dd > scale / 20.0)
                throw std::domain_error("LongKnot::validate_embedding: distant grid points map close together");
        }
    }
}

std::string LongKnot::describe() const {
    std::ostringstream os;
    switch (family_) {
        case Family::Flat:
            os << "flat(m=" << m_ << ")";
            break;
        case Family::Bump:
            os << "bump(m=" << m_ << ",r=" << radius_ << ")";
            break;
        case Family::Spun:
            os << "spun(m=" << m_ << ",A=" << amplitude_ << ",R=" << radius_ << ")";
            break;
    }
    return os.str();
}

LoopCurve LoopCurve::meridian(int m, std::vector<double> center_domain, double radius, int orientation) {
    check_m(m);
    if (static_cast<int>(center_domain.size()) != m - 2)
        throw std::invalid_argument("LoopCurve::meridian: center size != m-2");
    if (!(radius > 0.0)) throw std::invalid_argument("LoopCurve::meridian: radius must be positive");
    LoopCurve c;
    c.m_ = m;
    c.kind_ = Kind::Meridian;
    c.orientation_ = orientation >= 0 ? 1 : -1;
    c.center_.assign(static_cast<size_t>(m), 0.0);
    for (int i = 0; i < m - 2; ++i) c.center_[static_cast<size_t>(i)] = center_domain[static_cast<size_t>(i)];
    c.radius_ = radius;
    c.axis1_ = m - 2;
    c.axis2_ = m - 1;
    return c;
}

LoopCurve LoopCurve::offset_circle(int m, std::vector<double> center, double radius, int axis1, int axis2,
                                   int orientation) {
    check_m(m);
    if (static_cast<int>(center.size()) != m) throw std::invalid_argument("LoopCurve::offset_circle: center size != m");
    if (axis1 == axis2 || axis1 < 0 || axis2 < 0 || axis1 >= m || axis2 >= m)
        throw std::invalid_argument("LoopCurve::offset_circle: bad axes");
    if (!(radius > 0.0)) throw std::invalid_argument("LoopCurve::offset_circle: radius must be positive");
    LoopCurve c;
    c.m_ = m;
    c.kind_ = Kind::OffsetCircle;
    c.orientation_ = orientation >= 0 ? 1 : -1;
    c.center_ = std::move(center);
    c.radius_ = radius;
    c.axis1_ = axis1;
    c.axis2_ = axis2;
    return c;
}

LoopCurve LoopCurve::polyline(int m, std::vector<std::vector<double>> points, int orientation) {
    check_m(m);
    if (points.size() < 4) throw std::invalid_argument("LoopCurve::polyline: need at least 4 points");
    for (const auto& p : points)
        if (static_cast<int>(p.size()) != m) throw std::invalid_argument("LoopCurve::polyline: point size != m");
    LoopCurve c;
    c.m_ = m;
    c.kind_ = Kind::PolylineSmoothed;
    c.orientation_ = orientation >= 0 ? 1 : -1;
    c.points_ = std::move(points);
    return c;
}

LoopCurve LoopCurve::reversed() const {
    LoopCurve c = *this;
    c.orientation_ = -orientation_;
    return c;
}

void LoopCurve::eval(double s, std::span<double> pos, std::span<double> deriv) const {
    if (static_cast<int>(pos.size()) != m_ || static_cast<int>(deriv.size()) != m_)
        throw std::invalid_argument("LoopCurve::eval: size mismatch");
    s -= std::floor(s);
    const double two_pi = 2.0 * std::numbers::pi;
    switch (kind_) {
        case Kind::Meridian:
        case Kind::OffsetCircle: {
            double a = two_pi * s;
            for (int i = 0; i < m_; ++i) {
                pos[i] = center_[static_cast<size_t>(i)];
                deriv[i] = 0.0;
            }
            pos[axis1_] += radius_ * std::cos(a);
            pos[axis2_] += radius_ * std::sin(a);
            deriv[axis1_] = -orientation_ * two_pi * radius_ * std::sin(a);
            deriv[axis2_] = orientation_ * two_pi * radius_ * std::cos(a);
            break;
        }
        case Kind::PolylineSmoothed: {
            const size_t K = points_.size();
            double u = s * static_cast<double>(K);
            size_t seg = static_cast<size_t>(u);
            if (seg >= K) seg = K - 1;
            double t = u - static_cast<double>(seg);
            const auto& p0 = points_[(seg + K - 1) % K];
            const auto& p1 = points_[seg];
            const auto& p2 = points_[(seg + 1) % K];
            const auto& p3 = points_[(seg + 2) % K];
            double t2 = t * t, t3 = t2 * t;
            // Catmull-Rom basis
            double b0 = -0.5 * t3 + t2 - 0.5 * t;
            double b1 = 1.5 * t3 - 2.5 * t2 + 1.0;
            double b2 = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
            double b3 = 0.5 * t3 - 0.5 * t2;
            double d0 = -1.5 * t2 + 2.0 * t - 0.5;
            double d1 = 4.5 * t2 - 5.0 * t;
            double d2 = -4.5 * t2 + 4.0 * t + 0.5;
            double d3 = 1.5 * t2 - t;
            for (int i = 0; i < m_; ++i) {
                size_t ii = static_cast<size_t>(i);
                pos[i] = b0 * p0[ii] + b1 * p1[ii] + b2 * p2[ii] + b3 * p3[ii];
                deriv[i] = orientation_ * static_cast<double>(K) *
                           (d0 * p0[ii] + d1 * p1[ii] + d2 * p2[ii] + d3 * p3[ii]);
            }
            break;
        }
    }
}

std::string LoopCurve::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::Meridian:
            os << "meridian(r=" << radius_ << ")";
            break;
        case Kind::OffsetCircle:
            os << "offset-circle(r=" << radius_ << ")";
            break;
        case Kind::PolylineSmoothed:
            os << "polyline(" << points_.size() << " pts)";
            break;
    }
    if (orientation_ < 0) os << " reversed";
    return os.str();
}

IsotopyPath::IsotopyPath(Kind kind, LongKnot base, std::vector<double> offset)
    : kind_(kind), base_(std::move(base)), offset_(std::move(offset)) {
    switch (kind_) {
        case Kind::BumpDisplacement:
            if (base_.family() != LongKnot::Family::Bump)
                throw std::invalid_argument("IsotopyPath: bump-displacement path needs a bump base");
            break;
        case Kind::BumpCenterShift:
            if (base_.family() != LongKnot::Family::Bump)
                throw std::invalid_argument("IsotopyPath: bump-center path needs a bump base");
            if (static_cast<int>(offset_.size()) != base_.m() - 2)
                throw std::invalid_argument("IsotopyPath: center offset size != m-2");
            break;
        case Kind::SpunAmplitude:
            if (base_.family() != LongKnot::Family::Spun)
                throw std::invalid_argument("IsotopyPath: spun-amplitude path needs a spun base");
            break;
    }
}

LongKnot IsotopyPath::knot_at(double t) const {
    switch (kind_) {
        case Kind::BumpDisplacement: {
            std::vector<double> v = base_.displacement();
            for (double& c : v) c *= t;
            return LongKnot::bump(base_.m(), base_.center(), base_.radius(), std::move(v));
        }
        case Kind::BumpCenterShift: {
            std::vector<double> c = base_.center();
            for (size_t i = 0; i < c.size(); ++i) c[i] += t * offset_[i];
            return LongKnot::bump(base_.m(), std::move(c), base_.radius(), base_.displacement());
        }
        case Kind::SpunAmplitude:
            return LongKnot::spun(base_.m(), t * base_.amplitude(), base_.radius(), base_.pcoef(),
                                  base_.qcoef(), base_.hcoef());
    }
    throw std::logic_error("IsotopyPath::knot_at");
}

std::vector<double> IsotopyPath::deformation(double t, std::span<const double> x) const {
    const int n = base_.m() - 2;
    std::vector<double> out(static_cast<size_t>(base_.m()), 0.0);
    switch (kind_) {
        case Kind::BumpDisplacement: {
            double r2 = base_.radius() * base_.radius();
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - base_.center()[static_cast<size_t>(i)];
                s += d * d;
            }
            double c = chi(s / r2);
            for (int j = 0; j < base_.m(); ++j) out[static_cast<size_t>(j)] = c * base_.displacement()[static_cast<size_t>(j)];
            return out;
        }
        case Kind::BumpCenterShift: {
            double r2 = base_.radius() * base_.radius();
            double s = 0.0, sdot = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - base_.center()[static_cast<size_t>(i)] - t * offset_[static_cast<size_t>(i)];
                s += d * d;
                sdot += -2.0 * d * offset_[static_cast<size_t>(i)];
            }
            double f = chi_prime(s / r2) * sdot / r2;
            for (int j = 0; j < base_.m(); ++j) out[static_cast<size_t>(j)] = f * base_.displacement()[static_cast<size_t>(j)];
            return out;
        }
        case Kind::SpunAmplitude: {
            double r2 = base_.radius() * base_.radius();
            double s = dot(x, x) / r2;
            double w = chi(s);
            if (w == 0.0) return out;
            double A = base_.amplitude();
            double hf = A * w * poly_eval(base_.hcoef(), s);
            for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = hf * x[i];
            out[static_cast<size_t>(n)] = A * w * poly_eval(base_.pcoef(), s);
            out[static_cast<size_t>(n + 1)] = A * w * poly_eval(base_.qcoef(), s);
            return out;
        }
    }
    throw std::logic_error("IsotopyPath::deformation");
}

std::vector<double> IsotopyPath::deformation_jacobian_times(double t, std::span<const double> x,
                                                            std::span<const double> v) const {
    const int n = base_.m() - 2;
    std::vector<double> out(static_cast<size_t>(base_.m()), 0.0);
    switch (kind_) {
        case Kind::BumpDisplacement: {
            double r2 = base_.radius() * base_.radius();
            double s = 0.0, sv = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - base_.center()[static_cast<size_t>(i)];
                s += d * d;
                sv += 2.0 * d * v[i];
            }
            double f = chi_prime(s / r2) * sv / r2;
            for (int j = 0; j < base_.m(); ++j) out[static_cast<size_t>(j)] = f * base_.displacement()[static_cast<size_t>(j)];
            return out;
        }
        case Kind::BumpCenterShift: {
            double r2 = base_.radius() * base_.radius();
            double s = 0.0, sdot = 0.0, sv = 0.0, dv = 0.0;
            for (int i = 0; i < n; ++i) {
                double d = x[i] - base_.center()[static_cast<size_t>(i)] - t * offset_[static_cast<size_t>(i)];
                s += d * d;
                sdot += -2.0 * d * offset_[static_cast<size_t>(i)];
                sv += 2.0 * d * v[i];
                dv += -2.0 * offset_[static_cast<size_t>(i)] * v[i];
            }
            double f = chi_second(s / r2) * (sv / r2) * (sdot / r2) + chi_prime(s / r2) * dv / r2;
            for (int j = 0; j < base_.m(); ++j) out[static_cast<size_t>(j)] = f * base_.displacement()[static_cast<size_t>(j)];
            return out;
        }
        case Kind::SpunAmplitude: {
            double r2 = base_.radius() * base_.radius();
            double s = dot(x, x) / r2;
            double sv = 2.0 * dot(x, v) / r2;
            double w = chi(s), wp = chi_prime(s);
            double A = base_.amplitude();
            double h = poly_eval(base_.hcoef(), s), hp = poly_deriv(base_.hcoef(), s);
            double p = poly_eval(base_.pcoef(), s), pp = poly_deriv(base_.pcoef(), s);
            double q = poly_eval(base_.qcoef(), s), qp = poly_deriv(base_.qcoef(), s);
            double whp = wp * h + w * hp;
            for (int i = 0; i < n; ++i)
                out[static_cast<size_t>(i)] = A * (whp * sv * x[i] + w * h * v[i]);
            out[static_cast<size_t>(n)] = A * (wp * p + w * pp) * sv;
            out[static_cast<size_t>(n + 1)] = A * (wp * q + w * qp) * sv;
            return out;
        }
    }
    throw std::logic_error("IsotopyPath::deformation_jacobian_times");
}

std::string IsotopyPath::describe() const {
    switch (kind_) {
        case Kind::BumpDisplacement:
            return "bump-displacement";
        case Kind::BumpCenterShift:
            return "bump-center-shift";
        case Kind::SpunAmplitude:
            return "spun-amplitude";
    }
    return "?";
}

}  // namespace knotmc
