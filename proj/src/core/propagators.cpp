#include "core/propagators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace knotmc {

EvalContext::EvalContext(const ConfigurationPoint& cfg, const LongKnot* knot)
    : cfg_(&cfg), knot_(knot), frame_(TangentFrame::of(cfg)) {
    images_.resize(static_cast<size_t>(cfg.s));
    jacs_.resize(static_cast<size_t>(cfg.s));
    have_.assign(static_cast<size_t>(cfg.s), 0);
}

void EvalContext::ensure(int i) const {
    if (have_[static_cast<size_t>(i)]) return;
    if (knot_ == nullptr) throw std::invalid_argument("EvalContext: knot required for on-knot images");
    images_[static_cast<size_t>(i)] = knot_->eval(cfg_->x(i));
    jacs_[static_cast<size_t>(i)] = knot_->jacobian(cfg_->x(i));
    have_[static_cast<size_t>(i)] = 1;
}

std::span<const double> EvalContext::image(int i) const {
    ensure(i);
    return images_[static_cast<size_t>(i)];
}

const Mat& EvalContext::jac(int i) const {
    ensure(i);
    return jacs_[static_cast<size_t>(i)];
}

namespace {

// Pullback of the normalized volume form of S^{n-1} through a Gauss map
// u = (q - p)/r whose raw differential columns are given per block. Because
// the projector (I - u u^T)/r enters every slot, the coefficient on a column
// subset reduces to det(u, raw columns) / (r^{n-1} Vol(S^{n-1})).
struct GaussBlock {
    int first_col;   // global frame column of the block start
    int count;       // number of columns
    const double* cols;  // n x count, column-major
    double sign;     // -1 for the source point, +1 for the target
};

AltForm gauss_pullback(std::span<const double> u, double r, std::span<const GaussBlock> blocks, int frame_dim) {
    const int n = static_cast<int>(u.size());
    const int degree = n - 1;
    AltForm out(frame_dim, degree);

    int total_cols = 0;
    for (const auto& b : blocks) total_cols += b.count;
    if (total_cols < degree) {
        out.finish();
        return out;
    }

    // flatten columns with their global indexes, ascending: the coefficient
    // on a subset is the determinant with columns in increasing index order
    std::vector<const double*> col(static_cast<size_t>(total_cols));
    std::vector<double> colsign(static_cast<size_t>(total_cols));
    std::vector<int> global(static_cast<size_t>(total_cols));
    int idx = 0;
    for (const auto& b : blocks) {
        for (int k = 0; k < b.count; ++k) {
            col[static_cast<size_t>(idx)] = b.cols + static_cast<size_t>(k) * n;
            colsign[static_cast<size_t>(idx)] = b.sign;
            global[static_cast<size_t>(idx)] = b.first_col + k;
            ++idx;
        }
    }
    {
        std::vector<int> order(static_cast<size_t>(total_cols));
        for (int k = 0; k < total_cols; ++k) order[static_cast<size_t>(k)] = k;
        std::sort(order.begin(), order.end(), [&](int a, int b2) { return global[static_cast<size_t>(a)] < global[static_cast<size_t>(b2)]; });
        std::vector<const double*> c2(col.size());
        std::vector<double> s2(colsign.size());
        std::vector<int> g2(global.size());
        for (int k = 0; k < total_cols; ++k) {
            c2[static_cast<size_t>(k)] = col[static_cast<size_t>(order[static_cast<size_t>(k)])];
            s2[static_cast<size_t>(k)] = colsign[static_cast<size_t>(order[static_cast<size_t>(k)])];
            g2[static_cast<size_t>(k)] = global[static_cast<size_t>(order[static_cast<size_t>(k)])];
        }
        col.swap(c2);
        colsign.swap(s2);
        global.swap(g2);
    }

    const double scale = 1.0 / (std::pow(r, degree) * sphere_area(n));
    std::vector<const double*> pick(static_cast<size_t>(n));
    pick[0] = u.data();
    std::vector<int> sel(static_cast<size_t>(degree));
    // iterate over degree-subsets of the flattened columns
    for (int k = 0; k < degree; ++k) sel[static_cast<size_t>(k)] = k;
    for (;;) {
        double s = scale;
        uint32_t mask = 0;
        for (int k = 0; k < degree; ++k) {
            int c = sel[static_cast<size_t>(k)];
            pick[static_cast<size_t>(k) + 1] = col[static_cast<size_t>(c)];
            s *= colsign[static_cast<size_t>(c)];
            mask |= 1u << global[static_cast<size_t>(c)];
        }
        double d = det_cols(n, pick.data());
        if (d != 0.0) out.set(mask, s * d);
        // next combination
        int k = degree - 1;
        while (k >= 0 && sel[static_cast<size_t>(k)] == total_cols - degree + k) --k;
        if (k < 0) break;
        ++sel[static_cast<size_t>(k)];
        for (int j = k + 1; j < degree; ++j) sel[static_cast<size_t>(j)] = sel[static_cast<size_t>(j - 1)] + 1;
    }
    out.finish();
    return out;
}

}  // namespace

AltForm eta_at(const EvalContext& ctx, int i, int j) {
    const auto& cfg = ctx.cfg();
    const auto& fr = ctx.frame();
    const int n = cfg.m - 2;
    if (i == j) throw std::invalid_argument("eta_at: tadpole edge (i == j)");
    if (i < 1 || j < 1 || i > cfg.s || j > cfg.s) throw std::invalid_argument("eta_at: on-knot index out of range");
    auto xi = cfg.x(i - 1);
    auto xj = cfg.x(j - 1);
    double r = dist(xi, xj);
    if (r < 1e-15) throw std::invalid_argument("eta_at: coincident points");
    std::vector<double> u(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) u[static_cast<size_t>(k)] = (xj[k] - xi[k]) / r;

    // raw differential of (x_j - x_i): -I on block i, +I on block j
    std::vector<double> id(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) id[static_cast<size_t>(k) * n + k] = 1.0;
    GaussBlock blocks[2] = {
        {fr.onknot_col(i - 1), n, id.data(), -1.0},
        {fr.onknot_col(j - 1), n, id.data(), +1.0},
    };
    return gauss_pullback(u, r, blocks, fr.dim());
}

AltForm eta_at(const ConfigurationPoint& cfg, int i, int j) {
    EvalContext ctx(cfg, nullptr);
    return eta_at(ctx, i, j);
}

AltForm theta_at(const EvalContext& ctx, int i, int j) {
    const auto& cfg = ctx.cfg();
    const auto& fr = ctx.frame();
    const int m = cfg.m;
    const int n = m - 2;
    const int total = cfg.s + cfg.t;
    if (i == j) throw std::invalid_argument("theta_at: tadpole edge (i == j)");
    if (i < 1 || j < 1 || i > total || j > total) throw std::invalid_argument("theta_at: index out of range");

    auto endpoint = [&](int k) -> std::span<const double> {
        if (k <= cfg.s) return ctx.image(k - 1);
        return cfg.y(k - cfg.s - 1);
    };
    auto p = endpoint(i);
    auto q = endpoint(j);
    double r = dist(p, q);
    if (r < 1e-15) throw std::invalid_argument("theta_at: coincident image points");
    std::vector<double> u(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) u[static_cast<size_t>(k)] = (q[k] - p[k]) / r;

    std::vector<double> idm(static_cast<size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) idm[static_cast<size_t>(k) * m + k] = 1.0;

    auto block_for = [&](int k, double sign) -> GaussBlock {
        if (k <= cfg.s) {
            const Mat& J = ctx.jac(k - 1);
            return {fr.onknot_col(k - 1), n, J.a.data(), sign};
        }
        return {fr.ambient_col(k - cfg.s - 1), m, idm.data(), sign};
    };
    GaussBlock blocks[2] = {block_for(i, -1.0), block_for(j, +1.0)};
    return gauss_pullback(u, r, blocks, fr.dim());
}

AltForm theta_at(const ConfigurationPoint& cfg, const LongKnot& knot, int i, int j) {
    EvalContext ctx(cfg, &knot);
    return theta_at(ctx, i, j);
}

}  // namespace knotmc
