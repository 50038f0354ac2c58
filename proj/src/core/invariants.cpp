#include "core/invariants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "core/exterior.hpp"
#include "core/propagators.hpp"
#include "core/rng.hpp"

namespace knotmc {

namespace {

// Fiber orientation of the lk integral over R^{m-2} x S^1, pinned so that
// the positively oriented unit meridian around the flat knot links +1.
constexpr double kLkOrientation = 1.0;
// Orientation of the boundary-formula probe frame (delta-f slot first, then
// the domain directions), pinned against the finite-difference side.
constexpr double kProbeOrientation = 1.0;

double loop_extent(const LoopCurve& loop) {
    std::vector<double> p(static_cast<size_t>(loop.m())), d(static_cast<size_t>(loop.m()));
    double ext = 0.0;
    for (int k = 0; k < 64; ++k) {
        loop.eval(k / 64.0, p, d);
        ext = std::max(ext, norm(p));
    }
    return ext;
}

}  // namespace

void InvariantResult::combine() {
    double v = 0.0, var = 0.0;
    long long n = 0;
    for (const auto& t : terms) {
        v += t.estimate.value;
        var += t.estimate.stderr_ * t.estimate.stderr_;
        n += t.estimate.n;
    }
    total.value = v;
    total.stderr_ = std::sqrt(var);
    total.n = n;
    total.seed = terms.empty() ? 0 : terms.front().estimate.seed;
    total.strategy = "sum";
}

ProposalSpec RunOptions::resolved_proposal(const LongKnot& knot) const {
    ProposalSpec spec = proposal;
    if (!(spec.scale > 0.0)) spec.scale = knot.feature_scale();
    spec.validate(knot.m());
    return spec;
}

// ---------------------------------------------------------------------------
// linking number

int linking_number_oracle_flat(const LoopCurve& loop) {
    const int m = loop.m();
    std::vector<double> p(static_cast<size_t>(m)), d(static_cast<size_t>(m));
    const int N = 4096;
    double angle = 0.0;
    double prev = 0.0;
    for (int k = 0; k <= N; ++k) {
        loop.eval(static_cast<double>(k) / N, p, d);
        double a = std::atan2(p[static_cast<size_t>(m - 1)], p[static_cast<size_t>(m - 2)]);
        if (k > 0) {
            double delta = a - prev;
            while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
            while (delta < -std::numbers::pi) delta += 2.0 * std::numbers::pi;
            angle += delta;
        }
        prev = a;
    }
    double w = angle / (2.0 * std::numbers::pi) * loop.orientation();
    return static_cast<int>(std::lround(w));
}

Estimate linking_number(const LongKnot& knot, const LoopCurve& loop, const RunOptions& opt) {
    const int m = knot.m();
    if (loop.m() != m) throw std::invalid_argument("linking_number: dimension mismatch");
    const int n = m - 2;

    // disjointness check on a grid
    {
        const double R = std::max(knot.support_radius(), loop_extent(loop)) + 1.0;
        const int G = (n <= 2) ? 33 : 9;
        std::vector<double> x(static_cast<size_t>(n)), img(static_cast<size_t>(m));
        std::vector<double> p(static_cast<size_t>(m)), dv(static_cast<size_t>(m));
        std::vector<std::vector<double>> loop_pts;
        for (int k = 0; k < 128; ++k) {
            loop.eval(k / 128.0, p, dv);
            loop_pts.push_back(p);
        }
        std::vector<int> idx(static_cast<size_t>(n), 0);
        for (;;) {
            for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = -R + 2.0 * R * idx[static_cast<size_t>(i)] / (G - 1);
            knot.eval(x, img);
            for (const auto& lp : loop_pts)
                if (dist(img, lp) < 1e-6)
                    throw std::invalid_argument("linking_number: knot and loop images are not disjoint");
            int d = 0;
            while (d < n && ++idx[static_cast<size_t>(d)] == G) idx[static_cast<size_t>(d++)] = 0;
            if (d == n) break;
        }
    }

    ProposalSpec spec = opt.proposal;
    double scale = spec.scale > 0.0 ? spec.scale : std::max({1.0, knot.feature_scale(), loop_extent(loop)});
    RadialLaw xlaw(n, spec.onknot_exponent(m), scale);

    const double vol = sphere_area(m);
    auto value = [&](uint64_t seed, uint64_t idx) -> double {
        SplitMix64 rng = substream(seed, idx);
        std::vector<double> dir(static_cast<size_t>(n));
        double r = xlaw.sample_radius(rng.next_unit());
        rng.next_direction(dir);
        std::vector<double> x(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) x[static_cast<size_t>(k)] = r * dir[static_cast<size_t>(k)];
        double sparam = rng.next_unit();
        double w = 1.0 / xlaw.density(r);

        std::vector<double> img(static_cast<size_t>(m)), gp(static_cast<size_t>(m)), gd(static_cast<size_t>(m));
        knot.eval(x, img);
        loop.eval(sparam, gp, gd);
        double rr = dist(img, gp);
        std::vector<double> u(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) u[static_cast<size_t>(k)] = (gp[static_cast<size_t>(k)] - img[static_cast<size_t>(k)]) / rr;

        Mat J = knot.jacobian(x);
        std::vector<const double*> cols(static_cast<size_t>(m));
        cols[0] = u.data();
        std::vector<std::vector<double>> neg(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(m)));
        for (int c = 0; c < n; ++c) {
            for (int rix = 0; rix < m; ++rix) neg[static_cast<size_t>(c)][static_cast<size_t>(rix)] = -J(rix, c);
            cols[static_cast<size_t>(c) + 1] = neg[static_cast<size_t>(c)].data();
        }
        cols[static_cast<size_t>(m - 1)] = gd.data();
        double det = det_cols(m, cols.data());
        return kLkOrientation * det / (std::pow(rr, m - 1) * vol) * w;
    };

    Estimate e = run_mc(opt.n, opt.seed, opt.workers, value);
    e.strategy = "lk-mc";
    return e;
}

// ---------------------------------------------------------------------------
// theta invariants

namespace {

InvariantResult run_terms(const std::string& name, const std::vector<TermSpec>& specs,
                          const LongKnot& knot, const RunOptions& opt, const std::string& form) {
    InvariantResult out;
    out.name = name;
    out.m = knot.m();
    out.knot = knot.describe();
    out.form = form;
    ProposalSpec spec = opt.resolved_proposal(knot);
    for (const auto& term : specs) {
        auto g = compile_term(term, knot.m(), &knot);
        Domain dom{term.s, term.t, knot.m(), &knot};
        TermResult tr;
        tr.label = term.label;
        tr.s = term.s;
        tr.t = term.t;
        tr.estimate = integrate(g, dom, spec, opt.n, opt.seed, opt.antithetic, opt.workers);
        out.terms.push_back(std::move(tr));
    }
    out.combine();
    return out;
}

}  // namespace

InvariantResult theta1(const LongKnot& knot, const RunOptions& opt) {
    InvariantResult r = run_terms("theta1", theta1_terms(), knot, opt, "printed");
    r.parity_vanishing = (knot.m() % 2 == 1);
    return r;
}

InvariantResult theta2(const LongKnot& knot, const RunOptions& opt, Theta2Form form) {
    InvariantResult r = run_terms("theta2", theta2_terms(form), knot, opt,
                                  form == Theta2Form::Printed ? "printed" : "compact");
    r.parity_vanishing = (knot.m() % 2 == 0);
    return r;
}

InvariantResult theta3(const LongKnot& knot, const RunOptions& opt, Theta3Form form) {
    InvariantResult r = run_terms("theta3", theta3_terms(form), knot, opt,
                                  form == Theta3Form::Printed ? "printed" : "even_compact");
    r.parity_vanishing = (knot.m() % 2 == 1);
    return r;
}

// ---------------------------------------------------------------------------
// boundary probe

ProbeResult dtheta1_probe(const IsotopyPath& path, double t, const RunOptions& opt, double fd_step) {
    const int m = path.m();
    const int n = m - 2;
    ProbeResult out;
    out.fd_step = fd_step;

    LongKnot kplus = path.knot_at(t + fd_step);
    LongKnot kminus = path.knot_at(t - fd_step);
    LongKnot kmid = path.knot_at(t);

    // lhs: same-sample central finite difference of theta1 along the path
    {
        const auto& term = theta1_terms().front();
        auto gplus = compile_term(term, m, &kplus);
        auto gminus = compile_term(term, m, &kminus);
        ProposalSpec spec = opt.resolved_proposal(kmid);
        ConfigSampler sampler(2, 0, m, nullptr, spec);
        auto value = [&](uint64_t seed, uint64_t idx) -> double {
            SampleResult s = sampler.sample(seed, idx);
            return (gplus(s.cfg) - gminus(s.cfg)) * s.weight / (2.0 * fd_step);
        };
        out.lhs = run_mc(opt.n, opt.seed, opt.workers, value);
        out.lhs.strategy = "theta1-fd";
    }

    // rhs: - p1_* (Phi^* w_{m-1} . p3^* w_{m-3}) contracted with df_t/dt,
    // sampled over R^{m-2} (heavy tail) x S^{m-3} (uniform, which absorbs
    // the normalized w_{m-3} factor)
    {
        ProposalSpec spec = opt.resolved_proposal(kmid);
        RadialLaw xlaw(n, spec.onknot_exponent(m), spec.scale);
        const double vol = sphere_area(m);
        const double hj = 1e-5;
        auto value = [&, t](uint64_t seed, uint64_t idx) -> double {
            SplitMix64 rng = substream(seed, idx ^ 0x5bd1e995u);
            std::vector<double> dir(static_cast<size_t>(n));
            double r = xlaw.sample_radius(rng.next_unit());
            rng.next_direction(dir);
            std::vector<double> x(static_cast<size_t>(n));
            for (int k = 0; k < n; ++k) x[static_cast<size_t>(k)] = r * dir[static_cast<size_t>(k)];
            double w = 1.0 / xlaw.density(r);
            std::vector<double> v(static_cast<size_t>(n));
            rng.next_direction(v);

            Mat J = kmid.jacobian(x);
            std::vector<double> F(static_cast<size_t>(m), 0.0);
            for (int c = 0; c < n; ++c)
                for (int rr = 0; rr < m; ++rr) F[static_cast<size_t>(rr)] += J(rr, c) * v[static_cast<size_t>(c)];
            double nf = norm(F);
            std::vector<double> u(static_cast<size_t>(m));
            for (int k = 0; k < m; ++k) u[static_cast<size_t>(k)] = F[static_cast<size_t>(k)] / nf;

            std::vector<std::vector<double>> cols;
            cols.push_back(path.deformation_jacobian_times(t, x, v));
            // d/dx_k [df(x) v] by central differences of the analytic jacobian
            for (int k = 0; k < n; ++k) {
                std::vector<double> xp(x), xm(x);
                xp[static_cast<size_t>(k)] += hj;
                xm[static_cast<size_t>(k)] -= hj;
                Mat Jp = kmid.jacobian(xp), Jm = kmid.jacobian(xm);
                std::vector<double> col(static_cast<size_t>(m), 0.0);
                for (int c = 0; c < n; ++c)
                    for (int rr = 0; rr < m; ++rr)
                        col[static_cast<size_t>(rr)] += (Jp(rr, c) - Jm(rr, c)) * v[static_cast<size_t>(c)] / (2.0 * hj);
                cols.push_back(std::move(col));
            }
            std::vector<const double*> ptrs(static_cast<size_t>(m));
            ptrs[0] = u.data();
            for (int k = 0; k < m - 1; ++k) ptrs[static_cast<size_t>(k) + 1] = cols[static_cast<size_t>(k)].data();
            double det = det_cols(m, ptrs.data());
            return -kProbeOrientation * det / (std::pow(nf, m - 1) * vol) * w;
        };
        out.rhs = run_mc(opt.n, opt.seed, opt.workers, value);
        out.rhs.strategy = "dtheta1-boundary";
    }
    return out;
}

// ---------------------------------------------------------------------------
// mixed expectation

double mixed_expectation(double lk_value, const std::vector<double>& xi_matrix, int dim, double hbar) {
    if (dim < 1) throw std::invalid_argument("mixed_expectation: dim < 1");
    if (static_cast<int>(xi_matrix.size()) != dim * dim)
        throw std::invalid_argument("mixed_expectation: matrix size != dim^2");
    // A = -hbar * lk * xi, exp by scaling and squaring with a Taylor core
    std::vector<double> A(xi_matrix);
    for (double& v : A) v *= -hbar * lk_value;
    double amax = 0.0;
    for (int r = 0; r < dim; ++r) {
        double row = 0.0;
        for (int c = 0; c < dim; ++c) row += std::fabs(A[static_cast<size_t>(r) * dim + c]);
        amax = std::max(amax, row);
    }
    int squarings = 0;
    while (amax > 0.5 && squarings < 60) {
        amax *= 0.5;
        ++squarings;
    }
    double scale = std::ldexp(1.0, -squarings);
    for (double& v : A) v *= scale;

    auto matmul = [dim](const std::vector<double>& X, const std::vector<double>& Y) {
        std::vector<double> Z(static_cast<size_t>(dim) * dim, 0.0);
        for (int r = 0; r < dim; ++r)
            for (int k = 0; k < dim; ++k) {
                double x = X[static_cast<size_t>(r) * dim + k];
                if (x == 0.0) continue;
                for (int c = 0; c < dim; ++c) Z[static_cast<size_t>(r) * dim + c] += x * Y[static_cast<size_t>(k) * dim + c];
            }
        return Z;
    };

    std::vector<double> E(static_cast<size_t>(dim) * dim, 0.0);
    for (int r = 0; r < dim; ++r) E[static_cast<size_t>(r) * dim + r] = 1.0;
    std::vector<double> term(E), sum(E);
    for (int k = 1; k <= 20; ++k) {
        term = matmul(term, A);
        for (double& v : term) v /= static_cast<double>(k);
        for (size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    }
    for (int sq = 0; sq < squarings; ++sq) sum = matmul(sum, sum);
    double tr = 0.0;
    for (int r = 0; r < dim; ++r) tr += sum[static_cast<size_t>(r) * dim + r];
    return tr;
}

// ---------------------------------------------------------------------------
// pointwise suites

ConfigurationPoint random_config(int s, int t, int m, uint64_t seed, uint64_t index, double box) {
    // generous separation keeps the propagator coefficients O(1), so the
    // pointwise identities hold to full double precision
    const double min_sep = box / 4.0;
    SplitMix64 rng = substream(seed, index);
    ConfigurationPoint cfg;
    cfg.s = s;
    cfg.t = t;
    cfg.m = m;
    cfg.xs.resize(static_cast<size_t>(s) * (m - 2));
    cfg.ys.resize(static_cast<size_t>(t) * m);
    for (int attempt = 0; attempt < 512; ++attempt) {
        for (double& v : cfg.xs) v = box * (2.0 * rng.next_unit() - 1.0);
        for (double& v : cfg.ys) v = 1.5 * box * (2.0 * rng.next_unit() - 1.0);
        bool ok = true;
        for (int i = 0; i < s && ok; ++i)
            for (int j = i + 1; j < s && ok; ++j)
                if (dist(cfg.x(i), cfg.x(j)) < min_sep) ok = false;
        for (int i = 0; i < t && ok; ++i)
            for (int j = i + 1; j < t && ok; ++j)
                if (dist(cfg.y(i), cfg.y(j)) < min_sep) ok = false;
        for (int i = 0; i < s && ok; ++i)
            for (int j = 0; j < t && ok; ++j) {
                // compare against the flat image; real images sit nearby
                std::vector<double> img(static_cast<size_t>(m), 0.0);
                auto xi = cfg.x(i);
                for (int k = 0; k < m - 2; ++k) img[static_cast<size_t>(k)] = xi[k];
                if (dist(img, cfg.y(j)) < min_sep) ok = false;
            }
        if (ok) return cfg;
    }
    throw std::runtime_error("random_config: could not separate points");
}

namespace {

ConfigurationPoint permute_config(const ConfigurationPoint& cfg, const std::vector<int>& perm_onknot,
                                  const std::vector<int>& perm_ambient) {
    ConfigurationPoint out = cfg;
    for (int i = 0; i < cfg.s; ++i) {
        auto src = cfg.x(perm_onknot[static_cast<size_t>(i)]);
        auto dst = out.x(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    for (int j = 0; j < cfg.t; ++j) {
        auto src = cfg.y(perm_ambient[static_cast<size_t>(j)]);
        auto dst = out.y(j);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

// The bump family is contained in a hyperplane (one displacement
// direction), which kills every on-knot theta pullback; pointwise suites
// need a knot with full-dimensional image, so they run on a spun knot.
LongKnot generic_spun(int m, uint64_t seed) {
    SplitMix64 rng = substream(seed, 99);
    auto jitter = [&]() { return 0.9 + 0.2 * rng.next_unit(); };
    return LongKnot::spun(m, 0.5 * jitter(), 2.0, {1.0 * jitter(), -1.3}, {0.4, 1.1 * jitter(), -1.5},
                          {0.3, -0.6 * jitter()});
}

std::string perm_to_string(const std::vector<int>& p) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << p[i] + 1;
    os << ")";
    return os.str();
}

void all_involutions(int n, std::vector<std::vector<int>>& out) {
    std::vector<int> perm(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            out.push_back(perm);
            return;
        }
        if (perm[static_cast<size_t>(i)] != i) {
            rec(i + 1);  // already paired
            return;
        }
        rec(i + 1);  // fixed point
        for (int j = i + 1; j < n; ++j) {
            if (perm[static_cast<size_t>(j)] != j) continue;
            perm[static_cast<size_t>(i)] = j;
            perm[static_cast<size_t>(j)] = i;
            rec(i + 1);
            perm[static_cast<size_t>(i)] = i;
            perm[static_cast<size_t>(j)] = j;
        }
    };
    rec(0);
}

double parity_residual(const std::function<double(const ConfigurationPoint&)>& g, int s, int t, int m,
                       const std::vector<int>& ponk, const std::vector<int>& pamb, int points,
                       uint64_t seed) {
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        ConfigurationPoint cfg = random_config(s, t, m, seed, static_cast<uint64_t>(k), 0.95);
        ConfigurationPoint swapped = permute_config(cfg, ponk, pamb);
        double a = g(cfg), b = g(swapped);
        double scale = std::max({1e-30, std::fabs(a), std::fabs(b)});
        worst = std::max(worst, std::fabs(a + b) / scale);
    }
    return worst;
}

}  // namespace

std::vector<ParityCheck> parity_suite(const std::string& invariant, int m, int points, uint64_t seed) {
    std::vector<ParityCheck> out;
    LongKnot knot = generic_spun(m, seed);
    if (invariant == "theta1") {
        const auto& term = theta1_terms().front();
        auto g = compile_term(term, m, &knot);
        ParityCheck c;
        c.term = term.label;
        c.involution = "(2 1)";
        c.max_residual = parity_residual(g, 2, 0, m, {1, 0}, {}, points, seed);
        out.push_back(c);
    } else if (invariant == "theta2") {
        // the printed involutions: 1<->3 in the first term, the pair
        // (1,3)<->(2,4) in the second, 1<->2 in the third
        const auto& terms = theta2_terms(Theta2Form::Printed);
        std::vector<std::pair<std::vector<int>, std::vector<int>>> invs = {
            {{2, 1, 0, 3}, {}}, {{1, 0, 3, 2}, {}}, {{1, 0, 2}, {0}}};
        for (size_t i = 0; i < terms.size(); ++i) {
            auto g = compile_term(terms[i], m, &knot);
            ParityCheck c;
            c.term = terms[i].label;
            c.involution = perm_to_string(invs[i].first);
            c.max_residual = parity_residual(g, terms[i].s, terms[i].t, m, invs[i].first, invs[i].second,
                                             points, seed);
            out.push_back(c);
        }
    } else if (invariant == "theta3") {
        // no printed involutions for theta3: search vertex involutions that
        // negate the integrand pointwise and report which terms have none
        const auto& terms = theta3_terms(Theta3Form::Printed);
        for (const auto& term : terms) {
            auto g = compile_term(term, m, &knot);
            std::vector<std::vector<int>> invs_s, invs_t;
            all_involutions(term.s, invs_s);
            all_involutions(term.t, invs_t);
            ParityCheck c;
            c.term = term.label;
            c.involution_found = false;
            c.max_residual = 1.0;
            const int probe_points = std::min(points, 24);
            for (const auto& ps : invs_s) {
                for (const auto& pt : invs_t) {
                    bool identity = true;
                    for (size_t i = 0; i < ps.size(); ++i)
                        if (ps[i] != static_cast<int>(i)) identity = false;
                    for (size_t i = 0; i < pt.size(); ++i)
                        if (pt[i] != static_cast<int>(i)) identity = false;
                    if (identity) continue;
                    double res = parity_residual(g, term.s, term.t, m, ps, pt, probe_points, seed);
                    if (res < 1e-10) {
                        c.involution_found = true;
                        c.involution = perm_to_string(ps) + (term.t ? "x" + perm_to_string(pt) : "");
                        c.max_residual = parity_residual(g, term.s, term.t, m, ps, pt, points, seed);
                        break;
                    }
                }
                if (c.involution_found) break;
            }
            if (!c.involution_found) c.involution = "none found";
            out.push_back(c);
        }
    } else {
        throw std::invalid_argument("parity_suite: unknown invariant '" + invariant + "'");
    }
    return out;
}

std::vector<FlatCheck> flat_annihilation(int m, int points, uint64_t seed) {
    std::vector<FlatCheck> out;
    LongKnot flat = LongKnot::flat(m);
    auto run = [&](const TermSpec& term) {
        auto g = compile_term(term, m, &flat);
        // envelope: product of factor coefficient-norms bounds the roundoff
        FlatCheck c;
        c.term = term.label;
        for (int k = 0; k < points; ++k) {
            ConfigurationPoint cfg = random_config(term.s, term.t, m, seed, static_cast<uint64_t>(k), 0.95);
            double val = std::fabs(g(cfg));
            EvalContext ctx(cfg, &flat);
            double env = std::fabs(term.coefficient);
            for (const auto& f : term.factors) {
                double fn = 0.0;
                for (const auto& p : f.parts) {
                    AltForm part = f.is_theta ? theta_at(ctx, p.i, p.j) : eta_at(ctx, p.i, p.j);
                    for (const auto& tm : part.terms()) fn += std::fabs(tm.coeff);
                }
                env *= fn;
            }
            c.max_residual = std::max(c.max_residual, val / std::max(1.0, env));
        }
        out.push_back(c);
    };
    for (const auto& t : theta1_terms()) run(t);
    for (const auto& t : theta2_terms(Theta2Form::Printed)) run(t);
    for (const auto& t : theta3_terms(Theta3Form::Printed)) run(t);
    return out;
}

}  // namespace knotmc
