#include "core/configspace.hpp"

#include <cmath>
#include <stdexcept>

#include "core/exterior.hpp"

namespace knotmc {

void ProposalSpec::validate(int m) const {
    if (!(scale > 0.0)) throw std::invalid_argument("ProposalSpec: scale must be positive");
    double beta = onknot_exponent(m);
    if (!(beta > m - 2)) throw std::invalid_argument("ProposalSpec: tail_exponent must exceed m-2");
}

RadialLaw::RadialLaw(int n_, double beta_, double scale_) : n(n_), beta(beta_), scale(scale_) {
    if (n < 1 || !(beta > n) || !(scale > 0.0)) throw std::invalid_argument("RadialLaw: invalid parameters");
}

double RadialLaw::sample_radius(double u) const {
    double c = (beta - n) / n;
    // invert survival (1 + (r/scale)^n)^{-c} = 1-u
    double t = std::pow(1.0 - u, -1.0 / c) - 1.0;
    return scale * std::pow(t, 1.0 / n);
}

double RadialLaw::density(double r) const {
    double c = (beta - n) / n;
    double rn = std::pow(r / scale, n);
    double a = c * n / (std::pow(scale, n) * sphere_area(n));
    return a * std::pow(1.0 + rn, -c - 1.0);
}

double RadialLaw::log_norm_check() const {
    // adaptive Simpson of the radial marginal over [0, inf) via u = r/(r+scale)
    auto marginal = [this](double r) { return density(r) * sphere_area(n) * std::pow(r, n - 1); };
    // substitute r = scale * v/(1-v), dr = scale / (1-v)^2 dv, v in [0,1)
    auto g = [&](double v) {
        double r = scale * v / (1.0 - v);
        return marginal(r) * scale / ((1.0 - v) * (1.0 - v));
    };
    const int N = 1 << 14;
    double h = 1.0 / N;
    double acc = 0.0;
    for (int i = 0; i < N; ++i) {
        double a = i * h, b = a + h;
        acc += (g(a) + 4.0 * g(0.5 * (a + b)) + g(b)) * h / 6.0;
    }
    return acc;
}

ConfigSampler::ConfigSampler(int s, int t, int m, const LongKnot* knot, ProposalSpec spec)
    : s_(s),
      t_(t),
      m_(m),
      knot_(knot),
      spec_(spec),
      xlaw_(m - 2, spec.onknot_exponent(m), spec.scale),
      ylaw_(m, spec.ambient_exponent(m), spec.scale) {
    if (s < 0 || t < 0 || s + t < 1) throw std::invalid_argument("ConfigSampler: need at least one point");
    if (t > 0 && s > 0 && knot == nullptr) throw std::invalid_argument("ConfigSampler: knot required for anchored ambient points");
    spec.validate(m);
}

bool ConfigSampler::separated(const ConfigurationPoint& cfg) const {
    for (int i = 0; i < s_; ++i)
        for (int j = i + 1; j < s_; ++j)
            if (dist(cfg.x(i), cfg.x(j)) < kMinSeparation) return false;
    for (int i = 0; i < t_; ++i)
        for (int j = i + 1; j < t_; ++j)
            if (dist(cfg.y(i), cfg.y(j)) < kMinSeparation) return false;
    if (t_ > 0 && knot_ != nullptr) {
        std::vector<double> img(static_cast<size_t>(m_));
        for (int i = 0; i < s_; ++i) {
            knot_->eval(cfg.x(i), img);
            for (int j = 0; j < t_; ++j)
                if (dist(img, cfg.y(j)) < kMinSeparation) return false;
        }
    }
    return true;
}

bool ConfigSampler::draw(SplitMix64& rng, uint64_t index, ConfigurationPoint& cfg, std::vector<int>& anchors,
                         bool mirrored) const {
    const int n = m_ - 2;
    const double flip = mirrored ? -1.0 : 1.0;
    cfg.s = s_;
    cfg.t = t_;
    cfg.m = m_;
    cfg.xs.assign(static_cast<size_t>(s_) * n, 0.0);
    cfg.ys.assign(static_cast<size_t>(t_) * m_, 0.0);
    anchors.assign(static_cast<size_t>(t_), -1);

    bool first_uniform = true;
    auto radial_uniform = [&]() {
        double u = rng.next_unit();
        if (first_uniform && spec_.mode == ProposalSpec::Mode::Stratified) {
            // Cranley-Patterson rotation of the base-2 radical inverse
            u = van_der_corput(index) + u;
            if (u >= 1.0) u -= 1.0;
        }
        first_uniform = false;
        return u;
    };

    std::vector<double> dir(static_cast<size_t>(n));
    for (int i = 0; i < s_; ++i) {
        double r = xlaw_.sample_radius(radial_uniform());
        rng.next_direction(dir);
        auto xi = cfg.x(i);
        for (int k = 0; k < n; ++k) xi[k] = flip * r * dir[static_cast<size_t>(k)];
    }
    std::vector<double> dirm(static_cast<size_t>(m_));
    std::vector<double> anchor_img(static_cast<size_t>(m_), 0.0);
    for (int j = 0; j < t_; ++j) {
        int a = (s_ > 0) ? static_cast<int>(rng.next_below(static_cast<uint64_t>(s_))) : -1;
        anchors[static_cast<size_t>(j)] = a;
        if (a >= 0)
            knot_->eval(cfg.x(a), anchor_img);
        else
            std::fill(anchor_img.begin(), anchor_img.end(), 0.0);
        double r = ylaw_.sample_radius(radial_uniform());
        rng.next_direction(dirm);
        auto yj = cfg.y(j);
        for (int k = 0; k < m_; ++k) yj[k] = anchor_img[static_cast<size_t>(k)] + flip * r * dirm[static_cast<size_t>(k)];
    }
    return separated(cfg);
}

double ConfigSampler::density(const ConfigurationPoint& cfg, std::span<const int> anchors) const {
    double p = 1.0;
    for (int i = 0; i < s_; ++i) p *= xlaw_.density(norm(cfg.x(i)));
    if (t_ == 0) return p;
    std::vector<std::vector<double>> imgs;
    if (s_ > 0) {
        imgs.resize(static_cast<size_t>(s_));
        for (int i = 0; i < s_; ++i) imgs[static_cast<size_t>(i)] = knot_->eval(cfg.x(i));
    }
    (void)anchors;  // density is the anchor mixture, independent of the drawn anchor
    for (int j = 0; j < t_; ++j) {
        double pj = 0.0;
        if (s_ > 0) {
            for (int a = 0; a < s_; ++a) pj += ylaw_.density(dist(imgs[static_cast<size_t>(a)], cfg.y(j)));
            pj /= s_;
        } else {
            pj = ylaw_.density(norm(cfg.y(j)));
        }
        p *= pj;
    }
    return p;
}

SampleResult ConfigSampler::sample(uint64_t seed, uint64_t index) const {
    SplitMix64 rng = substream(seed, index);
    SampleResult out;
    std::vector<int> anchors;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        if (draw(rng, index, out.cfg, anchors, false)) {
            out.weight = 1.0 / density(out.cfg, anchors);
            return out;
        }
    }
    throw std::runtime_error("ConfigSampler: separation retries exhausted (degenerate proposal)");
}

void ConfigSampler::sample_pair(uint64_t seed, uint64_t index, SampleResult& out, SampleResult& mirror) const {
    std::vector<int> anchors;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        SplitMix64 rng = substream(seed, index + static_cast<uint64_t>(attempt) * 0x9E3779B9ull);
        SplitMix64 rng2 = rng;
        if (!draw(rng, index, out.cfg, anchors, false)) continue;
        std::vector<int> anchors2;
        if (!draw(rng2, index, mirror.cfg, anchors2, true)) continue;
        out.weight = 1.0 / density(out.cfg, anchors);
        mirror.weight = 1.0 / density(mirror.cfg, anchors2);
        return;
    }
    throw std::runtime_error("ConfigSampler: separation retries exhausted (degenerate proposal)");
}

PairProjection project_pair_ambient(const ConfigurationPoint& cfg, const LongKnot& knot, int i, int j) {
    if (i == j || i < 1 || j < 1 || i > cfg.s + cfg.t || j > cfg.s + cfg.t)
        throw std::invalid_argument("project_pair: bad indices");
    PairProjection out;
    out.dim = cfg.m;
    auto point = [&](int k) {
        if (k <= cfg.s) return knot.eval(cfg.x(k - 1));
        return std::vector<double>(cfg.y(k - cfg.s - 1).begin(), cfg.y(k - cfg.s - 1).end());
    };
    out.first = point(i);
    out.second = point(j);
    return out;
}

PairProjection project_pair_onknot(const ConfigurationPoint& cfg, int i, int j) {
    if (i == j || i < 1 || j < 1 || i > cfg.s || j > cfg.s)
        throw std::invalid_argument("project_pair: on-knot indices out of range");
    PairProjection out;
    out.dim = cfg.m - 2;
    out.first.assign(cfg.x(i - 1).begin(), cfg.x(i - 1).end());
    out.second.assign(cfg.x(j - 1).begin(), cfg.x(j - 1).end());
    return out;
}

}  // namespace knotmc
