#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace knotmc {

/// Point of C_{s,t}(f): s on-knot parameters in R^{m-2} and t ambient points
/// in R^m, all pairwise distinct (enforced at sampling time).
struct ConfigurationPoint {
    int s = 0;
    int t = 0;
    int m = 4;
    std::vector<double> xs;  // s * (m-2), point-major
    std::vector<double> ys;  // t * m

    std::span<const double> x(int i) const { return {xs.data() + static_cast<size_t>(i) * (m - 2), static_cast<size_t>(m - 2)}; }
    std::span<double> x(int i) { return {xs.data() + static_cast<size_t>(i) * (m - 2), static_cast<size_t>(m - 2)}; }
    std::span<const double> y(int j) const { return {ys.data() + static_cast<size_t>(j) * m, static_cast<size_t>(m)}; }
    std::span<double> y(int j) { return {ys.data() + static_cast<size_t>(j) * m, static_cast<size_t>(m)}; }
};

/// Heavy-tailed proposal for the decaying, diagonal-singular integrands.
/// Each on-knot point is drawn isotropically around the origin with a
/// radial law whose point-density decays like |z|^{-tail_exponent}; each
/// ambient point is drawn the same way (exponent + 2) around the image of a
/// uniformly chosen on-knot anchor. Densities are strictly positive and
/// normalized in closed form.
struct ProposalSpec {
    double scale = 1.0;
    double tail_exponent = 0.0;  // 0 means "use the default m-1"
    enum class Mode { IidHeavyTail, Stratified } mode = Mode::IidHeavyTail;

    double onknot_exponent(int m) const { return tail_exponent > 0.0 ? tail_exponent : m - 1.0; }
    double ambient_exponent(int m) const { return onknot_exponent(m) + 2.0; }
    void validate(int m) const;
    std::string mode_name() const { return mode == Mode::IidHeavyTail ? "iid-heavy-tail" : "stratified"; }
};

/// Isotropic heavy-tailed point law on R^n: survival of the radius is
/// (1 + (r/scale)^n)^{-c} with c = (beta - n)/n, so the point density
/// decays like |z|^{-beta}. Closed-form density and inverse-CDF sampling.
struct RadialLaw {
    int n;
    double beta;
    double scale;

    RadialLaw(int n_, double beta_, double scale_);
    double sample_radius(double u) const;  // u in [0,1)
    double density(double r) const;        // point density at distance r
    double log_norm_check() const;         // integral of the density (for tests)
};

struct SampleResult {
    ConfigurationPoint cfg;
    double weight = 0.0;
};

/// Sampler for C_{s,t}(f) under a ProposalSpec. Stateless with respect to
/// the stream: sample(i) draws from the substream keyed by (seed, i), so any
/// assignment of indices to workers yields the same stream.
class ConfigSampler {
  public:
    ConfigSampler(int s, int t, int m, const LongKnot* knot, ProposalSpec spec);

    int s() const { return s_; }
    int t() const { return t_; }
    int m() const { return m_; }
    int dim() const { return s_ * (m_ - 2) + t_ * m_; }

    SampleResult sample(uint64_t seed, uint64_t index) const;
    /// sample together with its antithetic partner (all direction draws
    /// negated: on-knot points reflect through the origin, ambient offsets
    /// through their anchor image)
    void sample_pair(uint64_t seed, uint64_t index, SampleResult& out, SampleResult& mirror) const;

    double density(const ConfigurationPoint& cfg, std::span<const int> anchors) const;

    static constexpr double kMinSeparation = 1e-9;
    static constexpr int kMaxRetries = 256;

  private:
    bool draw(SplitMix64& rng, uint64_t index, ConfigurationPoint& cfg, std::vector<int>& anchors,
              bool mirrored) const;
    bool separated(const ConfigurationPoint& cfg) const;

    int s_, t_, m_;
    const LongKnot* knot_;
    ProposalSpec spec_;
    RadialLaw xlaw_, ylaw_;
};

/// The four cases of the pair projection to C_2(R^m) (on-knot indices are
/// mapped through the knot), or the on-knot projection to C_2(R^{m-2}).
struct PairProjection {
    int dim;  // m (ambient pair) or m-2 (on-knot pair)
    std::vector<double> first, second;
};

PairProjection project_pair_ambient(const ConfigurationPoint& cfg, const LongKnot& knot, int i, int j);
PairProjection project_pair_onknot(const ConfigurationPoint& cfg, int i, int j);

}  // namespace knotmc
