#include "core/mc.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

namespace knotmc {

namespace {

constexpr long long kChunk = 4096;

struct ChunkSums {
    double sum = 0.0;
    double sumsq = 0.0;
    long long nonfinite = 0;
};

// fixed-shape pairwise reduction in chunk order
void reduce_tree(std::vector<ChunkSums>& c) {
    size_t width = c.size();
    while (width > 1) {
        size_t half = (width + 1) / 2;
        for (size_t i = 0; i + half < width; ++i) {
            c[i].sum += c[i + half].sum;
            c[i].sumsq += c[i + half].sumsq;
            c[i].nonfinite += c[i + half].nonfinite;
        }
        width = half;
    }
}

}  // namespace

Estimate run_mc(long long n, uint64_t seed, int workers,
                const std::function<double(uint64_t, uint64_t)>& weighted_value) {
    if (n < 2) throw std::invalid_argument("run_mc: need n >= 2");
    if (workers < 1) workers = 1;

    const long long nchunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkSums> chunks(static_cast<size_t>(nchunks));

    std::exception_ptr error;
    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    auto work = [&]() {
        try {
            for (;;) {
                long long c = next.fetch_add(1);
                if (c >= nchunks || failed.load(std::memory_order_relaxed)) break;
                long long lo = c * kChunk;
                long long hi = std::min(n, lo + kChunk);
                Kahan sum, sumsq;
                long long bad = 0;
                for (long long i = lo; i < hi; ++i) {
                    double v = weighted_value(seed, static_cast<uint64_t>(i));
                    if (!std::isfinite(v)) {
                        ++bad;
                        continue;
                    }
                    sum.add(v);
                    sumsq.add(v * v);
                }
                chunks[static_cast<size_t>(c)] = {sum.sum, sumsq.sum, bad};
            }
        } catch (...) {
            failed.store(true);
            error = std::current_exception();
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    reduce_tree(chunks);
    const double sum = chunks[0].sum;
    const double sumsq = chunks[0].sumsq;
    const long long bad = chunks[0].nonfinite;
    if (static_cast<double>(bad) > 1e-4 * static_cast<double>(n)) {
        std::ostringstream os;
        os << "run_mc: " << bad << " non-finite samples out of " << n << " exceed the 0.01% abort threshold";
        throw NumericAbort(os.str());
    }

    const double nn = static_cast<double>(n - bad);
    Estimate e;
    e.value = sum / nn;
    double var = (sumsq - nn * e.value * e.value) / (nn - 1.0);
    e.stderr_ = var > 0.0 ? std::sqrt(var / nn) : 0.0;
    e.n = n;
    e.seed = seed;
    e.nonfinite = bad;
    return e;
}

Estimate integrate(const std::function<double(const ConfigurationPoint&)>& integrand, const Domain& domain,
                   const ProposalSpec& spec, long long n, uint64_t seed, bool antithetic, int workers) {
    ConfigSampler sampler(domain.s, domain.t, domain.m, domain.knot, spec);
    std::function<double(uint64_t, uint64_t)> value;
    if (antithetic) {
        value = [&sampler, &integrand](uint64_t sd, uint64_t i) {
            SampleResult a, b;
            sampler.sample_pair(sd, i, a, b);
            return 0.5 * (integrand(a.cfg) * a.weight + integrand(b.cfg) * b.weight);
        };
    } else {
        value = [&sampler, &integrand](uint64_t sd, uint64_t i) {
            SampleResult r = sampler.sample(sd, i);
            return integrand(r.cfg) * r.weight;
        };
    }
    Estimate e = run_mc(n, seed, workers, value);
    std::ostringstream os;
    os << "mc(" << spec.mode_name() << (antithetic ? ",antithetic" : "") << ",scale=" << spec.scale
       << ",tail=" << spec.onknot_exponent(domain.m) << ")";
    e.strategy = os.str();
    return e;
}

}  // namespace knotmc
