#include "core/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace knotmc {

AltForm::AltForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > 30) throw std::invalid_argument("AltForm: dim out of range");
    if (degree < 0) throw std::invalid_argument("AltForm: negative degree");
    // degree > dim is the zero form by convention
}

double AltForm::coeff(uint32_t mask) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), mask,
                               [](const Term& t, uint32_t m) { return t.mask < m; });
    if (it != terms_.end() && it->mask == mask) return it->coeff;
    return 0.0;
}

void AltForm::set(uint32_t mask, double value) {
    if (std::popcount(mask) != degree_) throw std::invalid_argument("AltForm::set: subset size != degree");
    if (mask >> dim_) throw std::invalid_argument("AltForm::set: index out of dimension");
    terms_.push_back({mask, value});
}

void AltForm::finish() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.mask < y.mask; });
    size_t w = 0;
    for (size_t r = 0; r < terms_.size();) {
        uint32_t m = terms_[r].mask;
        double s = 0.0;
        while (r < terms_.size() && terms_[r].mask == m) s += terms_[r++].coeff;
        if (s != 0.0) terms_[w++] = {m, s};
    }
    terms_.resize(w);
}

AltForm& AltForm::operator+=(const AltForm& other) {
    if (other.dim_ != dim_ || other.degree_ != degree_)
        throw std::invalid_argument("AltForm::operator+=: shape mismatch");
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    finish();
    return *this;
}

AltForm& AltForm::operator*=(double scalar) {
    if (scalar == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.coeff *= scalar;
    return *this;
}

AltForm AltForm::basis(int dim, uint32_t mask) {
    AltForm f(dim, std::popcount(mask));
    f.set(mask, 1.0);
    f.finish();
    return f;
}

int merge_sign(uint32_t a, uint32_t b) {
    int inversions = 0;
    uint32_t rest = b;
    while (rest) {
        int j = std::countr_zero(rest);
        rest &= rest - 1;
        inversions += std::popcount(a >> (j + 1));
    }
    return (inversions & 1) ? -1 : 1;
}

AltForm wedge(const AltForm& a, const AltForm& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("wedge: dimension mismatch");
    AltForm out(a.dim(), a.degree() + b.degree());
    if (out.degree() > out.dim()) return out;  // zero form
    for (const auto& ta : a.terms()) {
        for (const auto& tb : b.terms()) {
            if (ta.mask & tb.mask) continue;
            out.set(ta.mask | tb.mask, merge_sign(ta.mask, tb.mask) * ta.coeff * tb.coeff);
        }
    }
    out.finish();
    return out;
}

double wedge_top(std::span<const AltForm* const> factors) {
    if (factors.empty()) return 0.0;
    int dim = factors[0]->dim();
    int total = 0;
    for (const AltForm* f : factors) {
        if (f->dim() != dim) throw std::invalid_argument("wedge_top: dimension mismatch");
        total += f->degree();
    }
    if (total != dim) throw std::invalid_argument("wedge_top: degrees do not sum to dimension");
    const uint32_t full = (dim == 32) ? 0xFFFFFFFFu : ((1u << dim) - 1u);

    // Columns that later factors can still supply; a partial mask must
    // already contain everything outside that union.
    size_t nf = factors.size();
    std::vector<uint32_t> suffix_support(nf + 1, 0u);
    for (size_t i = nf; i-- > 0;) {
        uint32_t s = suffix_support[i + 1];
        for (const auto& t : factors[i]->terms()) s |= t.mask;
        suffix_support[i] = s;
    }

    std::vector<AltForm::Term> acc{{0u, 1.0}};
    std::vector<AltForm::Term> next;
    for (size_t i = 0; i < nf; ++i) {
        next.clear();
        const uint32_t must_have = full & ~suffix_support[i + 1];
        for (const auto& ta : acc) {
            for (const auto& tb : factors[i]->terms()) {
                if (ta.mask & tb.mask) continue;
                uint32_t m = ta.mask | tb.mask;
                if ((m & must_have) != must_have) continue;
                next.push_back({m, merge_sign(ta.mask, tb.mask) * ta.coeff * tb.coeff});
            }
        }
        std::sort(next.begin(), next.end(), [](const AltForm::Term& x, const AltForm::Term& y) { return x.mask < y.mask; });
        size_t w = 0;
        for (size_t r = 0; r < next.size();) {
            uint32_t m = next[r].mask;
            double s = 0.0;
            while (r < next.size() && next[r].mask == m) s += next[r++].coeff;
            if (s != 0.0) next[w++] = {m, s};
        }
        next.resize(w);
        acc.swap(next);
        if (acc.empty()) return 0.0;
    }
    for (const auto& t : acc)
        if (t.mask == full) return t.coeff;
    return 0.0;
}

double wedge_top(std::span<const AltForm> factors) {
    std::vector<const AltForm*> ptrs(factors.size());
    for (size_t i = 0; i < factors.size(); ++i) ptrs[i] = &factors[i];
    return wedge_top(std::span<const AltForm* const>(ptrs.data(), ptrs.size()));
}

double wedge_top_abs(std::span<const AltForm> factors) {
    std::vector<AltForm> abs_factors;
    abs_factors.reserve(factors.size());
    for (const AltForm& f : factors) {
        AltForm a(f.dim(), f.degree());
        for (const auto& t : f.terms()) a.set(t.mask, std::fabs(t.coeff));
        a.finish();
        abs_factors.push_back(std::move(a));
    }
    // with nonnegative coefficients the pruned accumulation has no signs to
    // cancel apart from the merge signs, which we suppress
    if (abs_factors.empty()) return 0.0;
    int dim = abs_factors[0].dim();
    const uint32_t full = (dim == 32) ? 0xFFFFFFFFu : ((1u << dim) - 1u);
    size_t nf = abs_factors.size();
    std::vector<uint32_t> suffix_support(nf + 1, 0u);
    for (size_t i = nf; i-- > 0;) {
        uint32_t s = suffix_support[i + 1];
        for (const auto& t : abs_factors[i].terms()) s |= t.mask;
        suffix_support[i] = s;
    }
    std::vector<AltForm::Term> acc{{0u, 1.0}};
    std::vector<AltForm::Term> next;
    for (size_t i = 0; i < nf; ++i) {
        next.clear();
        const uint32_t must_have = full & ~suffix_support[i + 1];
        for (const auto& ta : acc)
            for (const auto& tb : abs_factors[i].terms()) {
                if (ta.mask & tb.mask) continue;
                uint32_t m = ta.mask | tb.mask;
                if ((m & must_have) != must_have) continue;
                next.push_back({m, ta.coeff * tb.coeff});
            }
        std::sort(next.begin(), next.end(), [](const AltForm::Term& x, const AltForm::Term& y) { return x.mask < y.mask; });
        size_t w = 0;
        for (size_t r = 0; r < next.size();) {
            uint32_t m = next[r].mask;
            double s = 0.0;
            while (r < next.size() && next[r].mask == m) s += next[r++].coeff;
            next[w++] = {m, s};
        }
        next.resize(w);
        acc.swap(next);
        if (acc.empty()) return 0.0;
    }
    for (const auto& t : acc)
        if (t.mask == full) return t.coeff;
    return 0.0;
}

namespace {

// next k-subset mask in colex order (Gosper's hack)
inline uint32_t next_subset(uint32_t v) {
    uint32_t t = v | (v - 1);
    return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace

AltForm pullback(const Mat& jacobian, const AltForm& omega) {
    const int k = jacobian.rows;
    const int d = jacobian.cols;
    if (omega.dim() != k) throw std::invalid_argument("pullback: form dimension != jacobian rows");
    const int p = omega.degree();
    if (p > k) return AltForm(d, p);
    AltForm out(d, p);
    if (p > d) return out;
    if (p == 0) {
        out.set(0u, omega.coeff(0u));
        out.finish();
        return out;
    }

    std::vector<int> rows(p), cols(p);
    std::vector<double> minor(static_cast<size_t>(p) * p);
    uint32_t S = (1u << p) - 1u;
    const uint32_t last = ((1u << p) - 1u) << (d - p);
    for (;;) {
        int idx = 0;
        for (uint32_t m = S; m; m &= m - 1) cols[idx++] = std::countr_zero(m);
        double total = 0.0;
        for (const auto& t : omega.terms()) {
            int ridx = 0;
            for (uint32_t m = t.mask; m; m &= m - 1) rows[ridx++] = std::countr_zero(m);
            for (int c = 0; c < p; ++c)
                for (int r = 0; r < p; ++r) minor[static_cast<size_t>(c) * p + r] = jacobian(rows[r], cols[c]);
            total += t.coeff * det_colmajor(p, minor.data());
        }
        if (total != 0.0) out.set(S, total);
        if (S == last) break;
        S = next_subset(S);
    }
    out.finish();
    return out;
}

double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere_area: n < 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double sphere_volume_form(std::span<const double> u, std::span<const std::vector<double>> tangents) {
    const int n = static_cast<int>(u.size());
    if (n < 1) throw std::invalid_argument("sphere_volume_form: n < 1");
    if (static_cast<int>(tangents.size()) != n - 1)
        throw std::invalid_argument("sphere_volume_form: need n-1 tangents");
    double nu = norm(u);
    if (std::fabs(nu - 1.0) > 1e-9) throw std::invalid_argument("sphere_volume_form: u not unit");
    std::vector<const double*> cols(static_cast<size_t>(n));
    cols[0] = u.data();
    for (int i = 0; i < n - 1; ++i) {
        if (static_cast<int>(tangents[static_cast<size_t>(i)].size()) != n)
            throw std::invalid_argument("sphere_volume_form: tangent size mismatch");
        cols[static_cast<size_t>(i) + 1] = tangents[static_cast<size_t>(i)].data();
    }
    return det_cols(n, cols.data()) / sphere_area(n);
}

}  // namespace knotmc
