#include "core/linalg.hpp"

#include <array>
#include <cmath>

namespace knotmc {

namespace {

inline double det2(const double* c0, const double* c1) {
    return c0[0] * c1[1] - c0[1] * c1[0];
}

inline double det3(const double* c0, const double* c1, const double* c2) {
    return c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) -
           c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
           c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
}

inline double det4(const double* const* c) {
    double out = 0.0;
    double sign = 1.0;
    for (int k = 0; k < 4; ++k) {
        std::array<const double*, 3> sub{};
        int idx = 0;
        for (int j = 0; j < 4; ++j)
            if (j != k) sub[idx++] = c[j];
        // minor over rows 1..3
        double m = sub[0][1] * (sub[1][2] * sub[2][3] - sub[1][3] * sub[2][2]) -
                   sub[1][1] * (sub[0][2] * sub[2][3] - sub[0][3] * sub[2][2]) +
                   sub[2][1] * (sub[0][2] * sub[1][3] - sub[0][3] * sub[1][2]);
        out += sign * c[k][0] * m;
        sign = -sign;
    }
    return out;
}

double det_lu(int n, const double* const* cols) {
    // scratch copy, column major
    std::vector<double> a(static_cast<size_t>(n) * n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) a[static_cast<size_t>(c) * n + r] = cols[c][r];

    double det = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(a[static_cast<size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            double v = std::fabs(a[static_cast<size_t>(k) * n + r]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int c = k; c < n; ++c) std::swap(a[static_cast<size_t>(c) * n + k], a[static_cast<size_t>(c) * n + piv]);
            det = -det;
        }
        double pivval = a[static_cast<size_t>(k) * n + k];
        det *= pivval;
        for (int r = k + 1; r < n; ++r) {
            double f = a[static_cast<size_t>(k) * n + r] / pivval;
            if (f == 0.0) continue;
            for (int c = k + 1; c < n; ++c) a[static_cast<size_t>(c) * n + r] -= f * a[static_cast<size_t>(c) * n + k];
        }
    }
    return det;
}

}  // namespace

double det_cols(int n, const double* const* cols) {
    switch (n) {
        case 0:
            return 1.0;
        case 1:
            return cols[0][0];
        case 2:
            return det2(cols[0], cols[1]);
        case 3:
            return det3(cols[0], cols[1], cols[2]);
        case 4:
            return det4(cols);
        default:
            return det_lu(n, cols);
    }
}

double det_colmajor(int n, const double* a) {
    std::vector<const double*> cols(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) cols[static_cast<size_t>(c)] = a + static_cast<size_t>(c) * n;
    return det_cols(n, cols.data());
}

}  // namespace knotmc
