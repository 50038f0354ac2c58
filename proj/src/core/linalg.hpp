#pragma once

#include <cmath>
#include <cstring>
#include <span>
#include <vector>

namespace knotmc {

// Column-major dense matrix, sized for the small dimensions this library
// works in (m <= 8, configuration tangent dimensions <= 32).
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(c) * rows + r]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(c) * rows + r]; }
    double* col(int c) { return a.data() + static_cast<size_t>(c) * rows; }
    const double* col(int c) const { return a.data() + static_cast<size_t>(c) * rows; }
};

inline double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

inline double dist(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Determinant of an n x n matrix given as n column pointers. Cofactor
// expansion up to n = 4, LU with partial pivoting beyond. Destroys nothing;
// the LU path copies into scratch.
double det_cols(int n, const double* const* cols);

// Determinant of a column-major n x n buffer (copied internally).
double det_colmajor(int n, const double* a);

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        double y = v - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace knotmc
