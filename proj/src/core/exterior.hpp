#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/linalg.hpp"

namespace knotmc {

/// Antisymmetric multilinear form of fixed degree on a d-dimensional space,
/// stored sparsely over strictly increasing index subsets. Subsets are
/// encoded as bitmasks over {0,..,d-1}; absent masks mean coefficient zero.
/// Values are immutable after construction; all operations are pure.
class AltForm {
  public:
    struct Term {
        uint32_t mask;
        double coeff;
    };

    AltForm() = default;
    AltForm(int dim, int degree);

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const std::vector<Term>& terms() const { return terms_; }

    double coeff(uint32_t mask) const;
    void set(uint32_t mask, double value);  // build-time only; keeps terms sorted on finish()
    void finish();                          // sort by mask, merge duplicates, drop zeros

    bool is_zero() const { return terms_.empty(); }

    AltForm& operator+=(const AltForm& other);
    AltForm& operator*=(double scalar);

    static AltForm basis(int dim, uint32_t mask);

  private:
    int dim_ = 0;
    int degree_ = 0;
    std::vector<Term> terms_;  // sorted by mask, strictly increasing, nonzero coeffs
};

/// Sign of the shuffle merging two disjoint masks a, b into a|b with the
/// factors of a kept first: (-1)^{#{(i,j) : i in a, j in b, i > j}}.
int merge_sign(uint32_t a, uint32_t b);

/// Exterior product. Bilinear, associative, graded-antisymmetric.
AltForm wedge(const AltForm& a, const AltForm& b);

/// Coefficient of the top subset {0,..,dim-1} of the wedge of all factors,
/// taken in the given order. Equivalent to chaining wedge() and reading the
/// single top coefficient, but prunes terms that cannot be completed by the
/// supports of the remaining factors.
double wedge_top(std::span<const AltForm> factors);
double wedge_top(std::span<const AltForm* const> factors);

/// Sum of |products| feeding the top coefficient (all signs dropped): the
/// natural scale against which the roundoff of wedge_top is measured.
double wedge_top_abs(std::span<const AltForm> factors);

/// Pullback of omega (degree p on R^k) through the linear map given by the
/// k x d matrix of partials: coefficient on a size-p subset S of columns is
/// sum over size-p row subsets T of omega[T] * minor(J; T, S).
AltForm pullback(const Mat& jacobian, const AltForm& omega);

/// Surface volume of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Value of the normalized SO(n)-invariant volume form of S^{n-1} at the
/// unit point u on the given n-1 tangent vectors:
/// det(u, t_1, .., t_{n-1}) / Vol(S^{n-1}).
double sphere_volume_form(std::span<const double> u, std::span<const std::vector<double>> tangents);

}  // namespace knotmc
