#pragma once

#include <functional>
#include <vector>

#include "pcs/counting.hpp"

namespace pcs {

// Monic characteristic polynomial det(z - A) = sum_j a[j] z^j with a[D] = 1.
struct CharPolyCoeffs {
    std::vector<cplx> a;
    int degree() const { return static_cast<int>(a.size()) - 1; }
    cplx operator[](int j) const { return a[static_cast<std::size_t>(j)]; }
    cplx eval(cplx z) const;
};

CharPolyCoeffs char_poly(const Mat& a);
// Coefficients of base + increment, with the sum formed in extended precision.
CharPolyCoeffs char_poly(const Mat& base, const Mat& increment);

using CoeffFn = std::function<CharPolyCoeffs(double)>;

struct CharPolyOptions {
    double h = 1e-3;
    double branch_fraction = 0.02;
    double tolerance = 1e-6;
    double degenerate_tol = 1e-300;
    double ambiguity_tol = 1e-8;
    int refinements = 4;
};

// Roots connected to zero of the first and second order truncations.
cplx truncated_root1(const CharPolyCoeffs& c);
cplx truncated_root2(const CharPolyCoeffs& c, cplx reference_sqrt);

double first_cumulant_rate(const CoeffFn& coeffs, const CharPolyOptions& opt = {});
double second_cumulant_rate(const CoeffFn& coeffs, const CharPolyOptions& opt = {});

CoeffFn model_coeff_fn(const DressedLiouvillian& model, const CountingFields& dir);
CumulantReport cumulants_charpoly(const DressedLiouvillian& model, const CountingFields& dir,
                                  const CharPolyOptions& opt = {});

} // namespace pcs
