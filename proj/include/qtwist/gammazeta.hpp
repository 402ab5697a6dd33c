// gammazeta.hpp -- complex gamma (Lanczos with reflection), the normalized
// upper incomplete gamma Q(c,x) = Gamma(c,x)/Gamma(c) used as the sharp
// approximate-functional-equation weight, and Riemann zeta by Euler-Maclaurin.

#pragma once

#include "qtwist/common.hpp"

namespace qtwist::lfun {

struct TruncationPolicy {
    double tolerance = 1e-9;        // target absolute tolerance
    uint64_t max_terms = 40'000'000;  // hard cap on any single coefficient sum
    double smoothing = 0.05;        // quadrature step for multi-gamma weights

    void validate() const {
        if (!(tolerance > 0.0)) throw domain_error("TruncationPolicy: tolerance must be > 0");
        if (max_terms < 1) throw domain_error("TruncationPolicy: max_terms must be >= 1");
        if (!(smoothing > 0.0)) throw domain_error("TruncationPolicy: smoothing must be > 0");
    }
};

// Gamma(z); throws pole_error (carrying the pole index -k in `residue`)
// when z is numerically at a nonpositive integer.
cdouble complex_gamma(cdouble z);

// Q(c, x) = Gamma(c, x) / Gamma(c) for complex c and real x >= 0.
// Series for small x, Lentz continued fraction for large x.
cdouble upper_gamma_q(cdouble c, double x);

// Riemann zeta, Euler-Maclaurin; accurate to ~1e-12 for -5 <= Re s <= 5,
// |Im s| <= 100 (and well beyond).  Pole at s = 1 is signaled.
cdouble zeta(cdouble s, const TruncationPolicy& pol = {});

// zeta with the Euler factor at 2 removed: zeta(s) * (1 - 2^{-s}).
cdouble zeta2(cdouble s, const TruncationPolicy& pol = {});

}  // namespace qtwist::lfun
