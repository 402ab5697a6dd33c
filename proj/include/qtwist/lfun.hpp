// lfun.hpp -- numerical L-value engine.  A completed-L description
// (coefficients, gamma factors, conductor power, root number) is evaluated
// through the sharp two-sum approximate functional equation
//
//   L(s) = sum a(n) n^{-s} V_s(n/Q)
//        + omega Q^{1-2s} (gamma(1-s)/gamma(s)) sum a(n) n^{-(1-s)} V_{1-s}(n/Q),
//
// where V_s(y) = (1/2*pi*i) int_(c) (gamma(s+u)/gamma(s)) y^{-u} du/u.  For a
// single gamma factor Gamma(a s + b) the weight collapses to the normalized
// upper incomplete gamma Q(a s+b, (n/Q)^{1/a}); products of gamma factors go
// through a cached vertical-line quadrature.
//
// On top of the engine: quadratic Dirichlet L, quadratic-twist modular L,
// symmetric-square L, Euler-factor surgery and the general odd-n twist
// L^{(2)}(s, f (x) chi_n).

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qtwist/common.hpp"
#include "qtwist/gammazeta.hpp"
#include "qtwist/modform.hpp"

namespace qtwist::lfun {

struct GammaFactor {
    double scale;  // Gamma(scale * s + shift)
    double shift;
};

struct CompletedLDescription {
    std::string name;
    std::function<double(uint64_t)> coeff;  // Dirichlet coefficients (real; all series here are self-dual)
    std::vector<GammaFactor> gammas;
    double q_base = 1.0;  // Lambda(s) = q_base^s * prod Gamma * L(s)
    cdouble root_number = 1.0;
    uint64_t coeff_limit = 0;     // largest n the coefficient source can serve
    double coeff_bound = 1024.0;  // crude sup bound used by the truncation exit
};

struct EvalDiag {
    uint64_t terms_main = 0;
    uint64_t terms_dual = 0;
    double tail_estimate = 0.0;
};

// The functional-equation-validated strip for afe_value.
constexpr double kStripLo = -3.0;
constexpr double kStripHi = 4.0;

cdouble afe_value(const CompletedLDescription& desc, cdouble s, const TruncationPolicy& pol,
                  EvalDiag* diag = nullptr);

// q_base^s * prod Gamma(a s + b) * L(s).
cdouble completed_value(const CompletedLDescription& desc, cdouble s, const TruncationPolicy& pol);

// Ready-made descriptions.
CompletedLDescription describe_quad_dirichlet(int64_t d);  // d fundamental, != 1
CompletedLDescription describe_modular_twist(const modform::HeckeEigenform& f, int64_t d);  // d fundamental or 1
CompletedLDescription describe_sym2(const modform::HeckeEigenform& f);

// L(s, chi^{(d)}) for fundamental d (d = 1 degenerates to zeta).
cdouble quad_dirichlet_L(cdouble s, int64_t d, const TruncationPolicy& pol);

// L(s, f (x) chi^{(d)}) for fundamental d or d = 1.
cdouble modular_twist_L(cdouble s, const modform::HeckeEigenform& f, int64_t d, const TruncationPolicy& pol);

// L(s, sym^2 f).
cdouble sym2_L(cdouble s, const modform::HeckeEigenform& f, const TruncationPolicy& pol);

// L^{(2)}(s, sym^2 f): the Euler factor at 2 removed.
cdouble sym2_L2(cdouble s, const modform::HeckeEigenform& f, const TruncationPolicy& pol);

// Local factor (1 - lambda(p) chi_p p^{-s} + chi_p^2 p^{-2s})^{-1}; set
// inverse = true for the reciprocal (Euler-factor removal).
cdouble euler_factor_modular(const modform::HeckeEigenform& f, int64_t p, int chi_value, cdouble s,
                             bool inverse = false);

// L^{(2)}(s, f (x) chi_n) for general odd n >= 1 through the inducing
// fundamental discriminant and finite local corrections.
cdouble L2_twist(cdouble s, const modform::HeckeEigenform& f, int64_t n, const TruncationPolicy& pol);

}  // namespace qtwist::lfun
