// ratios.hpp -- the asymptotic-verification harness: smooth compactly
// supported weights and their Mellin transforms, the family sum of shifted
// L-value ratios over odd twists, the predicted main term
// X w_hat(1) L^{(2)}(1+2a, sym2 f) P(1, 1/2+a, 1/2+b; f), and the
// log-log error-exponent regression against N(a,b) = max(1-2Re a, 1-2Re b).

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qtwist/common.hpp"
#include "qtwist/lfun.hpp"
#include "qtwist/modform.hpp"

namespace qtwist::ratios {

using lfun::TruncationPolicy;
using modform::HeckeEigenform;

struct SmoothWeight {
    std::function<double(double)> eval;  // >= 0, smooth, supported in [t_lo, t_hi]
    double t_lo = 1.0;
    double t_hi = 2.0;
    int quadrature_nodes = 4096;
};

// w(t) = exp(-1/(1-u^2)) with u the affine map of (t_lo, t_hi) onto (-1, 1).
SmoothWeight default_bump(double t_lo = 1.0, double t_hi = 2.0);

struct ShiftPair {
    cdouble alpha;
    cdouble beta;
    void validate() const;  // 0 < Re(alpha) < 1/2, Re(beta) > 0
    double n_exponent() const { return std::max(1.0 - 2.0 * alpha.real(), 1.0 - 2.0 * beta.real()); }
};

// Mellin transform integral w(t) t^{s-1} dt over the support.
cdouble mellin_hat(const SmoothWeight& w, cdouble s);

// sum over odd n with n/X in supp(w) of
//   L^{(2)}(1/2+alpha, f x chi_n) / L^{(2)}(1/2+beta, f x chi_n) * w(n/X),
// summed in increasing n (fixed chunked reduction, bit-stable per chunk width).
cdouble lhs_sum(double X, const ShiftPair& shifts, const HeckeEigenform& f, const SmoothWeight& w,
                const TruncationPolicy& pol, int workers = 1);

cdouble main_term(double X, const ShiftPair& shifts, const HeckeEigenform& f, const SmoothWeight& w,
                  const TruncationPolicy& pol);

struct RatiosRecord {
    double X;
    cdouble lhs;
    cdouble main;
    double abs_dev;
    double rel_dev;
};

struct RatiosReport {
    cdouble alpha, beta;
    double n_alpha_beta;                 // N(alpha,beta)
    double predicted_abs_exponent;      // N(alpha,beta), up to epsilon
    double predicted_rel_exponent;      // N(alpha,beta) - 1 for the relative deviation
    double fitted_slope;                // least squares on (log X, log abs_dev)
    std::vector<RatiosRecord> records;  // sorted by X
    double wall_seconds = 0.0;
    int workers = 1;
    double tolerance = 0.0;
    std::string weight_name = "bump[1,2]";
};

RatiosReport run_verification(std::vector<double> x_grid, const ShiftPair& shifts, const HeckeEigenform& f,
                              const SmoothWeight& w, const TruncationPolicy& pol, int workers = 1);

// Report emission; the CSV columns are fixed:
// X,re_lhs,im_lhs,re_main,im_main,abs_dev,rel_dev
std::string report_to_json(const RatiosReport& r);
RatiosReport report_from_json(const std::string& text);
std::string report_to_csv(const RatiosReport& r);

}  // namespace qtwist::ratios
