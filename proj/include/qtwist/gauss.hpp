// gauss.hpp -- quadratic Gauss sums.  Definitional tau(chi,q) by direct
// summation (the oracle path), the fast multiplicative evaluation of
// G(chi_n, q) from the five-case prime-power formula, the transformation
// law turning tau(chi_l, .) into tau(chi^{(4l)}, .), and the K(s,chi)
// series entering the non-primitive functional equation.

#pragma once

#include <cstdint>

#include "qtwist/common.hpp"

namespace qtwist::gauss {

using std::int64_t;

// Quadratic character together with its period.
class CharacterMod {
  public:
    enum class Kind { KroneckerTop, JacobiBottom, Auxiliary };

    // chi^{(m)} = (m|.), periodic mod |m| when m = 0,1 (mod 4), else mod 4|m|.
    static CharacterMod kronecker_top(int64_t m);
    // chi_n = (.|n), n odd >= 1.
    static CharacterMod jacobi_bottom(int64_t n);
    // psi_j = chi^{(4j)} for j in {+-1, +-2}; psi_0 is the primitive
    // principal character (modulus 1).
    static CharacterMod auxiliary(int j);

    int operator()(int64_t x) const;
    int64_t modulus() const { return modulus_; }
    Kind kind() const { return kind_; }
    int64_t parameter() const { return param_; }
    bool is_even() const;  // chi(-1) == 1

  private:
    CharacterMod(Kind k, int64_t param, int64_t modulus) : kind_(k), param_(param), modulus_(modulus) {}
    Kind kind_;
    int64_t param_;
    int64_t modulus_;
};

// tau(chi, q) = sum_{j mod n} chi(j) e(jq/n), direct O(n) summation.
cdouble tau_sum(const CharacterMod& chi, int64_t q);

// G(chi_n, q) = ((1-i)/2 + (-1|n)(1+i)/2) tau(chi_n, q), by direct summation.
cdouble G_def(int64_t n, int64_t q);

// Same value through the multiplicative prime-power formula; q >= 0
// (q = 0 is treated as "divisible by every prime power").
cdouble G_fast(int64_t n, int64_t q);

// tau(chi_l, q) for odd l recovered from G_fast.
cdouble tau_bottom_fast(int64_t l, int64_t q);

// Predicted tau(chi^{(4l)}, q) from the case table over l mod 4 and q mod 4.
cdouble tau_4l_from_tau_l(int64_t l, int64_t q);

struct KSeriesResult {
    cdouble value;
    double tail_bound;  // crude: |tau| <= n gives n * Qmax^{1-Re s} / (Re s - 1)
    int64_t terms;
};

// K(s, chi) = sum_{q <= Qmax} tau(chi, q) q^{-s}.  Requires Re(s) > 3/2,
// an even character, and a non-square modulus.
KSeriesResult K_series(cdouble s, const CharacterMod& chi, int64_t q_max);

}  // namespace qtwist::gauss
