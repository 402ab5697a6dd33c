// mds.hpp -- the triple-Dirichlet-series objects: the Euler product
// P(s,w,z;f), the closed form A1 = zeta * L^{(2)}(2w, sym2 f) * P and its
// brute-force double-sum twin, the direct n-sum A and the non-square part
// A2, the Gauss-sum series C with its twisted decomposition, and the local
// D-series factors.

#pragma once

#include <cstdint>

#include "qtwist/common.hpp"
#include "qtwist/gauss.hpp"
#include "qtwist/lfun.hpp"
#include "qtwist/modform.hpp"

namespace qtwist::mds {

using std::int64_t;
using modform::HeckeEigenform;
using lfun::TruncationPolicy;

struct ShiftTriple {
    cdouble s, w, z;

    // S0 = { Re(s) > 1, Re(s+2w) > 2, Re(z) > 1/2 }
    bool in_S0(double margin = 0.0) const;
    // S3 = { Re(2z), Re(s+2z), Re(s+2w), Re(w+z), Re(4w), Re(s+w+z) all > 1 }
    bool in_S3(double margin = 0.0) const;
};

struct EulerProductResult {
    cdouble value;
    int64_t primes_used = 0;
    double tail_estimate = 0.0;
};

// Local factor of P as printed, exposed for the algebraic unit checks.
cdouble P_local_factor(cdouble s, cdouble w, cdouble z, double lambda_p, double p);

// P(s,w,z;f) over odd primes up to the cutoff.  Internally the slowly
// converging first-order parts are pulled out as zeta^{(2)}(2z) and
// [L^{(2)}(w+z, sym2 f) zeta^{(2)}(w+z)]^{-1}, leaving local factors that
// are 1 + O(p^{-e}) with e > 1 throughout S3; the reported tail estimate
// bounds the dropped primes of that residual product.
EulerProductResult P_product(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t prime_cutoff,
                             const TruncationPolicy& pol = {});

// zeta(s) L^{(2)}(2w, sym2 f) P(s,w,z;f); pole at s = 1 is signaled with
// the residue L^{(2)}(2w, sym2 f) P(1,w,z;f) attached.
cdouble A1_closed(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, const TruncationPolicy& pol = {});

// Residue of A1 at s = 1.
cdouble A1_residue(cdouble w, cdouble z, const HeckeEigenform& f, const TruncationPolicy& pol = {});

// zeta^{(2)}(s) * sum over odd m,k with mk a perfect square, mk <= M, of
// lambda(m) c(k) a_s(mk) / (m^w k^z), with a_s(p^j) = 1 - p^{-s}.
cdouble A1_brute(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t M,
                 const TruncationPolicy& pol = {});

// sum over odd n <= N of L^{(2)}(w, f x chi_n) / L^{(2)}(z, f x chi_n) n^{-s}.
cdouble A_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t N,
                 const TruncationPolicy& pol = {}, int workers = 1);

// sum over odd non-square mk <= M of lambda(m) c(k) L(s, chi^{(4mk)}) / (m^w k^z),
// the L-values taken through the fundamental part plus finite Euler corrections.
cdouble A2_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t M,
                  const TruncationPolicy& pol = {});

// C(s,w,z;f): sum over odd non-square l <= l_max, q <= q_max of
// tau(chi^{(4l)}, q) r(l, z-w) / (l^w q^s), via the transformation law.
cdouble C_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t l_max, int64_t q_max);

// Twisted building blocks and the eight-series reassembly of C at matched
// truncation (q_max must be divisible by 4 for the term-by-term match).
cdouble C1_twisted(cdouble s, cdouble w, cdouble z, const gauss::CharacterMod& psi,
                   const gauss::CharacterMod& psi_prime, const HeckeEigenform& f, int64_t l_max, int64_t q_max);
cdouble C2_twisted(cdouble s, cdouble w, cdouble z, const gauss::CharacterMod& psi,
                   const gauss::CharacterMod& psi_prime, const HeckeEigenform& f, int64_t l_max, int64_t q_max);
cdouble C_assembled(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t l_max, int64_t q_max);

// Local D-series pieces (Lemma 3.2 algebra).  The l-sum terminates exactly
// because G(chi_{p^l}, q1) vanishes for l >= v_p(q1) + 2.
cdouble D1_local_lsum(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                      cdouble w, cdouble t);
cdouble D1_local_closed(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                        cdouble w, cdouble t);

struct DLocalResult {
    cdouble value;
    double tail_estimate = 0.0;
};

// Full local factor D_{1,p}: double sum over l >= 0 and k <= K (k the
// exponent of p in q2^2), geometric tail reported.  p = 2 returns
// sum_l psi'(2^{2l}) 2^{-2ls}.
DLocalResult D1_full_local(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                           const gauss::CharacterMod& psi_prime, cdouble s, cdouble w, cdouble t, int K);

}  // namespace qtwist::mds
