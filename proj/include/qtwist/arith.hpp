// arith.hpp -- exact integer arithmetic: factorization against a fixed prime
// sieve, Kronecker/Jacobi symbols, square-free decomposition and fundamental
// discriminant bookkeeping for quadratic characters.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qtwist/common.hpp"

namespace qtwist::arith {

using std::int64_t;

struct Factorization {
    int64_t value = 1;
    std::vector<std::pair<int64_t, int>> factors;  // (prime, exponent), primes increasing
};

struct SquarefreeDecomposition {
    int64_t core = 1;  // square-free part
    int64_t root = 1;  // core * root^2 = n
};

// d = core of n folded to a fundamental discriminant (or 1), with the primes
// where chi_n and chi^{(d)} can disagree (those dividing 2n but not d).
struct InducingDiscriminant {
    int64_t d = 1;
    std::vector<int64_t> degenerate_primes;
};

// Primes up to 10^6, built once.
const std::vector<int64_t>& prime_table();

bool is_prime(int64_t n);

Factorization factorize(int64_t n);  // n >= 1

// Full Kronecker symbol (m|n), including n = 0, n = 2-parts and signs.
int kronecker(int64_t m, int64_t n);

// Jacobi-with-n-on-the-bottom character chi_n(m) = (m|n); n odd >= 1.
int chi_bottom(int64_t n, int64_t m);

SquarefreeDecomposition squarefree_decompose(int64_t n);

InducingDiscriminant inducing_discriminant(int64_t n);  // n odd >= 1

int mobius(int64_t n);
int64_t euler_phi(int64_t n);
int omega(int64_t n);
int64_t divisor_count(int64_t n);

// d is a fundamental discriminant (d = 1 counts as the degenerate unit).
bool is_fundamental_discriminant(int64_t d);

// Fundamental discriminant attached to an odd positive non-square u: the
// conductor of the even character chi^{(4u)}.
int64_t fundamental_discriminant_of(int64_t u);

}  // namespace qtwist::arith
