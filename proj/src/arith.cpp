#include "qtwist/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qtwist::arith {

namespace {

constexpr int64_t kSieveLimit = 1'000'000;

std::vector<int64_t> build_primes() {
    std::vector<bool> composite(kSieveLimit + 1, false);
    std::vector<int64_t> primes;
    for (int64_t i = 2; i <= kSieveLimit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (int64_t j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return primes;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
bool miller_rabin(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace

const std::vector<int64_t>& prime_table() {
    static const std::vector<int64_t> primes = build_primes();
    return primes;
}

bool is_prime(int64_t n) {
    if (n < 2) return false;
    if (n <= kSieveLimit) {
        const auto& ps = prime_table();
        return std::binary_search(ps.begin(), ps.end(), n);
    }
    return miller_rabin(static_cast<uint64_t>(n));
}

Factorization factorize(int64_t n) {
    if (n < 1) throw domain_error("factorize: n must be >= 1");
    Factorization f;
    f.value = n;
    int64_t rest = n;
    for (int64_t p : prime_table()) {
        if (p * p > rest) break;
        if (rest % p) continue;
        int e = 0;
        while (rest % p == 0) { rest /= p; ++e; }
        f.factors.emplace_back(p, e);
    }
    if (rest > 1) {
        if (!is_prime(rest))
            throw domain_error("factorize: cofactor beyond sieve range is composite");
        f.factors.emplace_back(rest, 1);
    }
    return f;
}

// The (m|2) rule: 0 for even m, +1 for m = +-1 mod 8, -1 for m = +-3 mod 8.
static int kron_two(int64_t m) {
    if (m % 2 == 0) return 0;
    const int r = static_cast<int>(((m % 8) + 8) % 8);
    return (r == 1 || r == 7) ? 1 : -1;
}

int kronecker(int64_t m, int64_t n) {
    if (m == 0 && n == 0) throw domain_error("kronecker: (0,0) is undefined");
    if (n == 0) return (m == 1 || m == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (m < 0) result = -result;
    }
    if (n % 2 == 0) {
        if (m % 2 == 0) return 0;
        int two = kron_two(m);
        while (n % 2 == 0) { n /= 2; result *= two; }
    }
    // Now n odd positive: binary Jacobi loop.
    m %= n;
    if (m < 0) m += n;
    while (m != 0) {
        while (m % 2 == 0) { m /= 2; result *= kron_two(n); }
        std::swap(m, n);
        if ((m % 4 == 3) && (n % 4 == 3)) result = -result;
        m %= n;
    }
    return n == 1 ? result : 0;
}

int chi_bottom(int64_t n, int64_t m) {
    if (n < 1 || n % 2 == 0) throw domain_error("chi_bottom: n must be odd and positive");
    return kronecker(m, n);
}

SquarefreeDecomposition squarefree_decompose(int64_t n) {
    Factorization f = factorize(n);
    SquarefreeDecomposition d;
    for (auto [p, e] : f.factors) {
        if (e % 2) d.core *= p;
        for (int i = 0; i < e / 2; ++i) d.root *= p;
    }
    return d;
}

InducingDiscriminant inducing_discriminant(int64_t n) {
    if (n < 1 || n % 2 == 0) throw domain_error("inducing_discriminant: n must be odd and positive");
    Factorization f = factorize(n);
    int64_t core = 1;
    for (auto [p, e] : f.factors)
        if (e % 2) core *= p;

    InducingDiscriminant out;
    if (core == 1)
        out.d = 1;
    else if (core % 4 == 1)
        out.d = core;
    else
        out.d = -core;
    out.degenerate_primes.push_back(2);
    for (auto [p, e] : f.factors)
        if (core % p != 0) out.degenerate_primes.push_back(p);
    return out;
}

int mobius(int64_t n) {
    Factorization f = factorize(n);
    for (auto [p, e] : f.factors)
        if (e > 1) return 0;
    return f.factors.size() % 2 ? -1 : 1;
}

int64_t euler_phi(int64_t n) {
    Factorization f = factorize(n);
    int64_t phi = n;
    for (auto [p, e] : f.factors) phi = phi / p * (p - 1);
    return phi;
}

int omega(int64_t n) {
    return static_cast<int>(factorize(n).factors.size());
}

int64_t divisor_count(int64_t n) {
    Factorization f = factorize(n);
    int64_t d = 1;
    for (auto [p, e] : f.factors) d *= (e + 1);
    return d;
}

bool is_fundamental_discriminant(int64_t d) {
    if (d == 1) return true;
    if (d == 0) return false;
    const int64_t r = ((d % 4) + 4) % 4;
    if (r == 1) {
        auto sq = squarefree_decompose(std::llabs(d));
        return sq.root == 1;
    }
    if (r == 0) {
        const int64_t m = d / 4;
        const int64_t rm = ((m % 4) + 4) % 4;
        if (rm != 2 && rm != 3) return false;
        auto sq = squarefree_decompose(std::llabs(m));
        return sq.root == 1;
    }
    return false;
}

int64_t fundamental_discriminant_of(int64_t u) {
    if (u < 1 || u % 2 == 0) throw domain_error("fundamental_discriminant_of: u must be odd positive");
    auto sq = squarefree_decompose(u);
    if (sq.core == 1) throw domain_error("fundamental_discriminant_of: u is a perfect square");
    return (sq.core % 4 == 1) ? sq.core : 4 * sq.core;
}

}  // namespace qtwist::arith
