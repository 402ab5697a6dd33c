#include "qtwist/gauss.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist::gauss {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

int64_t mod_pos(int64_t a, int64_t m) {
    int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

CharacterMod CharacterMod::kronecker_top(int64_t m) {
    if (m == 0) throw domain_error("CharacterMod: kronecker top must be nonzero");
    const int64_t a = std::llabs(m);
    const int64_t r = mod_pos(m, 4);
    const int64_t modulus = (r == 0 || r == 1) ? a : 4 * a;
    return CharacterMod(Kind::KroneckerTop, m, modulus);
}

CharacterMod CharacterMod::jacobi_bottom(int64_t n) {
    if (n < 1 || n % 2 == 0) throw domain_error("CharacterMod: jacobi bottom must be odd positive");
    return CharacterMod(Kind::JacobiBottom, n, n);
}

CharacterMod CharacterMod::auxiliary(int j) {
    if (j == 0) return CharacterMod(Kind::Auxiliary, 0, 1);
    if (j < -2 || j > 2) throw domain_error("CharacterMod: auxiliary index must be in {0,+-1,+-2}");
    return CharacterMod(Kind::Auxiliary, j, 4 * std::abs(j));
}

int CharacterMod::operator()(int64_t x) const {
    switch (kind_) {
        case Kind::KroneckerTop:
            return arith::kronecker(param_, x);
        case Kind::JacobiBottom:
            return arith::chi_bottom(param_, x);
        case Kind::Auxiliary:
            if (param_ == 0) return 1;
            return arith::kronecker(4 * param_, x);
    }
    return 0;
}

bool CharacterMod::is_even() const {
    return (*this)(-1) == 1;
}

cdouble tau_sum(const CharacterMod& chi, int64_t q) {
    const int64_t n = chi.modulus();
    if (n == 1) return 1.0;
    KahanSum<cdouble> acc;
    for (int64_t j = 0; j < n; ++j) {
        const int cj = chi(j);
        if (cj == 0) continue;
        // e(jq/n) with the argument reduced exactly mod n before exponentiating
        const int64_t r = mod_pos(j % n * (q % n), n);
        const double theta = kTwoPi * static_cast<double>(r) / static_cast<double>(n);
        acc.add(static_cast<double>(cj) * cdouble(std::cos(theta), std::sin(theta)));
    }
    return acc.value();
}

cdouble G_def(int64_t n, int64_t q) {
    if (n < 1 || n % 2 == 0) throw domain_error("G_def: n must be odd positive");
    const cdouble t = tau_sum(CharacterMod::jacobi_bottom(n), q);
    const double eps = static_cast<double>(arith::kronecker(-1, n));
    const cdouble pref = cdouble(0.5, -0.5) + eps * cdouble(0.5, 0.5);
    return pref * t;
}

cdouble G_fast(int64_t n, int64_t q) {
    if (n < 1 || n % 2 == 0) throw domain_error("G_fast: n must be odd positive");
    if (q < 0) throw domain_error("G_fast: q must be >= 0");
    if (n == 1) return 1.0;
    auto f = arith::factorize(n);
    double out = 1.0;
    for (auto [p, k] : f.factors) {
        int a;  // p-adic valuation of q; q = 0 counts as infinite
        int64_t q_odd = q;
        if (q == 0) {
            a = k + 2;  // effectively infinity for the case split
        } else {
            a = 0;
            while (q_odd % p == 0) { q_odd /= p; ++a; }
        }
        double local;
        if (k <= a) {
            if (k % 2 == 0) {
                double phi = 1.0;  // phi(p^k) = p^k - p^{k-1}
                for (int i = 0; i < k - 1; ++i) phi *= static_cast<double>(p);
                local = phi * (static_cast<double>(p) - 1.0);
            } else {
                local = 0.0;
            }
        } else if (k == a + 1) {
            double pa = 1.0;
            for (int i = 0; i < a; ++i) pa *= static_cast<double>(p);
            if (k % 2 == 0) {
                local = -pa;
            } else {
                const int leg = arith::kronecker(q_odd, p);
                local = static_cast<double>(leg) * pa * std::sqrt(static_cast<double>(p));
            }
        } else {
            local = 0.0;
        }
        if (local == 0.0) return 0.0;
        out *= local;
    }
    return out;
}

cdouble tau_bottom_fast(int64_t l, int64_t q) {
    // tau(chi_l, -q) = chi_l(-1) tau(chi_l, q)
    double sign = 1.0;
    if (q < 0) {
        q = -q;
        sign = static_cast<double>(arith::kronecker(-1, l));
    }
    // G(chi_l, q) = tau for l = 1 (mod 4), -i tau for l = 3 (mod 4)
    const cdouble g = G_fast(l, q);
    return sign * ((l % 4 == 1) ? g : cdouble(0.0, 1.0) * g);
}

cdouble tau_4l_from_tau_l(int64_t l, int64_t q) {
    if (l < 1 || l % 2 == 0) throw domain_error("tau_4l_from_tau_l: l must be odd positive");
    const int64_t qm4 = mod_pos(q, 4);
    if (l % 4 == 1) {
        if (qm4 % 2 == 1) return 0.0;
        const cdouble t = tau_bottom_fast(l, q);
        return (qm4 == 2 ? -2.0 : 2.0) * t;
    }
    if (qm4 == 0 || qm4 == 2) return 0.0;
    const cdouble t = tau_bottom_fast(l, q);
    return (qm4 == 1 ? cdouble(0.0, -2.0) : cdouble(0.0, 2.0)) * t;
}

KSeriesResult K_series(cdouble s, const CharacterMod& chi, int64_t q_max) {
    if (s.real() <= 1.5) throw domain_error("K_series: requires Re(s) > 3/2");
    if (q_max < 1) throw domain_error("K_series: q_max must be >= 1");
    const int64_t n = chi.modulus();
    {
        auto sq = arith::squarefree_decompose(n);
        if (sq.core == 1) throw domain_error("K_series: modulus must not be a perfect square");
    }
    if (!chi.is_even()) throw domain_error("K_series: character must be even");

    // fixed character and root-of-unity tables; each tau is then O(n) MACs
    std::vector<int> chi_table(n);
    for (int64_t j = 0; j < n; ++j) chi_table[j] = chi(j);
    std::vector<cdouble> roots(n);
    for (int64_t r = 0; r < n; ++r) {
        const double theta = kTwoPi * static_cast<double>(r) / static_cast<double>(n);
        roots[r] = cdouble(std::cos(theta), std::sin(theta));
    }

    KahanSum<cdouble> acc;
    for (int64_t q = 1; q <= q_max; ++q) {
        KahanSum<cdouble> tau;
        for (int64_t j = 0; j < n; ++j) {
            if (chi_table[j] == 0) continue;
            tau.add(static_cast<double>(chi_table[j]) * roots[j * (q % n) % n]);
        }
        acc.add(tau.value() * std::pow(static_cast<double>(q), -s));
    }

    const double sigma = s.real();
    KSeriesResult out;
    out.value = acc.value();
    out.tail_bound = static_cast<double>(n) * std::pow(static_cast<double>(q_max), 1.0 - sigma) / (sigma - 1.0);
    out.terms = q_max;
    return out;
}

}  // namespace qtwist::gauss
