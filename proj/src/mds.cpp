#include "qtwist/mds.hpp"

#include <algorithm>
#include <cmath>

#include "qtwist/arith.hpp"
#include "qtwist/gammazeta.hpp"

namespace qtwist::mds {

namespace {

constexpr double kTwo = 2.0;

cdouble cpow(double base, cdouble e) { return std::pow(base, e); }

bool odd_square(int64_t n) {
    if (n % 2 == 0) return false;
    const int64_t r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
    for (int64_t s = std::max<int64_t>(0, r - 1); s <= r + 1; ++s)
        if (s * s == n) return true;
    return false;
}

// a_s(n) = prod_{p | n} (1 - p^{-s})
cdouble a_mult(cdouble s, int64_t n) {
    cdouble out = 1.0;
    for (auto [p, e] : arith::factorize(n).factors) out *= 1.0 - cpow(static_cast<double>(p), -s);
    return out;
}

std::vector<int64_t> divisors_of(int64_t n) {
    std::vector<int64_t> divs{1};
    for (auto [p, e] : arith::factorize(n).factors) {
        const size_t base = divs.size();
        int64_t pk = 1;
        for (int i = 1; i <= e; ++i) {
            pk *= p;
            for (size_t j = 0; j < base; ++j) divs.push_back(divs[j] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

// residual exponent floor for the accelerated P product
double p_residual_exponent(cdouble s, cdouble w, cdouble z) {
    const double sr = s.real(), wr = w.real(), zr = z.real();
    double e = 2.0 * wr + sr;
    e = std::min(e, 2.0 * zr + sr);
    e = std::min(e, wr + zr + sr);
    e = std::min(e, 4.0 * wr);
    e = std::min(e, 4.0 * zr);
    e = std::min(e, 2.0 * (wr + zr));
    e = std::min(e, 3.0 * wr + zr);
    return e;
}

double p_tail_bound(double e_star, int64_t cutoff) {
    // sum_{p > P} p^{-e} <= P^{1-e} / ((e-1) ln P), padded
    const double P = static_cast<double>(cutoff);
    return 40.0 * 1.3 * std::pow(P, 1.0 - e_star) / ((e_star - 1.0) * std::log(P));
}

}  // namespace

bool ShiftTriple::in_S0(double margin) const {
    return s.real() > 1.0 + margin && (s + 2.0 * w).real() > 2.0 + margin && z.real() > 0.5 + margin;
}

bool ShiftTriple::in_S3(double margin) const {
    const double m = 1.0 + margin;
    return (2.0 * z).real() > m && (s + 2.0 * z).real() > m && (s + 2.0 * w).real() > m &&
           (w + z).real() > m && (4.0 * w).real() > m && (s + w + z).real() > m;
}

cdouble P_local_factor(cdouble s, cdouble w, cdouble z, double lambda_p, double p) {
    const cdouble xs = cpow(p, -s);
    const cdouble x2w = cpow(p, -2.0 * w);
    const cdouble x2z = cpow(p, -2.0 * z);
    const cdouble l2 = lambda_p * lambda_p;
    return 1.0 + x2z * (1.0 - xs) * (1.0 + x2w) + (1.0 - xs) * x2w - (l2 - 2.0) * x2w * xs +
           x2w * x2w * xs - (1.0 - xs) * l2 * cpow(p, -(z + w));
}

EulerProductResult P_product(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t prime_cutoff,
                             const TruncationPolicy& pol) {
    if (!ShiftTriple{s, w, z}.in_S3(0.01))
        throw domain_error("P_product: (s,w,z) outside S3 (margin 0.01)");
    if (prime_cutoff < 3) throw domain_error("P_product: prime cutoff too small");

    const cdouble v = w + z;
    // prefactor: (1 - 2^{-s}) zeta^{(2)}(2z) / (L^{(2)}(v, sym2 f) zeta^{(2)}(v))
    const cdouble pref = (1.0 - cpow(kTwo, -s)) * lfun::zeta2(2.0 * z, pol) /
                         (lfun::sym2_L2(v, f, pol) * lfun::zeta2(v, pol));

    cdouble prod = 1.0;
    int64_t used = 0;
    for (int64_t p : arith::prime_table()) {
        if (p > prime_cutoff) break;
        if (p == 2) continue;
        const double pd = static_cast<double>(p);
        const double lp = f.lambda(static_cast<uint64_t>(p));
        const cdouble merged = (1.0 - cpow(pd, -2.0 * w)) * P_local_factor(s, w, z, lp, pd);
        const cdouble xv = cpow(pd, -v);
        const double lam2 = lp * lp - 1.0;  // lambda(p^2) = lambda(p)^2 - 1
        const cdouble sym2_inv_local = 1.0 - lam2 * xv + lam2 * xv * xv - xv * xv * xv;
        const cdouble r_p = merged * (1.0 - cpow(pd, -2.0 * z)) / (sym2_inv_local * (1.0 - xv));
        prod *= r_p;
        ++used;
    }

    EulerProductResult out;
    out.value = pref * prod;
    out.primes_used = used;
    const double e_star = p_residual_exponent(s, w, z);
    out.tail_estimate = std::abs(out.value) * p_tail_bound(e_star, prime_cutoff);
    return out;
}

cdouble A1_residue(cdouble w, cdouble z, const HeckeEigenform& f, const TruncationPolicy& pol) {
    const auto P = P_product(1.0, w, z, f, 300'000, pol);
    return lfun::sym2_L2(2.0 * w, f, pol) * P.value;
}

cdouble A1_closed(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, const TruncationPolicy& pol) {
    if (std::abs(s - 1.0) < 1e-10)
        throw pole_error("A1_closed: pole at s = 1", A1_residue(w, z, f, pol));
    const auto P = P_product(s, w, z, f, 300'000, pol);
    return lfun::zeta(s, pol) * lfun::sym2_L2(2.0 * w, f, pol) * P.value;
}

cdouble A1_brute(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t M,
                 const TruncationPolicy& pol) {
    if (w.real() <= 1.1 || z.real() <= 1.1)
        throw domain_error("A1_brute: requires Re(w), Re(z) > 1.1");
    KahanSum<cdouble> acc;
    for (int64_t root = 1; root * root <= M; root += 2) {
        const int64_t l = root * root;  // odd perfect squares mk = l
        const cdouble as = a_mult(s, l);
        for (int64_t m : divisors_of(l)) {
            const int64_t k = l / m;
            const double cf = f.c(static_cast<uint64_t>(k));
            if (cf == 0.0) continue;
            acc.add(f.lambda(static_cast<uint64_t>(m)) * cf * as * cpow(static_cast<double>(m), -w) *
                    cpow(static_cast<double>(k), -z));
        }
    }
    return lfun::zeta2(s, pol) * acc.value();
}

cdouble A_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t N,
                 const TruncationPolicy& pol, int workers) {
    if (!ShiftTriple{s, w, z}.in_S0(0.0))
        throw domain_error("A_direct: (s,w,z) outside S0");
    const uint64_t count = static_cast<uint64_t>((N + 1) / 2);  // n = 2i+1
    return sum_chunked(0, count, workers, 16, [&](uint64_t i) -> cdouble {
        const int64_t n = 2 * static_cast<int64_t>(i) + 1;
        const cdouble num = lfun::L2_twist(w, f, n, pol);
        const cdouble den = lfun::L2_twist(z, f, n, pol);
        if (std::abs(den) < 1e-10)
            throw singularity_error("A_direct: denominator below 1e-10 at n = " + std::to_string(n),
                                    static_cast<uint64_t>(n));
        return num / den * cpow(static_cast<double>(n), -s);
    });
}

namespace {

double a2_theta(double sigma) {
    if (sigma >= 1.0) return 0.0;
    if (sigma >= 0.0) return 0.5 * (1.0 - sigma);
    return 0.5 - sigma;
}

}  // namespace

cdouble A2_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t M,
                  const TruncationPolicy& pol) {
    const double need = 1.05 + a2_theta(s.real());
    if (w.real() < need || z.real() < need)
        throw domain_error("A2_direct: requires Re(w), Re(z) >= " + std::to_string(need) +
                           " for this Re(s)");
    KahanSum<cdouble> acc;
    for (int64_t u = 1; u <= M; u += 2) {
        if (odd_square(u)) continue;
        // L(s, chi^{(4u)}) through the fundamental discriminant
        const int64_t dstar = arith::fundamental_discriminant_of(u);
        cdouble lval = lfun::quad_dirichlet_L(s, dstar, pol);
        auto fac = arith::factorize(2 * u);
        for (auto [p, e] : fac.factors) {
            if (dstar % p == 0) continue;
            lval *= 1.0 - static_cast<double>(arith::kronecker(dstar, p)) * cpow(static_cast<double>(p), -s);
        }
        KahanSum<cdouble> inner;
        for (int64_t m : divisors_of(u)) {
            const int64_t k = u / m;
            const double cf = f.c(static_cast<uint64_t>(k));
            if (cf == 0.0) continue;
            inner.add(f.lambda(static_cast<uint64_t>(m)) * cf * cpow(static_cast<double>(m), -w) *
                      cpow(static_cast<double>(k), -z));
        }
        acc.add(lval * inner.value());
    }
    return acc.value();
}

cdouble C_direct(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t l_max, int64_t q_max) {
    if (s.real() < 2.0 || w.real() < 2.0 || z.real() < 2.0)
        throw domain_error("C_direct: requires Re(s), Re(w), Re(z) >= 2");
    const cdouble t = z - w;
    KahanSum<cdouble> acc;
    for (int64_t l = 1; l <= l_max; l += 2) {
        if (odd_square(l)) continue;
        const cdouble r = f.r_coeff(static_cast<uint64_t>(l), t);
        if (std::abs(r) < 1e-300) continue;
        const cdouble lw = cpow(static_cast<double>(l), -w);
        for (int64_t q = 1; q <= q_max; ++q) {
            const cdouble tau = gauss::tau_4l_from_tau_l(l, q);
            if (tau == cdouble(0.0, 0.0)) continue;
            acc.add(tau * r * lw * cpow(static_cast<double>(q), -s));
        }
    }
    return acc.value();
}

cdouble C1_twisted(cdouble s, cdouble w, cdouble z, const gauss::CharacterMod& psi,
                   const gauss::CharacterMod& psi_prime, const HeckeEigenform& f, int64_t l_max,
                   int64_t q_max) {
    const cdouble t = z - w;
    KahanSum<cdouble> acc;
    for (int64_t l = 1; l <= l_max; ++l) {
        const int pl = psi(l);
        if (pl == 0) continue;
        const cdouble r = f.r_coeff(static_cast<uint64_t>(l), t);
        if (std::abs(r) < 1e-300) continue;
        const cdouble lw = static_cast<double>(pl) * r * cpow(static_cast<double>(l), -w);
        for (int64_t q = 1; q <= q_max; ++q) {
            const int pq = psi_prime(q);
            if (pq == 0) continue;
            const cdouble g = gauss::G_fast(l, q);
            if (g == cdouble(0.0, 0.0)) continue;
            acc.add(static_cast<double>(pq) * g * lw * cpow(static_cast<double>(q), -s));
        }
    }
    return acc.value();
}

cdouble C2_twisted(cdouble s, cdouble w, cdouble z, const gauss::CharacterMod& psi,
                   const gauss::CharacterMod& psi_prime, const HeckeEigenform& f, int64_t l_max,
                   int64_t q_max) {
    const cdouble t = z - w;
    KahanSum<cdouble> acc;
    for (int64_t j = 1; j * j <= l_max; ++j) {
        const int pj = psi(j);
        if (pj == 0) continue;
        const int64_t l = j * j;
        const cdouble r = f.r_coeff(static_cast<uint64_t>(l), t);
        const cdouble pref = static_cast<double>(pj) * r * cpow(static_cast<double>(j), -2.0 * w);
        for (int64_t q = 1; q <= q_max; ++q) {
            const int pq = psi_prime(q);
            if (pq == 0) continue;
            const cdouble g = gauss::G_fast(l, q);
            if (g == cdouble(0.0, 0.0)) continue;
            acc.add(static_cast<double>(pq) * g * pref * cpow(static_cast<double>(q), -s));
        }
    }
    return acc.value();
}

cdouble C_assembled(cdouble s, cdouble w, cdouble z, const HeckeEigenform& f, int64_t l_max, int64_t q_max) {
    if (q_max % 4 != 0) throw domain_error("C_assembled: q_max must be divisible by 4");
    using gauss::CharacterMod;
    const auto psi0 = CharacterMod::auxiliary(0);
    const auto psi1 = CharacterMod::auxiliary(1);
    const auto psim1 = CharacterMod::auxiliary(-1);
    const auto psi2 = CharacterMod::auxiliary(2);
    const auto psim2 = CharacterMod::auxiliary(-2);

    const cdouble two_s = cpow(2.0, -s);
    const cdouble four_s = two_s * two_s;

    // the q -> 2q and q -> 4q substitutions shrink the matching q-cutoffs
    const cdouble c1 = -two_s * (C1_twisted(s, w, z, psi2, psi1, f, l_max, q_max / 2) +
                                 C1_twisted(s, w, z, psim2, psi1, f, l_max, q_max / 2)) +
                       four_s * (C1_twisted(s, w, z, psi1, psi0, f, l_max, q_max / 4) +
                                 C1_twisted(s, w, z, psim1, psi0, f, l_max, q_max / 4)) +
                       C1_twisted(s, w, z, psi1, psim1, f, l_max, q_max) -
                       C1_twisted(s, w, z, psim1, psim1, f, l_max, q_max);

    const cdouble c2 = -2.0 * two_s * C2_twisted(s, w, z, psi1, psi1, f, l_max, q_max / 2) +
                       2.0 * four_s * C2_twisted(s, w, z, psi1, psi0, f, l_max, q_max / 4);

    return c1 - c2;
}

namespace {

// G(chi_{p^k}, q) for odd prime p given a = v_p(q) and the Legendre symbol
// (q p^{-a} | p); avoids materializing huge q.
double G_prime_power(int64_t p, int k, int a, int legendre_qodd) {
    if (k == 0) return 1.0;
    if (k <= a) {
        if (k % 2) return 0.0;
        double phi = static_cast<double>(p) - 1.0;
        for (int i = 0; i < k - 1; ++i) phi *= static_cast<double>(p);
        return phi;
    }
    if (k == a + 1) {
        double pa = 1.0;
        for (int i = 0; i < a; ++i) pa *= static_cast<double>(p);
        if (k % 2 == 0) return -pa;
        return static_cast<double>(legendre_qodd) * pa * std::sqrt(static_cast<double>(p));
    }
    return 0.0;
}

}  // namespace

cdouble D1_local_lsum(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                      cdouble w, cdouble t) {
    if (p < 3 || !arith::is_prime(p)) throw domain_error("D1_local_lsum: p must be an odd prime");
    if (q1 < 1 || q1 % 2 == 0) throw domain_error("D1_local_lsum: q1 must be odd positive");
    int a = 0;
    int64_t qodd = q1;
    while (qodd % p == 0) { qodd /= p; ++a; }
    const int leg = arith::kronecker(qodd, p);

    const int psi_p = psi(p);
    KahanSum<cdouble> acc;
    for (int l = 0; l <= a + 1; ++l) {
        const int psival = l == 0 ? 1 : (psi_p == 0 ? 0 : (l % 2 ? psi_p : 1));
        const double g = G_prime_power(p, l, a, leg);
        if (psival != 0 && g != 0.0)
            acc.add(static_cast<double>(psival) * g * f.r_prime_power(p, l, t) *
                    cpow(static_cast<double>(p), -w * static_cast<double>(l)));
    }
    return acc.value();
}

cdouble D1_local_closed(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                        cdouble w, cdouble t) {
    if (p < 3 || !arith::is_prime(p)) throw domain_error("D1_local_closed: p must be an odd prime");
    const double pd = static_cast<double>(p);
    const cdouble pt = cpow(pd, -t);
    if (q1 % p != 0) {
        // 1 + psi(p) (q1|p) lambda(p) (1 - p^{-t}) p^{-(w - 1/2)}
        const double chi = static_cast<double>(psi(p) * arith::kronecker(q1, p));
        return 1.0 + chi * f.lambda(static_cast<uint64_t>(p)) * (1.0 - pt) * cpow(pd, 0.5 - w);
    }
    // 1 - psi(p^2) p^{1-2w} (lambda(p^2) - lambda(p)^2 p^{-t} + p^{-2t})
    const double lp = f.lambda(static_cast<uint64_t>(p));
    const double lp2 = lp * lp - 1.0;
    const double psi2 = psi(p) == 0 ? 0.0 : 1.0;  // psi(p^2) for the quadratic psi
    return 1.0 - psi2 * cpow(pd, 1.0 - 2.0 * w) * (lp2 - lp * lp * pt + pt * pt);
}

DLocalResult D1_full_local(const HeckeEigenform& f, int64_t p, int64_t q1, const gauss::CharacterMod& psi,
                           const gauss::CharacterMod& psi_prime, cdouble s, cdouble w, cdouble t, int K) {
    if (K < 1) throw domain_error("D1_full_local: K must be >= 1");
    DLocalResult out;
    if (p == 2) {
        // sum_l psi'(2^{2l}) 2^{-2ls}
        if (psi_prime.modulus() == 1) {
            if (s.real() <= 0.0) throw domain_error("D1_full_local: p = 2 branch needs Re(s) > 0");
            out.value = 1.0 / (1.0 - cpow(2.0, -2.0 * s));
        } else {
            out.value = 1.0;  // psi'(2^{2l}) = 0 for l >= 1 when the conductor is even
        }
        return out;
    }
    if (s.real() <= 0.5 || w.real() <= 1.0 || (w + t).real() <= 1.0)
        throw domain_error("D1_full_local: requires Re(s) > 1/2, Re(w) > 1, Re(w+t) > 1");

    int a0 = 0;
    int64_t qodd = q1;
    while (qodd % p == 0) { qodd /= p; ++a0; }
    const int leg = arith::kronecker(qodd, p);
    const int psip2 = psi_prime(p) == 0 ? 0 : 1;  // psi'(p^{2k}) for k >= 1

    const int psi_p = psi(p);
    KahanSum<cdouble> acc;
    double prev_slice = 0.0, last_slice = 0.0;
    for (int k = 0; k <= K; ++k) {
        if (k >= 1 && psip2 == 0) break;
        const int a = a0 + 2 * k;
        KahanSum<cdouble> slice;
        for (int l = 0; l <= a + 1; ++l) {
            const int psival = l == 0 ? 1 : (psi_p == 0 ? 0 : (l % 2 ? psi_p : 1));
            // (q1 p^{2k} p^{-a'}|p) for the l = a+1 odd case equals (qodd|p)
            const double g = G_prime_power(p, l, a, leg);
            if (psival != 0 && g != 0.0)
                slice.add(static_cast<double>(psival) * g * f.r_prime_power(p, l, t) *
                          cpow(static_cast<double>(p), -w * static_cast<double>(l)));
        }
        const cdouble kfactor = cpow(static_cast<double>(p), -2.0 * s * static_cast<double>(k));
        acc.add(slice.value() * kfactor);
        prev_slice = last_slice;
        last_slice = std::abs(slice.value() * kfactor);
    }
    out.value = acc.value();
    if (last_slice > 0.0 && prev_slice > 0.0) {
        const double rho = std::min(0.9, last_slice / prev_slice);
        out.tail_estimate = last_slice * rho / (1.0 - rho);
    } else {
        out.tail_estimate = last_slice;
    }
    return out;
}

}  // namespace qtwist::mds
