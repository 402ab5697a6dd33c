#include "qtwist/gammazeta.hpp"

#include <cmath>

namespace qtwist::lfun {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set); relative
// error ~1e-15 on the half-plane Re z > 1/2.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
};

cdouble lanczos_right(cdouble z) {
    // valid for Re z >= 0.5; z shifted so the series is A(z-1)
    cdouble zm1 = z - 1.0;
    cdouble a = kLanczosC[0];
    for (int k = 1; k < 15; ++k) a += kLanczosC[k] / (zm1 + static_cast<double>(k));
    cdouble t = zm1 + kLanczosG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, zm1 + 0.5) * std::exp(-t) * a;
}

}  // namespace

cdouble complex_gamma(cdouble z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw pole_error("complex_gamma: pole at nonpositive integer", cdouble(z.real(), 0.0));
    if (z.real() >= 0.5) return lanczos_right(z);
    // reflection: Gamma(z) = pi / (sin(pi z) * Gamma(1-z))
    cdouble s = std::sin(kPi * z);
    if (std::abs(s) < 1e-290)
        throw pole_error("complex_gamma: pole at nonpositive integer", cdouble(std::round(z.real()), 0.0));
    return kPi / (s * lanczos_right(1.0 - z));
}

cdouble upper_gamma_q(cdouble c, double x) {
    if (x < 0.0) throw domain_error("upper_gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;

    const double split = std::abs(c) + 1.0;
    if (x < split) {
        // lower series: gamma(c,x) = x^c e^{-x} sum_k x^k / (c (c+1) ... (c+k))
        cdouble term = 1.0 / c;
        KahanSum<cdouble> sum;
        sum.add(term);
        for (int k = 1; k < 2000; ++k) {
            term *= x / (c + static_cast<double>(k));
            sum.add(term);
            if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum.value()))) break;
        }
        cdouble p = std::exp(c * std::log(x) - x) * sum.value() / complex_gamma(c);
        return 1.0 - p;
    }

    // Lentz continued fraction for Gamma(c, x) = e^{-x} x^c * CF
    const double tiny = 1e-300;
    cdouble b = x + 1.0 - c;
    cdouble C = 1.0 / tiny;
    cdouble D = (std::abs(b) > 0 ? 1.0 / b : 1.0 / tiny);
    cdouble h = D;
    for (int i = 1; i <= 2000; ++i) {
        cdouble an = -static_cast<double>(i) * (static_cast<double>(i) - c);
        b += 2.0;
        D = an * D + b;
        if (std::abs(D) < tiny) D = tiny;
        C = b + an / C;
        if (std::abs(C) < tiny) C = tiny;
        D = 1.0 / D;
        cdouble delta = D * C;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(c * std::log(x) - x) * h / complex_gamma(c);
}

namespace {

// B_{2k} / (2k)! for the Euler-Maclaurin correction, k = 1..13.
constexpr double kB2kOver2kFact[] = {
    8.3333333333333333e-02,   // B2/2!
    -1.3888888888888889e-03,  // B4/4!
    3.3068783068783069e-05,
    -8.2671957671957672e-07,
    2.0876756987868099e-08,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
};

}  // namespace

cdouble zeta(cdouble s, const TruncationPolicy& pol) {
    pol.validate();
    if (std::abs(s - 1.0) < 1e-12)
        throw pole_error("zeta: pole at s = 1", 1.0);

    const int N = std::max(18, static_cast<int>(std::ceil(1.3 * std::abs(s.imag()) + 16.0)));
    KahanSum<cdouble> head;
    for (int n = 1; n < N; ++n) head.add(std::pow(static_cast<double>(n), -s));

    const double Nd = static_cast<double>(N);
    cdouble out = head.value();
    out += std::pow(Nd, 1.0 - s) / (s - 1.0);
    out += 0.5 * std::pow(Nd, -s);

    // Euler-Maclaurin tail: sum_k B_{2k}/(2k)! * (s)(s+1)...(s+2k-2) * N^{-s-2k+1}
    cdouble rising = s;  // (s)(s+1)...(s+2k-2), updated per k
    cdouble npow = std::pow(Nd, -s - 1.0);
    for (int k = 1; k <= 13; ++k) {
        out += kB2kOver2kFact[k - 1] * rising * npow;
        rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
        npow /= Nd * Nd;
    }
    return out;
}

cdouble zeta2(cdouble s, const TruncationPolicy& pol) {
    return zeta(s, pol) * (1.0 - std::pow(2.0, -s));
}

}  // namespace qtwist::lfun
