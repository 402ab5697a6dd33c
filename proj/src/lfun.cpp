#include "qtwist/lfun.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "qtwist/arith.hpp"

namespace qtwist::lfun {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------
// AFE weight V_s(y).
//
// Single gamma factor Gamma(a s + b): V_s(y) = Q(a s + b, y^{1/a}) with Q
// the normalized upper incomplete gamma.  Products of gamma factors use a
// trapezoidal vertical-line quadrature whose nodes depend only on
// (gamma signature, s, contour); those are cached.
// ---------------------------------------------------------------------

struct QuadratureWeight {
    double sigma = 0.0;
    std::vector<double> t;       // node ordinates
    std::vector<cdouble> coeff;  // (h/2pi) * R(sigma+it) / (sigma+it)
};

cdouble gamma_product(const std::vector<GammaFactor>& gs, cdouble s) {
    cdouble out = 1.0;
    for (const auto& g : gs) out *= complex_gamma(g.scale * s + g.shift);
    return out;
}

void check_gamma_args(const std::vector<GammaFactor>& gs, cdouble s, const char* who) {
    for (const auto& g : gs) {
        const cdouble c = g.scale * s + g.shift;
        if (std::abs(c.imag()) < 1e-8 && c.real() < 0.5) {
            const double k = std::round(c.real());
            if (k <= 0.0 && std::abs(c.real() - k) < 1e-8)
                throw pole_error(std::string(who) + ": gamma factor pole at the evaluation point", cdouble(k, 0.0));
        }
    }
}

QuadratureWeight build_nodes(const std::vector<GammaFactor>& gs, cdouble s, double sigma, double h) {
    QuadratureWeight w;
    w.sigma = sigma;
    const cdouble gs_at_s = gamma_product(gs, s);
    const double scale = h / (2.0 * kPi);
    double peak = 0.0;
    int consecutive_small = 0;
    const int max_nodes = static_cast<int>(400.0 / h);
    for (int j = -max_nodes; j <= max_nodes; ++j) {
        const double t = h * static_cast<double>(j);
        const cdouble u(sigma, t);
        cdouble r;
        try {
            r = gamma_product(gs, s + u) / gs_at_s;
        } catch (const pole_error&) {
            throw pole_error("afe weight: gamma pole on the quadrature contour", 0.0);
        }
        const double mag = std::abs(r);
        if (mag > 1e280) throw pole_error("afe weight: contour passes too close to a gamma pole", 0.0);
        w.t.push_back(t);
        w.coeff.push_back(scale * r / u);
        peak = std::max(peak, mag);
    }
    // trim negligible wings
    const double cut = peak * 1e-19;
    size_t lo = 0, hi = w.t.size();
    while (lo + 1 < hi && std::abs(w.coeff[lo]) < cut * scale) ++lo;
    while (hi > lo + 1 && std::abs(w.coeff[hi - 1]) < cut * scale) --hi;
    w.t.assign(w.t.begin() + lo, w.t.begin() + hi);
    w.coeff.assign(w.coeff.begin() + lo, w.coeff.begin() + hi);
    (void)consecutive_small;
    return w;
}

struct WeightEvaluator {
    const CompletedLDescription* desc;
    cdouble s;
    bool single;
    cdouble c;        // a s + b for the single-gamma shape
    double inv_a;     // 1/a
    const QuadratureWeight* nodes = nullptr;

    cdouble operator()(double y) const {
        if (single) return upper_gamma_q(c, std::pow(y, inv_a));
        const double L = std::log(y);
        KahanSum<cdouble> acc;
        for (size_t j = 0; j < nodes->t.size(); ++j)
            acc.add(nodes->coeff[j] * std::exp(cdouble(0.0, -nodes->t[j] * L)));
        return std::pow(y, -nodes->sigma) * acc.value();
    }
};

std::mutex g_node_cache_mutex;
std::map<std::string, QuadratureWeight> g_node_cache;

std::string node_cache_key(const CompletedLDescription& desc, cdouble s, double sigma, double h) {
    std::ostringstream os;
    for (const auto& g : desc.gammas) os << g.scale << ',' << g.shift << ';';
    os.precision(17);
    os << '|' << s.real() << ',' << s.imag() << '|' << sigma << '|' << h;
    return os.str();
}

WeightEvaluator make_weight(const CompletedLDescription& desc, cdouble s, const TruncationPolicy& pol) {
    WeightEvaluator w;
    w.desc = &desc;
    w.s = s;
    w.single = desc.gammas.size() == 1;
    if (w.single) {
        const auto& g = desc.gammas[0];
        w.c = g.scale * s + g.shift;
        w.inv_a = 1.0 / g.scale;
        check_gamma_args(desc.gammas, s, "afe weight");
        return w;
    }
    // contour to the right of u = 0 and of the coefficient-series abscissa
    double sigma = std::max(2.5, 2.55 - s.real());
    const std::string key = node_cache_key(desc, s, sigma, pol.smoothing);
    {
        std::lock_guard<std::mutex> lock(g_node_cache_mutex);
        auto it = g_node_cache.find(key);
        if (it != g_node_cache.end()) {
            w.nodes = &it->second;
            return w;
        }
    }
    QuadratureWeight built;
    try {
        built = build_nodes(desc.gammas, s, sigma, pol.smoothing);
    } catch (const pole_error&) {
        // one contour-shift retry, then give up
        sigma += 0.37;
        built = build_nodes(desc.gammas, s, sigma, pol.smoothing);
    }
    std::lock_guard<std::mutex> lock(g_node_cache_mutex);
    auto [it, inserted] = g_node_cache.emplace(key, std::move(built));
    w.nodes = &it->second;
    return w;
}

// Rough AFE length for a single-gamma shape: solve
// x - (Re c - 1) ln x = ln(bound/tol) for the weight argument x.
uint64_t estimate_terms_single(const CompletedLDescription& desc, cdouble c, double tol) {
    const double target = std::log(std::max(desc.coeff_bound, 1.0) / tol) + 4.0;
    double x = std::max(6.0, target);
    for (int i = 0; i < 40; ++i) x = std::max(4.0, target + (c.real() - 1.0) * std::log(x));
    const double a = desc.gammas[0].scale;
    return static_cast<uint64_t>(desc.q_base * std::pow(x, a)) + 8;
}

// one AFE half-sum: sum_n a(n) n^{-sigma_s} V(n / Q)
cdouble afe_half_sum(const CompletedLDescription& desc, cdouble sexp, const WeightEvaluator& weight,
                     const TruncationPolicy& pol, uint64_t* terms_out) {
    const double q = desc.q_base;
    const double tol_exit = pol.tolerance / (64.0 * (1.0 + q));
    if (weight.single) {
        const uint64_t est = estimate_terms_single(desc, weight.c, tol_exit);
        if (desc.coeff_limit && est > desc.coeff_limit)
            throw table_exhausted(desc.name + ": coefficient table too short; need about n_max >= " +
                                      std::to_string(est),
                                  est);
    }

    KahanSum<cdouble> acc;
    int consecutive_small = 0;
    uint64_t n = 1;
    for (;; ++n) {
        if (n > pol.max_terms)
            throw table_exhausted(desc.name + ": afe sum exceeded max_terms", n);
        if (desc.coeff_limit && n > desc.coeff_limit)
            throw table_exhausted(desc.name + ": coefficient table exhausted; need n_max >= " +
                                      std::to_string(2 * desc.coeff_limit),
                                  2 * desc.coeff_limit);
        const cdouble v = weight(static_cast<double>(n) / q);
        const double envelope = std::abs(v) * std::pow(static_cast<double>(n), -sexp.real()) * desc.coeff_bound;
        if (envelope < tol_exit) {
            if (++consecutive_small >= 6) break;
        } else {
            consecutive_small = 0;
        }
        const double a_n = desc.coeff(n);
        if (a_n != 0.0) acc.add(a_n * std::pow(static_cast<double>(n), -sexp) * v);
    }
    if (terms_out) *terms_out = n;
    return acc.value();
}

}  // namespace

cdouble afe_value(const CompletedLDescription& desc, cdouble s, const TruncationPolicy& pol, EvalDiag* diag) {
    pol.validate();
    if (s.real() < kStripLo || s.real() > kStripHi)
        throw domain_error(desc.name + ": s outside the validated strip [-3, 4]");
    check_gamma_args(desc.gammas, s, desc.name.c_str());
    check_gamma_args(desc.gammas, 1.0 - s, desc.name.c_str());

    const cdouble gamma_ratio = gamma_product(desc.gammas, 1.0 - s) / gamma_product(desc.gammas, s);
    const WeightEvaluator w_main = make_weight(desc, s, pol);
    const WeightEvaluator w_dual = make_weight(desc, 1.0 - s, pol);

    EvalDiag d;
    const cdouble sum_main = afe_half_sum(desc, s, w_main, pol, &d.terms_main);
    const cdouble sum_dual = afe_half_sum(desc, 1.0 - s, w_dual, pol, &d.terms_dual);
    d.tail_estimate = pol.tolerance;
    if (diag) *diag = d;

    return sum_main + desc.root_number * std::pow(desc.q_base, 1.0 - 2.0 * s) * gamma_ratio * sum_dual;
}

cdouble completed_value(const CompletedLDescription& desc, cdouble s, const TruncationPolicy& pol) {
    return std::pow(desc.q_base, s) * gamma_product(desc.gammas, s) * afe_value(desc, s, pol);
}

CompletedLDescription describe_quad_dirichlet(int64_t d) {
    if (d == 1 || !arith::is_fundamental_discriminant(d))
        throw domain_error("describe_quad_dirichlet: d must be a fundamental discriminant != 1");
    CompletedLDescription desc;
    desc.name = "L(s, chi^(" + std::to_string(d) + "))";
    desc.coeff = [d](uint64_t n) { return static_cast<double>(arith::kronecker(d, static_cast<int64_t>(n))); };
    const double parity = d < 0 ? 1.0 : 0.0;
    desc.gammas = {GammaFactor{0.5, 0.5 * parity}};
    desc.q_base = std::sqrt(static_cast<double>(std::llabs(d)) / kPi);
    desc.root_number = 1.0;
    desc.coeff_limit = 0;  // generated on demand
    desc.coeff_bound = 1.0;
    return desc;
}

CompletedLDescription describe_modular_twist(const modform::HeckeEigenform& f, int64_t d) {
    if (d != 1 && !arith::is_fundamental_discriminant(d))
        throw domain_error("describe_modular_twist: d must be fundamental or 1");
    CompletedLDescription desc;
    desc.name = "L(s, f(x)chi^(" + std::to_string(d) + "))";
    desc.coeff = [&f, d](uint64_t n) {
        const int chi = arith::kronecker(d, static_cast<int64_t>(n));
        return chi == 0 ? 0.0 : static_cast<double>(chi) * f.lambda(n);
    };
    desc.gammas = {GammaFactor{1.0, 0.5 * (f.weight() - 1)}};
    desc.q_base = static_cast<double>(std::llabs(d)) / (2.0 * kPi);
    const double ik = (f.weight() / 2) % 2 == 0 ? 1.0 : -1.0;  // i^kappa for even kappa
    desc.root_number = ik * (d > 0 ? 1.0 : -1.0);
    desc.coeff_limit = f.n_max();
    desc.coeff_bound = 1024.0;
    return desc;
}

CompletedLDescription describe_sym2(const modform::HeckeEigenform& f) {
    CompletedLDescription desc;
    desc.name = "L(s, sym2 f)";
    desc.coeff = [&f](uint64_t n) { return f.sym2_coeff(n); };
    const double k = static_cast<double>(f.weight());
    desc.gammas = {GammaFactor{0.5, 0.5}, GammaFactor{0.5, 0.5 * (k - 1.0)}, GammaFactor{0.5, 0.5 * k}};
    desc.q_base = std::pow(kPi, -1.5);
    desc.root_number = 1.0;
    desc.coeff_limit = f.n_max();
    desc.coeff_bound = 4096.0;
    return desc;
}

cdouble quad_dirichlet_L(cdouble s, int64_t d, const TruncationPolicy& pol) {
    if (d == 1) return zeta(s, pol);
    return afe_value(describe_quad_dirichlet(d), s, pol);
}

cdouble modular_twist_L(cdouble s, const modform::HeckeEigenform& f, int64_t d, const TruncationPolicy& pol) {
    return afe_value(describe_modular_twist(f, d), s, pol);
}

cdouble sym2_L(cdouble s, const modform::HeckeEigenform& f, const TruncationPolicy& pol) {
    return afe_value(describe_sym2(f), s, pol);
}

cdouble sym2_L2(cdouble s, const modform::HeckeEigenform& f, const TruncationPolicy& pol) {
    // multiply by the inverse local factor at 2:
    // (1 - lambda(4) 2^{-s} + lambda(4) 2^{-2s} - 2^{-3s})
    const double l4 = f.lambda(4);
    const cdouble x = std::pow(2.0, -s);
    return sym2_L(s, f, pol) * (1.0 - l4 * x + l4 * x * x - x * x * x);
}

cdouble euler_factor_modular(const modform::HeckeEigenform& f, int64_t p, int chi_value, cdouble s,
                             bool inverse) {
    if (!arith::is_prime(p)) throw domain_error("euler_factor_modular: p must be prime");
    if (chi_value < -1 || chi_value > 1) throw domain_error("euler_factor_modular: chi must be in {-1,0,1}");
    const double chi = static_cast<double>(chi_value);
    const cdouble ps = std::pow(static_cast<double>(p), -s);
    const cdouble e = 1.0 - f.lambda(static_cast<uint64_t>(p)) * chi * ps + chi * chi * ps * ps;
    if (inverse) return e;
    if (std::abs(e) < 1e-14)
        throw singularity_error("euler_factor_modular: vanishing local factor", static_cast<uint64_t>(p));
    return 1.0 / e;
}

cdouble L2_twist(cdouble s, const modform::HeckeEigenform& f, int64_t n, const TruncationPolicy& pol) {
    if (n < 1 || n % 2 == 0) throw domain_error("L2_twist: n must be odd and positive");
    const auto ind = arith::inducing_discriminant(n);
    cdouble out = modular_twist_L(s, f, ind.d, pol);
    // remove the Euler factor at 2, then at every prime of the square part
    // that does not divide the core
    out *= euler_factor_modular(f, 2, arith::kronecker(ind.d, 2), s, /*inverse=*/true);
    const auto fac = arith::factorize(n);
    const int64_t core = std::llabs(ind.d);
    for (auto [p, e] : fac.factors) {
        if (e < 2) continue;
        if (core % p == 0 && ind.d != 1) continue;
        out *= euler_factor_modular(f, p, arith::kronecker(ind.d, p), s, /*inverse=*/true);
    }
    return out;
}

}  // namespace qtwist::lfun
