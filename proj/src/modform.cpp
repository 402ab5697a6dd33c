#include "qtwist/modform.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>

#include "qtwist/arith.hpp"

namespace qtwist::modform {

namespace {

// Keep intermediate eta-power coefficients clear of __int128 overflow.
// |tau(n)| <= d(n) n^{11/2}; at n = 10^6 that is ~2.4e35 against a 1.7e38
// ceiling, so 2e6 is a hard upper bound for the integer stage.
constexpr uint64_t kTauNMaxLimit = 2'000'000;

constexpr uint32_t kCacheVersion = 1;
constexpr char kCacheMagic[4] = {'T', 'A', 'U', 'C'};

uint64_t fnv1a(const unsigned char* data, size_t len) {
    uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

void put_u32(std::vector<unsigned char>& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
void put_u64(std::vector<unsigned char>& buf, uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

}  // namespace

std::vector<i128> expand_tau_table(uint64_t n_max) {
    if (n_max < 1) throw domain_error("expand_tau_table: n_max must be >= 1");
    if (n_max > kTauNMaxLimit)
        throw domain_error("expand_tau_table: n_max beyond the 128-bit integer stage (max 2e6)");

    // eta^3 = sum_{k>=0} (-1)^k (2k+1) q^{k(k+1)/2}  (Jacobi);
    // eta^24 = (eta^3)^8 by eight sparse convolutions.
    const uint64_t len = n_max;  // coefficients of q^0 .. q^{n_max-1}
    std::vector<std::pair<uint64_t, int64_t>> sparse;
    for (uint64_t k = 0;; ++k) {
        const uint64_t e = k * (k + 1) / 2;
        if (e >= len) break;
        sparse.emplace_back(e, (k % 2 ? -1 : 1) * static_cast<int64_t>(2 * k + 1));
    }

    std::vector<i128> cur(len, 0), next(len, 0);
    for (auto [e, c] : sparse) cur[e] = c;

    for (int pass = 1; pass < 8; ++pass) {
        std::fill(next.begin(), next.end(), i128(0));
        for (auto [e, c] : sparse) {
            const i128 cc = c;
            for (uint64_t i = e; i < len; ++i) next[i] += cc * cur[i - e];
        }
        cur.swap(next);
    }

    // tau(n) = coefficient of q^{n-1} in eta^24; shift into 1-based table.
    std::vector<i128> tau(n_max + 1, 0);
    constexpr i128 kGuard = i128(1) << 124;
    for (uint64_t n = 1; n <= n_max; ++n) {
        tau[n] = cur[n - 1];
        if (tau[n] > kGuard || tau[n] < -kGuard)
            throw domain_error("expand_tau_table: coefficient overflow guard tripped");
    }
    return tau;
}

bool write_tau_cache(const std::filesystem::path& file, const std::vector<i128>& tau) {
    const uint64_t n_max = tau.size() - 1;
    std::vector<unsigned char> payload;
    payload.reserve(16 * n_max);
    for (uint64_t n = 1; n <= n_max; ++n) {
        const i128 v = tau[n];
        const uint64_t lo = static_cast<uint64_t>(static_cast<unsigned __int128>(v));
        const uint64_t hi = static_cast<uint64_t>(static_cast<unsigned __int128>(v) >> 64);
        put_u64(payload, lo);
        put_u64(payload, hi);
    }
    std::vector<unsigned char> head;
    head.insert(head.end(), kCacheMagic, kCacheMagic + 4);
    put_u32(head, kCacheVersion);
    put_u64(head, n_max);

    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(reinterpret_cast<const char*>(head.data()), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    std::vector<unsigned char> sumbuf;
    put_u64(sumbuf, fnv1a(payload.data(), payload.size()));
    out.write(reinterpret_cast<const char*>(sumbuf.data()), 8);
    return static_cast<bool>(out);
}

bool read_tau_cache(const std::filesystem::path& file, uint64_t n_max, std::vector<i128>& out_tau) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return false;
    char magic[4];
    uint32_t version = 0;
    uint64_t stored_n = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&stored_n), 8);
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0 || version != kCacheVersion || stored_n != n_max)
        return false;

    std::vector<unsigned char> payload(16 * n_max);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    uint64_t stored_sum = 0;
    in.read(reinterpret_cast<char*>(&stored_sum), 8);
    if (!in) return false;
    if (fnv1a(payload.data(), payload.size()) != stored_sum) return false;

    out_tau.assign(n_max + 1, 0);
    for (uint64_t n = 1; n <= n_max; ++n) {
        uint64_t lo, hi;
        std::memcpy(&lo, payload.data() + 16 * (n - 1), 8);
        std::memcpy(&hi, payload.data() + 16 * (n - 1) + 8, 8);
        unsigned __int128 u = (static_cast<unsigned __int128>(hi) << 64) | lo;
        out_tau[n] = static_cast<i128>(u);
    }
    return true;
}

std::filesystem::path default_tau_cache_dir() {
    if (const char* env = std::getenv("QTWIST_CACHE_DIR"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path(".qtwist-cache");
}

HeckeEigenform build_delta_form(uint64_t n_max, const std::filesystem::path& cache_dir) {
    std::vector<i128> tau;
    std::filesystem::path file;
    if (!cache_dir.empty()) {
        file = cache_dir / ("tau_delta_" + std::to_string(n_max) + ".bin");
        if (!read_tau_cache(file, n_max, tau)) tau.clear();
    }
    if (tau.empty()) {
        tau = expand_tau_table(n_max);
        if (!file.empty()) write_tau_cache(file, tau);
    }

    std::vector<double> lambda(n_max + 1, 0.0);
    lambda[0] = 0.0;
    for (uint64_t n = 1; n <= n_max; ++n)
        lambda[n] = static_cast<double>(tau[n]) / std::pow(static_cast<double>(n), 5.5);
    return HeckeEigenform(12, "delta", std::move(lambda), std::move(tau));
}

HeckeEigenform::HeckeEigenform(int weight, std::string label, std::vector<double> lambda,
                               std::vector<i128> integer_coeffs)
    : weight_(weight), label_(std::move(label)), lambda_(std::move(lambda)), tau_(std::move(integer_coeffs)) {
    if (weight_ < 12 || weight_ % 2 != 0)
        throw domain_error("HeckeEigenform: weight must be an even integer >= 12");
    if (lambda_.size() < 2) throw domain_error("HeckeEigenform: empty coefficient table");
    n_max_ = lambda_.size() - 1;
    if (std::abs(lambda_[1] - 1.0) > 1e-12)
        throw domain_error("HeckeEigenform: lambda(1) must equal 1");
}

double HeckeEigenform::lambda(uint64_t n) const {
    if (n == 0) throw domain_error("lambda: n must be >= 1");
    if (n <= n_max_) return lambda_[n];
    auto f = arith::factorize(static_cast<int64_t>(n));
    double out = 1.0;
    for (auto [p, e] : f.factors) out *= lambda_prime_power(p, e);
    return out;
}

double HeckeEigenform::lambda_prime_power(int64_t p, int k) const {
    if (static_cast<uint64_t>(p) > n_max_)
        throw table_exhausted("lambda: prime beyond coefficient table; need n_max >= " + std::to_string(p),
                              static_cast<uint64_t>(p));
    const double lp = lambda_[static_cast<uint64_t>(p)];
    // lambda(p^{k+1}) = lambda(p) lambda(p^k) - lambda(p^{k-1})
    double prev = 1.0, curr = lp;
    if (k == 0) return 1.0;
    for (int i = 1; i < k; ++i) {
        const double nxt = lp * curr - prev;
        prev = curr;
        curr = nxt;
    }
    return curr;
}

double HeckeEigenform::c(uint64_t n) const {
    if (n == 0) throw domain_error("c: n must be >= 1");
    if (n == 1) return 1.0;
    auto f = arith::factorize(static_cast<int64_t>(n));
    double out = 1.0;
    for (auto [p, e] : f.factors) {
        if (e > 2) return 0.0;
        if (e == 1) out *= -lambda_prime_power(p, 1);
        // e == 2 contributes the factor 1
    }
    return out;
}

cdouble HeckeEigenform::r_prime_power(int64_t p, int k, cdouble t) const {
    if (k == 0) return 1.0;
    const cdouble pt = std::pow(static_cast<double>(p), -t);
    // r(p^k, t) = lambda(p^k) - lambda(p^{k-1}) lambda(p) p^{-t} + lambda(p^{k-2}) p^{-2t}
    cdouble loc = lambda_prime_power(p, k) - lambda_prime_power(p, k - 1) * lambda_prime_power(p, 1) * pt;
    if (k >= 2) loc += lambda_prime_power(p, k - 2) * pt * pt;
    return loc;
}

cdouble HeckeEigenform::r_coeff(uint64_t l, cdouble t) const {
    if (l == 0) throw domain_error("r_coeff: l must be >= 1");
    auto f = arith::factorize(static_cast<int64_t>(l));
    cdouble out = 1.0;
    for (auto [p, e] : f.factors) out *= r_prime_power(p, e, t);
    return out;
}

SatakePair HeckeEigenform::satake(uint64_t p) const {
    if (p > n_max_) throw domain_error("satake: prime beyond coefficient table");
    if (!arith::is_prime(static_cast<int64_t>(p))) throw domain_error("satake: p must be prime");
    const double lp = lambda_[p];
    const double disc = 1.0 - 0.25 * lp * lp;
    const double im = disc > 0.0 ? std::sqrt(disc) : 0.0;
    return SatakePair{cdouble(0.5 * lp, im), cdouble(0.5 * lp, -im)};
}

cdouble HeckeEigenform::even_powersum(uint64_t p, cdouble u) const {
    if (u.real() <= 0.0) throw domain_error("even_powersum: requires Re(u) > 0");
    const double lp = lambda(p);
    const cdouble x = std::pow(static_cast<double>(p), -u);
    // (1 - a1^2 x)(1 - a2^2 x) = 1 - (lambda^2 - 2) x + x^2
    return (1.0 + x) / (1.0 - (lp * lp - 2.0) * x + x * x);
}

cdouble HeckeEigenform::odd_powersum(uint64_t p, cdouble u) const {
    if (u.real() <= 0.0) throw domain_error("odd_powersum: requires Re(u) > 0");
    const double lp = lambda(p);
    const cdouble x = std::pow(static_cast<double>(p), -u);
    return lp * x / (1.0 - (lp * lp - 2.0) * x + x * x);
}

double HeckeEigenform::sym2_coeff(uint64_t n) const {
    if (n == 0) throw domain_error("sym2_coeff: n must be >= 1");
    double out = 0.0;
    for (uint64_t d = 1; d * d <= n; ++d) {
        if (n % (d * d)) continue;
        const uint64_t m = n / (d * d);
        // lambda(m^2) through the prime-power recursion (m^2 may exceed the table)
        auto f = arith::factorize(static_cast<int64_t>(m));
        double lam = 1.0;
        for (auto [p, e] : f.factors) lam *= lambda_prime_power(p, 2 * e);
        out += lam;
    }
    return out;
}

i128 HeckeEigenform::integer_coeff(uint64_t n) const {
    if (tau_.empty()) throw domain_error("integer_coeff: no integer table for this form");
    if (n == 0 || n >= tau_.size()) throw table_exhausted("integer_coeff: n beyond table", n);
    return tau_[n];
}

}  // namespace qtwist::modform
