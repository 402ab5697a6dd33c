// modform.hpp -- Hecke eigenform coefficient engine.  Carries the
// Deligne-normalized eigenvalue table lambda_f(n), the Dirichlet-inverse
// coefficients c_f(n), Satake parameters, the convolution coefficients
// r(l,t), symmetric-square coefficients and the closed-form power sums
// over lambda_f(p^k).
//
// The concrete default form is the weight-12 discriminant form, whose
// integer coefficient table is expanded from the cube of the eta series
// (Jacobi's sparse form) raised to the 8th power, and cached on disk.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qtwist/common.hpp"

namespace qtwist::modform {

using i128 = __int128;

struct SatakePair {
    cdouble alpha1;  // nonnegative imaginary part first
    cdouble alpha2;
};

class HeckeEigenform {
  public:
    // Generic constructor: any even weight >= 12 plus a coefficient table
    // lambda[1..n_max] (Deligne normalization, lambda[1] = 1).
    HeckeEigenform(int weight, std::string label, std::vector<double> lambda,
                   std::vector<i128> integer_coeffs = {});

    int weight() const { return weight_; }
    const std::string& label() const { return label_; }
    uint64_t n_max() const { return n_max_; }

    // lambda_f(n); table lookup for n <= n_max, Hecke recursion plus
    // multiplicativity beyond.  Throws table_exhausted when a prime above
    // n_max is required.
    double lambda(uint64_t n) const;

    // Dirichlet-inverse coefficients: multiplicative with
    // c(p^0)=1, c(p)=-lambda(p), c(p^2)=1, c(p^k)=0 for k>2.
    double c(uint64_t n) const;

    // lambda(p^k) by the Hecke recursion from lambda(p); p must be in the table.
    double lambda_prime_power(int64_t p, int k) const;

    // r(l,t) = sum_{k|l} lambda(l/k) c(k) k^{-t}, multiplicative in l.
    cdouble r_coeff(uint64_t l, cdouble t) const;

    // r(p^k, t) without materializing p^k.
    cdouble r_prime_power(int64_t p, int k, cdouble t) const;

    // Unit-modulus roots of x^2 - lambda(p) x + 1.
    SatakePair satake(uint64_t p) const;

    // sum_{i>=0} lambda(p^{2i}) p^{-iu}  and  sum_{i>=0} lambda(p^{2i+1}) p^{-(i+1)u},
    // closed forms; require Re(u) > 0.
    cdouble even_powersum(uint64_t p, cdouble u) const;
    cdouble odd_powersum(uint64_t p, cdouble u) const;

    // Dirichlet coefficient of zeta(2s) * sum lambda(m^2) m^{-s}.
    double sym2_coeff(uint64_t n) const;

    // Integer coefficient table (tau(n) for the discriminant form); empty
    // for forms built without one.
    bool has_integer_coeffs() const { return !tau_.empty(); }
    i128 integer_coeff(uint64_t n) const;

  private:
    int weight_;
    std::string label_;
    uint64_t n_max_;
    std::vector<double> lambda_;  // index 0 unused
    std::vector<i128> tau_;       // index 0 unused; may be empty
};

// QTWIST_CACHE_DIR if set, else ".qtwist-cache" in the working directory.
std::filesystem::path default_tau_cache_dir();

// The weight-12 level-1 form with lambda(n) = tau(n) / n^{11/2}.  The
// integer table is built once per n_max and cached under cache_dir
// ("" disables the cache).
HeckeEigenform build_delta_form(uint64_t n_max, const std::filesystem::path& cache_dir = default_tau_cache_dir());

// Exposed for cache tests: expand the integer coefficient table directly.
std::vector<i128> expand_tau_table(uint64_t n_max);

// Cache file layout: "TAUC" | u32 version | u64 n_max | n_max i128 (LE) |
// u64 checksum (FNV-1a over the payload bytes).
bool write_tau_cache(const std::filesystem::path& file, const std::vector<i128>& tau);
bool read_tau_cache(const std::filesystem::path& file, uint64_t n_max, std::vector<i128>& out);

}  // namespace qtwist::modform
