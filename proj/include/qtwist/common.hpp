// common.hpp -- shared aliases, error types, compensated summation and the
// deterministic chunked parallel reduction used by the long coefficient sums.

#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qtwist {

using cdouble = std::complex<double>;
using std::uint64_t;

// Precondition violations (bad arguments, region violations, invalid config).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested value sits on (or numerically too close to) a pole.  For
// operations that know the residue, it rides along.
struct pole_error : std::runtime_error {
    cdouble residue;
    explicit pole_error(const std::string& what, cdouble res = 0.0)
        : std::runtime_error(what), residue(res) {}
};

// Coefficient table too short for the requested evaluation.
struct table_exhausted : std::runtime_error {
    uint64_t required;
    explicit table_exhausted(const std::string& what, uint64_t need)
        : std::runtime_error(what), required(need) {}
};

// A denominator fell below the safe threshold; names the offending index.
struct singularity_error : std::runtime_error {
    uint64_t at_n;
    explicit singularity_error(const std::string& what, uint64_t n)
        : std::runtime_error(what), at_n(n) {}
};

// Kahan-compensated accumulator, real or complex.
template <class T>
class KahanSum {
  public:
    void add(const T& x) {
        const T y = x - carry_;
        const T t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    T value() const { return sum_; }

  private:
    T sum_{};
    T carry_{};
};

// Deterministic parallel reduction: [lo, hi) is cut into fixed-width chunks,
// each chunk is Kahan-summed independently, and the partials are folded in
// chunk order.  The result is bit-stable for a given chunk width no matter
// how many workers run.
template <class F>
cdouble sum_chunked(uint64_t lo, uint64_t hi, int workers, uint64_t chunk_width, F&& term) {
    if (hi <= lo) return 0.0;
    if (chunk_width == 0) chunk_width = 64;
    const uint64_t nchunks = (hi - lo + chunk_width - 1) / chunk_width;
    std::vector<cdouble> partial(nchunks, cdouble(0.0, 0.0));

    auto run_chunk = [&](uint64_t c) {
        const uint64_t a = lo + c * chunk_width;
        const uint64_t b = std::min(hi, a + chunk_width);
        KahanSum<cdouble> acc;
        for (uint64_t i = a; i < b; ++i) acc.add(term(i));
        partial[c] = acc.value();
    };

    if (workers <= 1 || nchunks <= 1) {
        for (uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<uint64_t> next{0};
        const int n = std::min<int>(workers, static_cast<int>(nchunks));
        pool.reserve(n);
        for (int t = 0; t < n; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    const uint64_t c = next.fetch_add(1);
                    if (c >= nchunks) break;
                    run_chunk(c);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    KahanSum<cdouble> total;
    for (uint64_t c = 0; c < nchunks; ++c) total.add(partial[c]);
    return total.value();
}

}  // namespace qtwist
