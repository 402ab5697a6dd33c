#include "qtwist/ratios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "qtwist/mds.hpp"

namespace qtwist::ratios {

SmoothWeight default_bump(double t_lo, double t_hi) {
    if (!(0.0 < t_lo && t_lo < t_hi)) throw domain_error("default_bump: need 0 < t_lo < t_hi");
    SmoothWeight w;
    w.t_lo = t_lo;
    w.t_hi = t_hi;
    w.eval = [t_lo, t_hi](double t) {
        const double u = (2.0 * t - (t_lo + t_hi)) / (t_hi - t_lo);
        if (u <= -1.0 || u >= 1.0) return 0.0;
        return std::exp(-1.0 / (1.0 - u * u));
    };
    return w;
}

void ShiftPair::validate() const {
    if (!(alpha.real() > 0.0 && alpha.real() < 0.5))
        throw domain_error("shifts: require 0 < Re(alpha) < 1/2");
    if (!(beta.real() > 0.0)) throw domain_error("shifts: require Re(beta) > 0");
}

cdouble mellin_hat(const SmoothWeight& w, cdouble s) {
    // trapezoid on the support; the bump vanishes to all orders at the
    // endpoints, so the rule converges superalgebraically
    const int n = std::max(64, w.quadrature_nodes);
    const double h = (w.t_hi - w.t_lo) / static_cast<double>(n);
    KahanSum<cdouble> acc;
    for (int j = 1; j < n; ++j) {
        const double t = w.t_lo + h * static_cast<double>(j);
        const double wt = w.eval(t);
        if (wt != 0.0) acc.add(wt * std::pow(t, s - 1.0));
    }
    return h * acc.value();
}

cdouble lhs_sum(double X, const ShiftPair& shifts, const HeckeEigenform& f, const SmoothWeight& w,
                const TruncationPolicy& pol, int workers) {
    shifts.validate();
    if (X < 10.0) throw domain_error("lhs_sum: X must be >= 10");
    const cdouble s_num = 0.5 + shifts.alpha;
    const cdouble s_den = 0.5 + shifts.beta;

    int64_t lo = static_cast<int64_t>(std::floor(X * w.t_lo));
    int64_t hi = static_cast<int64_t>(std::ceil(X * w.t_hi));
    if (lo < 1) lo = 1;
    if (lo % 2 == 0) ++lo;
    if (hi < lo) return 0.0;

    const uint64_t count = static_cast<uint64_t>((hi - lo) / 2 + 1);  // odd n = lo + 2i
    return sum_chunked(0, count, workers, 32, [&](uint64_t i) -> cdouble {
        const int64_t n = lo + 2 * static_cast<int64_t>(i);
        const double wt = w.eval(static_cast<double>(n) / X);
        if (wt == 0.0) return 0.0;
        const cdouble num = lfun::L2_twist(s_num, f, n, pol);
        const cdouble den = lfun::L2_twist(s_den, f, n, pol);
        if (std::abs(den) < 1e-10)
            throw singularity_error("lhs_sum: denominator below 1e-10 at n = " + std::to_string(n),
                                    static_cast<uint64_t>(n));
        return num / den * wt;
    });
}

cdouble main_term(double X, const ShiftPair& shifts, const HeckeEigenform& f, const SmoothWeight& w,
                  const TruncationPolicy& pol) {
    shifts.validate();
    const cdouble sw = 0.5 + shifts.alpha;
    const cdouble sz = 0.5 + shifts.beta;
    const auto P = mds::P_product(1.0, sw, sz, f, 300'000, pol);
    const cdouble sym2 = lfun::sym2_L2(1.0 + 2.0 * shifts.alpha, f, pol);
    return X * mellin_hat(w, 1.0) * sym2 * P.value;
}

RatiosReport run_verification(std::vector<double> x_grid, const ShiftPair& shifts, const HeckeEigenform& f,
                              const SmoothWeight& w, const TruncationPolicy& pol, int workers) {
    shifts.validate();
    if (x_grid.size() < 3) throw domain_error("run_verification: need at least 3 grid points");
    std::sort(x_grid.begin(), x_grid.end());

    const auto t0 = std::chrono::steady_clock::now();
    RatiosReport rep;
    rep.alpha = shifts.alpha;
    rep.beta = shifts.beta;
    rep.n_alpha_beta = shifts.n_exponent();
    rep.predicted_abs_exponent = rep.n_alpha_beta;
    rep.predicted_rel_exponent = rep.n_alpha_beta - 1.0;
    rep.workers = workers;
    rep.tolerance = pol.tolerance;

    // the main-term prefactor is X-independent; compute it once
    const cdouble per_x_main = main_term(1.0, shifts, f, w, pol);

    for (double X : x_grid) {
        RatiosRecord rec;
        rec.X = X;
        rec.lhs = lhs_sum(X, shifts, f, w, pol, workers);
        rec.main = X * per_x_main;
        rec.abs_dev = std::abs(rec.lhs - rec.main);
        rec.rel_dev = std::abs(rec.lhs / rec.main - 1.0);
        rep.records.push_back(rec);
    }

    // least squares slope of log|dev| against log X
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double npts = static_cast<double>(rep.records.size());
    for (const auto& rec : rep.records) {
        const double lx = std::log(rec.X);
        const double ly = std::log(std::max(rec.abs_dev, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    rep.fitted_slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string report_to_json(const RatiosReport& r) {
    nlohmann::json j;
    j["alpha"] = {r.alpha.real(), r.alpha.imag()};
    j["beta"] = {r.beta.real(), r.beta.imag()};
    j["n_alpha_beta"] = r.n_alpha_beta;
    j["predicted_abs_exponent"] = r.predicted_abs_exponent;
    j["predicted_rel_exponent"] = r.predicted_rel_exponent;
    j["fitted_slope"] = r.fitted_slope;
    j["wall_seconds"] = r.wall_seconds;
    j["workers"] = r.workers;
    j["tolerance"] = r.tolerance;
    j["weight"] = r.weight_name;
    auto& recs = j["records"] = nlohmann::json::array();
    for (const auto& rec : r.records) {
        recs.push_back({{"X", rec.X},
                        {"re_lhs", rec.lhs.real()},
                        {"im_lhs", rec.lhs.imag()},
                        {"re_main", rec.main.real()},
                        {"im_main", rec.main.imag()},
                        {"abs_dev", rec.abs_dev},
                        {"rel_dev", rec.rel_dev}});
    }
    return j.dump(2);
}

RatiosReport report_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    RatiosReport r;
    r.alpha = cdouble(j["alpha"][0].get<double>(), j["alpha"][1].get<double>());
    r.beta = cdouble(j["beta"][0].get<double>(), j["beta"][1].get<double>());
    r.n_alpha_beta = j["n_alpha_beta"].get<double>();
    r.predicted_abs_exponent = j["predicted_abs_exponent"].get<double>();
    r.predicted_rel_exponent = j["predicted_rel_exponent"].get<double>();
    r.fitted_slope = j["fitted_slope"].get<double>();
    r.wall_seconds = j["wall_seconds"].get<double>();
    r.workers = j["workers"].get<int>();
    r.tolerance = j["tolerance"].get<double>();
    r.weight_name = j["weight"].get<std::string>();
    for (const auto& e : j["records"]) {
        RatiosRecord rec;
        rec.X = e["X"].get<double>();
        rec.lhs = cdouble(e["re_lhs"].get<double>(), e["im_lhs"].get<double>());
        rec.main = cdouble(e["re_main"].get<double>(), e["im_main"].get<double>());
        rec.abs_dev = e["abs_dev"].get<double>();
        rec.rel_dev = e["rel_dev"].get<double>();
        r.records.push_back(rec);
    }
    return r;
}

std::string report_to_csv(const RatiosReport& r) {
    std::string out = "X,re_lhs,im_lhs,re_main,im_main,abs_dev,rel_dev\n";
    char buf[256];
    for (const auto& rec : r.records) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.X,
                      rec.lhs.real(), rec.lhs.imag(), rec.main.real(), rec.main.imag(), rec.abs_dev,
                      rec.rel_dev);
        out += buf;
    }
    return out;
}

}  // namespace qtwist::ratios
