// qtwist -- command-line front end.  Subcommands: selftest, verify-ratios,
// lvalue, gauss, eulerprod, report.  Configuration comes from a JSON file
// (--config) with full command-line override; every numeric default is
// embedded here and echoed into reports.
//
// Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtwist/arith.hpp"
#include "qtwist/gauss.hpp"
#include "qtwist/lfun.hpp"
#include "qtwist/mds.hpp"
#include "qtwist/modform.hpp"
#include "qtwist/ratios.hpp"

using namespace qtwist;
using nlohmann::json;

namespace {

struct RunConfig {
    int weight = 12;
    uint64_t n_max = 1'000'000;
    std::string label = "delta";
    double alpha_re = 0.30, alpha_im = 0.0;
    double beta_re = 0.35, beta_im = 0.0;
    std::vector<double> x_grid = {250, 500, 1000, 2000};
    std::string weight_kind = "bump";
    double t_lo = 1.0, t_hi = 2.0;
    int weight_nodes = 4096;
    double tolerance = 1e-9;
    uint64_t max_terms = 40'000'000;
    double smoothing = 0.05;
    int workers = 2;
    uint64_t seed = 12345;
    std::string out_dir = ".";

    lfun::TruncationPolicy policy() const { return {tolerance, max_terms, smoothing}; }
    ratios::ShiftPair shifts() const { return {cdouble(alpha_re, alpha_im), cdouble(beta_re, beta_im)}; }
    ratios::SmoothWeight weight() const {
        auto w = ratios::default_bump(t_lo, t_hi);
        w.quadrature_nodes = weight_nodes;
        return w;
    }

    std::vector<std::string> validate() const {
        std::vector<std::string> bad;
        if (!(alpha_re > 0.0 && alpha_re < 0.5))
            bad.push_back("shifts: require 0 < Re(alpha) < 1/2 (got " + std::to_string(alpha_re) + ")");
        if (!(beta_re > 0.0))
            bad.push_back("shifts: require Re(beta) > 0 (got " + std::to_string(beta_re) + ")");
        if (x_grid.size() < 3) bad.push_back("x_grid: need at least 3 points");
        for (double x : x_grid)
            if (x < 10.0) bad.push_back("x_grid: every X must be >= 10");
        if (!(t_lo > 0.0 && t_lo < t_hi)) bad.push_back("weight: require 0 < t_lo < t_hi");
        if (!(tolerance > 0.0)) bad.push_back("policy: tolerance must be > 0");
        if (workers < 1) bad.push_back("workers must be >= 1");
        if (weight_kind != "bump") bad.push_back("weight: unknown kind '" + weight_kind + "'");
        return bad;
    }
};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("config: cannot open " + path);
    json j;
    in >> j;
    if (j.contains("form")) {
        const auto& f = j["form"];
        if (f.contains("weight")) cfg.weight = f["weight"].get<int>();
        if (f.contains("n_max")) cfg.n_max = f["n_max"].get<uint64_t>();
        if (f.contains("label")) cfg.label = f["label"].get<std::string>();
    }
    if (j.contains("shifts")) {
        const auto& s = j["shifts"];
        if (s.contains("alpha")) { cfg.alpha_re = s["alpha"][0]; cfg.alpha_im = s["alpha"][1]; }
        if (s.contains("beta")) { cfg.beta_re = s["beta"][0]; cfg.beta_im = s["beta"][1]; }
    }
    if (j.contains("x_grid")) cfg.x_grid = j["x_grid"].get<std::vector<double>>();
    if (j.contains("weight")) {
        const auto& w = j["weight"];
        if (w.contains("kind")) cfg.weight_kind = w["kind"].get<std::string>();
        if (w.contains("t_lo")) cfg.t_lo = w["t_lo"].get<double>();
        if (w.contains("t_hi")) cfg.t_hi = w["t_hi"].get<double>();
        if (w.contains("nodes")) cfg.weight_nodes = w["nodes"].get<int>();
    }
    if (j.contains("policy")) {
        const auto& p = j["policy"];
        if (p.contains("tolerance")) cfg.tolerance = p["tolerance"].get<double>();
        if (p.contains("max_terms")) cfg.max_terms = p["max_terms"].get<uint64_t>();
        if (p.contains("smoothing")) cfg.smoothing = p["smoothing"].get<double>();
    }
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
}

const modform::HeckeEigenform& shared_form(uint64_t n_max) {
    static uint64_t built_n = 0;
    static std::unique_ptr<modform::HeckeEigenform> form;
    if (!form || built_n < n_max) {
        form = std::make_unique<modform::HeckeEigenform>(modform::build_delta_form(n_max));
        built_n = n_max;
    }
    return *form;
}

// ------------------------------------------------------------------
// selftest
// ------------------------------------------------------------------

struct SuiteResult {
    std::string name;
    bool pass;
    std::string note;
};

int cmd_selftest(const RunConfig& cfg, bool fast) {
    std::vector<SuiteResult> results;
    std::mt19937_64 rng(cfg.seed);
    const lfun::TruncationPolicy pol = cfg.policy();
    const uint64_t n_small = fast ? 20'000 : 50'000;
    const auto& f = shared_form(n_small);

    auto run = [&](const std::string& name, auto&& body) {
        SuiteResult r{name, true, ""};
        try {
            body(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.note = e.what();
        }
        results.push_back(std::move(r));
    };

    run("arith/kronecker-multiplicativity", [&](SuiteResult& r) {
        const int64_t mmax = fast ? 60 : 200;
        for (int64_t m = -mmax; m <= mmax; ++m)
            for (int64_t a = 1; a <= mmax; ++a)
                for (int64_t b = a; b * a <= mmax * 2; ++b) {
                    if (arith::kronecker(m, a * b) != arith::kronecker(m, a) * arith::kronecker(m, b))
                        throw std::runtime_error("kronecker multiplicativity fails at m=" + std::to_string(m));
                }
        r.note = "m up to " + std::to_string(mmax);
    });

    run("arith/quadratic-reciprocity", [&](SuiteResult& r) {
        const int64_t cap = fast ? 199 : 499;
        for (int64_t m = 1; m <= cap; m += 2)
            for (int64_t n = m + 2; n <= cap; n += 2) {
                if (std::gcd(m, n) != 1) continue;
                const int lhs = arith::chi_bottom(n, m) * arith::chi_bottom(m, n);
                const int rhs = ((m - 1) / 2 * ((n - 1) / 2)) % 2 ? -1 : 1;
                if (lhs != rhs) throw std::runtime_error("reciprocity fails at (" + std::to_string(m) + "," + std::to_string(n) + ")");
            }
        r.note = "odd coprime pairs to " + std::to_string(cap);
    });

    run("gauss/transformation-law", [&](SuiteResult& r) {
        const int64_t cap = fast ? 101 : 301;
        for (int64_t l = 1; l < cap; l += 2)
            for (int64_t q = 1; q < (fast ? 60 : 120); ++q) {
                const cdouble lhs = gauss::tau_4l_from_tau_l(l, q);
                const cdouble rhs = gauss::tau_sum(gauss::CharacterMod::kronecker_top(4 * l), q);
                if (std::abs(lhs - rhs) > 1e-9)
                    throw std::runtime_error("transformation law fails at l=" + std::to_string(l) + " q=" + std::to_string(q));
            }
        r.note = "odd l < " + std::to_string(cap);
    });

    run("gauss/fast-vs-definitional", [&](SuiteResult& r) {
        const int64_t cap = fast ? 141 : 401;
        for (int64_t n = 1; n < cap; n += 2)
            for (int64_t q = 1; q < 40; q += 3) {
                const cdouble a = gauss::G_fast(n, q);
                const cdouble b = gauss::G_def(n, q);
                if (std::abs(a - b) > 1e-6 * std::sqrt(static_cast<double>(n)))
                    throw std::runtime_error("G mismatch at n=" + std::to_string(n) + " q=" + std::to_string(q));
            }
        r.note = "odd n < " + std::to_string(cap);
    });

    run("modform/convolution-identity", [&](SuiteResult& r) {
        const uint64_t cap = fast ? 2000 : 10000;
        for (uint64_t l = 1; l <= cap; ++l) {
            double acc = 0.0;
            for (uint64_t k = 1; k <= l; ++k) {
                if (l % k) continue;
                acc += f.lambda(l / k) * f.c(k);
            }
            const double want = l == 1 ? 1.0 : 0.0;
            if (std::abs(acc - want) > 1e-12)
                throw std::runtime_error("convolution identity fails at l=" + std::to_string(l));
        }
        r.note = "l up to " + std::to_string(cap);
    });

    run("lfun/fe-consistency", [&](SuiteResult& r) {
        std::uniform_real_distribution<double> ts(-10.0, 10.0);
        const std::vector<int64_t> ds = fast ? std::vector<int64_t>{5, -3, 13}
                                             : std::vector<int64_t>{5, -3, 13, -20, 17, 12, -11};
        for (int64_t d : ds) {
            auto desc = lfun::describe_modular_twist(f, d);
            for (int i = 0; i < (fast ? 4 : 8); ++i) {
                const cdouble s(0.5, ts(rng));
                const cdouble a = lfun::completed_value(desc, s, pol);
                const cdouble b = desc.root_number * lfun::completed_value(desc, 1.0 - s, pol);
                if (std::abs(a - b) / std::max(std::abs(a), 1e-30) > 1e-7)
                    throw std::runtime_error("FE fails for d=" + std::to_string(d));
            }
        }
        r.note = std::to_string(ds.size()) + " discriminants";
    });

    run("mds/a1-closed-vs-brute", [&](SuiteResult& r) {
        const cdouble v1 = mds::A1_closed(2.0, 1.6, 1.7, f, pol);
        const cdouble v2 = mds::A1_brute(2.0, 1.6, 1.7, f, fast ? 2000 : 10000, pol);
        if (std::abs(v1 - v2) > 1e-3) throw std::runtime_error("A1 closed/brute disagree");
        r.note = "grid point (2.0, 1.6, 1.7)";
    });

    run("mds/d1-local-identities", [&](SuiteResult& r) {
        const auto psi1 = gauss::CharacterMod::auxiliary(1);
        const auto psim1 = gauss::CharacterMod::auxiliary(-1);
        for (int64_t p : {3, 5, 7, 11})
            for (int64_t q1 : {int64_t(1), p, int64_t(15)})
                for (const auto* psi : {&psi1, &psim1})
                    for (auto [wv, tv] : {std::pair{1.4, 0.3}, std::pair{2.0, -0.2}}) {
                        const cdouble a = mds::D1_local_lsum(f, p, q1, *psi, wv, tv);
                        const cdouble b = mds::D1_local_closed(f, p, q1, *psi, wv, tv);
                        if (std::abs(a - b) > 1e-12)
                            throw std::runtime_error("D1 local identity fails at p=" + std::to_string(p));
                    }
        r.note = "generic and ramified branches";
    });

    bool all = true;
    std::printf("%-36s %-6s %s\n", "suite", "status", "note");
    for (const auto& r : results) {
        all = all && r.pass;
        std::printf("%-36s %-6s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.note.c_str());
    }
    if (!all) {
        for (const auto& r : results)
            if (!r.pass) std::fprintf(stderr, "selftest: failing invariant: %s (%s)\n", r.name.c_str(), r.note.c_str());
        return 3;
    }
    return 0;
}

// ------------------------------------------------------------------
// verify-ratios
// ------------------------------------------------------------------

int cmd_verify_ratios(const RunConfig& cfg) {
    const auto bad = cfg.validate();
    if (!bad.empty()) {
        std::fprintf(stderr, "verify-ratios: invalid configuration (Theorem preconditions):\n");
        for (const auto& b : bad) std::fprintf(stderr, "  - %s\n", b.c_str());
        return 2;
    }
    const auto& f = shared_form(cfg.n_max);
    auto report = ratios::run_verification(cfg.x_grid, cfg.shifts(), f, cfg.weight(), cfg.policy(), cfg.workers);
    report.weight_name = cfg.weight_kind + "[" + std::to_string(cfg.t_lo) + "," + std::to_string(cfg.t_hi) + "]";

    std::filesystem::create_directories(cfg.out_dir);
    const auto jpath = std::filesystem::path(cfg.out_dir) / "ratios_report.json";
    const auto cpath = std::filesystem::path(cfg.out_dir) / "ratios_report.csv";
    std::ofstream(jpath) << ratios::report_to_json(report);
    std::ofstream(cpath) << ratios::report_to_csv(report);

    const double n_ab = report.n_alpha_beta;
    std::printf("ratios verification: alpha = %g%+gi, beta = %g%+gi\n", report.alpha.real(), report.alpha.imag(),
                report.beta.real(), report.beta.imag());
    if (report.alpha.imag() != 0.0 || report.beta.imag() != 0.0)
        std::printf("note: imaginary-shift mode (no constraint on the imaginary parts)\n");
    std::printf("predicted error-term exponent: absolute O(X^{%.3f+eps}), relative bound exponent %.3f\n", n_ab,
                n_ab - 1.0);
    std::printf("%-10s %-24s %-24s %-12s %-12s\n", "X", "lhs", "main", "abs_dev", "rel_dev");
    for (const auto& rec : report.records)
        std::printf("%-10.0f %-24.12g %-24.12g %-12.4g %-12.4g\n", rec.X, rec.lhs.real(), rec.main.real(),
                    rec.abs_dev, rec.rel_dev);
    std::printf("fitted log-log slope of abs deviation: %.4f (prediction <= %.3f + eps)\n", report.fitted_slope,
                n_ab);
    std::printf("reports: %s, %s\n", jpath.c_str(), cpath.c_str());
    return 0;
}

// ------------------------------------------------------------------
// small inspection commands
// ------------------------------------------------------------------

int cmd_lvalue(const RunConfig& cfg, const std::string& kind, int64_t d, int64_t n, double sre, double sim) {
    const lfun::TruncationPolicy pol = cfg.policy();
    const cdouble s(sre, sim);
    cdouble v;
    if (kind == "zeta") {
        v = lfun::zeta(s, pol);
    } else if (kind == "dirichlet") {
        v = lfun::quad_dirichlet_L(s, d, pol);
    } else if (kind == "twist") {
        v = lfun::modular_twist_L(s, shared_form(cfg.n_max), d, pol);
    } else if (kind == "twist-n") {
        v = lfun::L2_twist(s, shared_form(cfg.n_max), n, pol);
    } else if (kind == "sym2") {
        v = lfun::sym2_L(s, shared_form(cfg.n_max), pol);
    } else {
        std::fprintf(stderr, "lvalue: unknown kind '%s'\n", kind.c_str());
        return 2;
    }
    std::printf("%.15g %+.15gi   (abs tol target %.1e)\n", v.real(), v.imag(), pol.tolerance);
    return 0;
}

int cmd_gauss(const std::string& mode, int64_t n, int64_t q) {
    cdouble v;
    if (mode == "fast") v = gauss::G_fast(n, q);
    else if (mode == "def") v = gauss::G_def(n, q);
    else if (mode == "tau4l") v = gauss::tau_4l_from_tau_l(n, q);
    else {
        std::fprintf(stderr, "gauss: unknown mode '%s'\n", mode.c_str());
        return 2;
    }
    std::printf("%.15g %+.15gi\n", v.real(), v.imag());
    return 0;
}

int cmd_eulerprod(const RunConfig& cfg, double sre, double wre, double zre, int64_t cutoff) {
    const auto& f = shared_form(cfg.n_max);
    const auto out = mds::P_product(sre, wre, zre, f, cutoff, cfg.policy());
    std::printf("P = %.15g %+.15gi   primes_used=%lld tail_estimate=%.3e\n", out.value.real(), out.value.imag(),
                static_cast<long long>(out.primes_used), out.tail_estimate);
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& csv_path) {
    std::ifstream in(in_path);
    if (!in) {
        std::fprintf(stderr, "report: cannot open %s\n", in_path.c_str());
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const auto rep = ratios::report_from_json(ss.str());
    const std::string csv = ratios::report_to_csv(rep);
    if (!csv_path.empty()) {
        std::ofstream(csv_path) << csv;
        std::printf("wrote %s\n", csv_path.c_str());
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical workbench for quadratic twists of modular L-functions"};
    app.require_subcommand(1);

    RunConfig cfg;
    // first pass: honor --config before flag overrides
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return 2;
            }
        }
    }
    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--workers", cfg.workers, "worker threads");
    app.add_option("--seed", cfg.seed, "seed for sampled property suites");
    bool fast = false;
    app.add_flag("--fast", fast, "reduced grids for the self-test");

    auto* sc_self = app.add_subcommand("selftest", "run the full property suite");

    auto* sc_ver = app.add_subcommand("verify-ratios", "run the ratios asymptotic verification");
    sc_ver->add_option("--alpha", cfg.alpha_re, "Re(alpha)");
    sc_ver->add_option("--alpha-im", cfg.alpha_im, "Im(alpha)");
    sc_ver->add_option("--beta", cfg.beta_re, "Re(beta)");
    sc_ver->add_option("--beta-im", cfg.beta_im, "Im(beta)");
    sc_ver->add_option("--xgrid", cfg.x_grid, "X grid (>= 3 ascending values)");
    sc_ver->add_option("--nmax", cfg.n_max, "coefficient table size");
    sc_ver->add_option("--tol", cfg.tolerance, "absolute tolerance per L-value");

    auto* sc_lv = app.add_subcommand("lvalue", "evaluate one L-value");
    std::string lv_kind = "twist";
    int64_t lv_d = 1, lv_n = 1;
    double lv_sre = 2.0, lv_sim = 0.0;
    sc_lv->add_option("--kind", lv_kind, "zeta|dirichlet|twist|twist-n|sym2");
    sc_lv->add_option("--d", lv_d, "fundamental discriminant");
    sc_lv->add_option("--n", lv_n, "odd twist index (twist-n)");
    sc_lv->add_option("--s-re", lv_sre, "Re(s)");
    sc_lv->add_option("--s-im", lv_sim, "Im(s)");
    sc_lv->add_option("--nmax", cfg.n_max, "coefficient table size");
    sc_lv->add_option("--tol", cfg.tolerance, "absolute tolerance");

    auto* sc_g = app.add_subcommand("gauss", "evaluate a Gauss sum");
    std::string g_mode = "fast";
    int64_t g_n = 1, g_q = 1;
    sc_g->add_option("--mode", g_mode, "fast|def|tau4l");
    sc_g->add_option("--n", g_n, "odd modulus (or l for tau4l)")->required();
    sc_g->add_option("--q", g_q, "numerator")->required();

    auto* sc_ep = app.add_subcommand("eulerprod", "evaluate the Euler product P(s,w,z)");
    double ep_s = 1.0, ep_w = 0.8, ep_z = 0.85;
    int64_t ep_cutoff = 100'000;
    sc_ep->add_option("--s", ep_s, "Re(s)");
    sc_ep->add_option("--w", ep_w, "Re(w)");
    sc_ep->add_option("--z", ep_z, "Re(z)");
    sc_ep->add_option("--cutoff", ep_cutoff, "prime cutoff");
    sc_ep->add_option("--nmax", cfg.n_max, "coefficient table size");

    auto* sc_rep = app.add_subcommand("report", "re-render a JSON report as CSV");
    std::string rep_in, rep_csv;
    sc_rep->add_option("--in", rep_in, "input JSON report")->required();
    sc_rep->add_option("--csv", rep_csv, "output CSV path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_self->parsed()) return cmd_selftest(cfg, fast);
        if (sc_ver->parsed()) return cmd_verify_ratios(cfg);
        if (sc_lv->parsed()) return cmd_lvalue(cfg, lv_kind, lv_d, lv_n, lv_sre, lv_sim);
        if (sc_g->parsed()) return cmd_gauss(g_mode, g_n, g_q);
        if (sc_ep->parsed()) return cmd_eulerprod(cfg, ep_s, ep_w, ep_z, ep_cutoff);
        if (sc_rep->parsed()) return cmd_report(rep_in, rep_csv);
    } catch (const domain_error& e) {
        std::fprintf(stderr, "error (validation): %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error (numerical): %s\n", e.what());
        return 3;
    }
    return 0;
}
