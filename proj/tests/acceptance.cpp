// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
//   acceptance [--only 1,2,5] [--threads N]

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hawkes/graph.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/mc.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/subcritical.hpp"
#include "hawkes/supercritical.hpp"

using namespace hawkes;

namespace {

int g_threads = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5g", v);
    return buf;
}

// 1. psi identity and fixed point on the parameter grid.
Outcome criterion1() {
    double worst = 0.0;
    long checked = 0;
    for (int im = 0; im < 10; ++im) {
        const double mu = 0.5 + 3.5 * (im + 0.5) / 10.0;
        for (int il = 0; il < 10; ++il) {
            const double lambda = 0.2 + 1.8 * (il + 0.5) / 10.0;
            for (int ip = 0; ip < 10; ++ip) {
                const double p = (ip + 0.5) / 10.0 * std::min(1.0, 0.9 / lambda);
                const double s = 1.0 - lambda * p;
                const double u = mu / s;
                const double v = mu * mu * lambda * lambda * p * (1.0 - p) / (s * s);
                const double w = mu / (s * s * s);
                const double f = psi3_f(u, v, w);
                worst = std::max(worst, std::abs(psi3(u, v, w) - f * f / (v + f * f)));
                worst = std::max(worst, std::abs(psi3(u, v, w) - p));
                worst = std::max(worst, std::abs(psi1(u, v, w) - mu));
                worst = std::max(worst, std::abs(psi2(u, v, w) - lambda));
                ++checked;
            }
        }
    }
    return {worst <= 1e-12, "grid points=" + std::to_string(checked) +
                                " worst abs error=" + fmt(worst) + " (tol 1e-12)"};
}

// 2. Kernel mass conservation, both families, n <= 6.
Outcome criterion2() {
    using boost::math::quadrature::gauss_kronrod;
    double worst = 0.0;
    for (const auto& k : {KernelSpec::exponential(1.5), KernelSpec::uniform_indicator(0.8)}) {
        for (int n = 1; n <= 6; ++n) {
            const double hi = k.family() == KernelFamily::exponential
                                  ? (static_cast<double>(n) + 60.0) / k.param()
                                  : static_cast<double>(n) * k.param();
            const double piece = k.family() == KernelFamily::exponential ? 1.0 : k.param();
            double total = 0.0;
            double left = 0.0;
            while (left < hi) {
                const double right = std::min(hi, left + piece);
                total += gauss_kronrod<double, 31>::integrate(
                    [&](double s) { return k.convolution_power(n, s); }, left, right, 12, 1e-12);
                left = right;
            }
            worst = std::max(worst, std::abs(total - std::pow(k.lambda(), n)));
        }
    }
    return {worst <= 1e-8, "worst |mass - Lambda^n| = " + fmt(worst) + " (tol 1e-8)"};
}

// 3. Simulator against the expected-trajectory oracle.
Outcome criterion3() {
    const auto g = sample_graph(5, 0.6, 20240903);
    const auto kernel = KernelSpec::exponential(2.0);
    const double t = 50.0;
    const int runs = 500;

    const auto series = expected_counts_series(g, kernel, 1.0, t, 5);
    const auto ode = expected_counts_ode(g, kernel, 1.0, t, 5);
    double rel = 0.0;
    for (int i = 0; i < 5; ++i)
        rel = std::max(rel, std::abs(series[i] - ode[i]) / std::abs(ode[i]));
    if (rel > 1e-6) return {false, "series/ode disagreement " + fmt(rel) + " > 1e-6"};

    std::vector<double> sum(5, 0.0), sum_sq(5, 0.0);
    for (int r = 0; r < runs; ++r) {
        const auto log = simulate(g, kernel, 1.0, t, 910000 + r);
        for (int i = 0; i < 5; ++i) {
            const double z = log.count_at(i, t);
            sum[i] += z;
            sum_sq[i] += z * z;
        }
    }
    double worst_sigma = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double m = sum[i] / runs;
        const double var = (sum_sq[i] / runs - m * m) * runs / (runs - 1.0);
        const double se = std::sqrt(var / runs);
        worst_sigma = std::max(worst_sigma, std::abs(m - ode[i]) / se);
    }
    return {worst_sigma <= 3.0,
            "series/ode rel err=" + fmt(rel) + ", worst mean deviation=" + fmt(worst_sigma) +
                " SE (tol 3)"};
}

// 4. Poisson decoupling KS test.
Outcome criterion4() {
    const double mu = 2.0;
    const auto g = sample_graph(100, 0.0, 77);
    const auto log = simulate(g, KernelSpec::exponential(1.0), mu, 56.0, 424242);
    std::vector<double> gaps;
    gaps.reserve(12000);
    for (const auto& times : log.events) {
        double prev = 0.0;
        for (double t : times) {
            gaps.push_back(t - prev);
            prev = t;
        }
    }
    if (gaps.size() < 10000) return {false, "only " + std::to_string(gaps.size()) + " samples"};
    gaps.resize(10000);
    const auto res = ks_test(gaps, [mu](double x) { return 1.0 - std::exp(-mu * x); });
    return {res.p_value > 0.01,
            "samples=" + std::to_string(gaps.size()) + " KS p=" + fmt(res.p_value) +
                " (level 0.01)"};
}

Outcome report_outcome(const MCReport& report, const std::string& extra = "") {
    std::ostringstream os;
    for (const auto& c : report.checks) os << c.name << (c.pass ? " ok" : " FAILED") << " [" << c.detail << "]; ";
    os << extra;
    return {report.pass, os.str()};
}

// 5. Matrix CLT for V_inf (no process simulation).
Outcome criterion5() {
    ExperimentConfig cfg;
    cfg.target = Target::graph_v_inf_clt;
    cfg.n = 2000;
    cfg.k = 1000;
    cfg.p = 0.5;
    cfg.kernel = "exp:1";
    cfg.replicas = 1000;
    cfg.seed = 500100;
    cfg.threads = g_threads;
    cfg.tol.variance_band = 0.2;
    cfg.tol.ks_level = 0.01;
    const auto report = run_experiment(cfg);
    std::string extra;
    if (report.summary.count("variance_ratio_doubled"))
        extra = "diagnostic: ratio vs doubled constant=" +
                fmt(report.summary.at("variance_ratio_doubled")) +
                ", KS p vs doubled=" + fmt(report.summary.at("ks_p_doubled"));
    return report_outcome(report, extra);
}

// 6. Supercritical plug-in from the matrix oracle.
Outcome criterion6() {
    ExperimentConfig cfg;
    cfg.target = Target::graph_u_inf;
    cfg.n = 2000;
    cfg.k = 1000;
    cfg.p = 0.5;
    cfg.kernel = "exp:1";
    cfg.replicas = 300;
    cfg.seed = 600100;
    cfg.threads = g_threads;
    cfg.tol.mean_abs_band = 0.1;
    cfg.tol.plug_in_band = 0.03;
    return report_outcome(run_experiment(cfg));
}

// 7. Subcritical consistency.
Outcome criterion7() {
    ExperimentConfig cfg;
    cfg.target = Target::sub_consistency;
    cfg.n = 400;
    cfg.k = 200;
    cfg.t = 400.0;
    cfg.q = 7.0;
    cfg.mu = 1.0;
    cfg.kernel = "exp:1";
    cfg.p = 0.5;
    cfg.replicas = 50;
    cfg.seed = 700100;
    cfg.threads = g_threads;
    cfg.tol.median_p_band = 0.05;
    cfg.tol.median_mu_band = 0.1;
    cfg.tol.median_lambda_band = 0.15;
    return report_outcome(run_experiment(cfg));
}

// 8. Component CLT for V_t around the matrix limit.
Outcome criterion8() {
    ExperimentConfig cfg;
    cfg.target = Target::sub_clt_regime_ii;
    cfg.n = 400;
    cfg.k = 200;
    cfg.t = 400.0;
    cfg.q = 7.0;
    cfg.mu = 1.0;
    cfg.kernel = "exp:1";
    cfg.p = 0.5;
    cfg.replicas = 400;
    cfg.seed = 800100;
    cfg.threads = g_threads;
    cfg.tol.variance_band = 0.3;
    cfg.tol.ks_level = 0.01;
    const auto report = run_experiment(cfg);
    std::string extra = "theoretical var=" + fmt(report.theoretical_variance_delta) +
                        ", realized dominance=" + fmt(report.realized_dominance) + " (dominant " +
                        regime_name(report.regime) + ")";
    if (report.summary.count("variance_ratio_incl_cross_term"))
        extra += ", diagnostic ratio incl t/N cross term=" +
                 fmt(report.summary.at("variance_ratio_incl_cross_term"));
    return report_outcome(report, extra);
}

// 9. Supercritical consistency + CLT.
Outcome criterion9() {
    ExperimentConfig cfg;
    cfg.target = Target::super_clt;
    cfg.n = 300;
    cfg.k = 150;
    cfg.t = 25.0;
    cfg.mu = 1.0;
    cfg.kernel = "exp:0.3";
    cfg.p = 0.6;
    cfg.replicas = 200;
    cfg.seed = 900100;
    cfg.threads = g_threads;
    cfg.event_budget = 40'000'000;
    cfg.tol.variance_band = 0.3;
    cfg.tol.ks_level = 0.0;  // the criterion pins the variance, KS is reported only
    const auto report = run_experiment(cfg);

    std::vector<double> abs_err;
    for (const auto& r : report.replicas)
        if (!r.failed && r.stats.count("p_stat"))
            abs_err.push_back(std::abs(r.stats.at("p_stat") - cfg.p));
    const double med = median(abs_err);
    const bool med_ok = med <= 0.05;
    std::string extra = "median |P - p|=" + fmt(med) + " (tol 0.05), KS p=" +
                        fmt(report.ks.p_value);
    if (report.summary.count("variance_ratio_incl_graph_term"))
        extra += ", diagnostic ratio incl graph term=" +
                 fmt(report.summary.at("variance_ratio_incl_graph_term"));
    auto out = report_outcome(report, extra);
    out.pass = out.pass && med_ok;
    return out;
}

// 10. Degenerate behavior at p = 0.
Outcome criterion10() {
    ExperimentConfig cfg;
    cfg.target = Target::p_zero_prop;
    cfg.mu = 1.0;
    cfg.kernel = "exp:1";
    cfg.p = 0.0;
    cfg.q = 7.0;
    cfg.replicas = 400;
    cfg.threads = g_threads;

    // Regime (ii) flavor: the Delta-term squared dominates N/(t sqrt K).
    cfg.p_zero_flavor = "regime_ii";
    cfg.n = 200;
    cfg.k = 50;
    cfg.t = 1600.0;
    cfg.seed = 1000100;
    cfg.tol.freq_low = 0.4;
    cfg.tol.freq_high = 0.6;
    const auto rii = run_experiment(cfg);

    // Regime (i) flavor: N/(t sqrt K) dominates the Delta-term squared.
    cfg.p_zero_flavor = "regime_i";
    cfg.n = 400;
    cfg.k = 400;
    cfg.t = 100.0;
    cfg.seed = 1000200;
    cfg.tol.median_p_band = 0.05;
    const auto ri = run_experiment(cfg);

    const auto a = report_outcome(rii);
    const auto b = report_outcome(ri);
    return {a.pass && b.pass, "regime (ii): " + a.detail + " | regime (i): " + b.detail};
}

// 11. Determinism: byte-identical reports on rerun (timing stripped).
Outcome criterion11() {
    std::vector<ExperimentConfig> cfgs;
    {
        ExperimentConfig c;
        c.target = Target::graph_v_inf_clt;
        c.n = 300;
        c.k = 150;
        c.p = 0.5;
        c.replicas = 20;
        c.seed = 1100100;
        c.tol.variance_band = 0.0;
        c.tol.ks_level = 0.0;
        cfgs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.target = Target::sub_consistency;
        c.n = 100;
        c.k = 50;
        c.t = 36.0;
        c.p = 0.5;
        c.replicas = 4;
        c.seed = 1100200;
        c.tol.median_p_band = 1.0;
        c.tol.median_mu_band = 2.0;
        c.tol.median_lambda_band = 2.0;
        cfgs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.target = Target::super_clt;
        c.n = 80;
        c.k = 40;
        c.t = 12.0;
        c.p = 0.6;
        c.kernel = "exp:0.3";
        c.replicas = 4;
        c.seed = 1100300;
        c.tol.variance_band = 0.0;
        c.tol.ks_level = 0.0;
        cfgs.push_back(c);
    }
    {
        ExperimentConfig c;
        c.target = Target::p_zero_prop;
        c.p_zero_flavor = "regime_i";
        c.n = 60;
        c.k = 60;
        c.t = 36.0;
        c.p = 0.0;
        c.replicas = 4;
        c.seed = 1100400;
        c.tol.median_p_band = 1.0;
        cfgs.push_back(c);
    }
    int ok = 0;
    for (auto& c : cfgs) {
        c.threads = g_threads;
        const auto a = run_experiment(c).to_json(false);
        const auto b = run_experiment(c).to_json(false);
        if (a == b) ++ok;
    }
    return {ok == static_cast<int>(cfgs.size()),
            std::to_string(ok) + "/" + std::to_string(cfgs.size()) +
                " experiment targets byte-identical on rerun"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    std::set<int> expect_pass;
    bool expect_mode = false;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--threads" && i + 1 < argc) {
            g_threads = std::atoi(argv[++i]);
        } else if (arg == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::atoi(tok.c_str()));
        } else if (arg == "--expect" && i + 1 < argc) {
            // Regression mode: exit 0 iff exactly the listed criteria pass.
            // Used by ctest to pin the documented state, in which the
            // criteria whose published constants/configurations are defective
            // stay red (see the validation reports for the diagnostics).
            expect_mode = true;
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) expect_pass.insert(std::atoi(tok.c_str()));
        } else {
            std::fprintf(stderr, "usage: %s [--only 1,2,...] [--expect 1,2,...] [--threads N]\n",
                         argv[0]);
            return 2;
        }
    }

    struct Criterion {
        int number;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "psi identity & fixed point (1e-12 grid)", criterion1},
        {2, "kernel mass conservation (n<=6, 1e-8)", criterion2},
        {3, "simulator vs expected-trajectory oracle", criterion3},
        {4, "Poisson decoupling KS", criterion4},
        {5, "matrix CLT for V_inf (N=2000, R=1000)", criterion5},
        {6, "U_inf mean / plug-in bands (N=2000, R=300)", criterion6},
        {7, "subcritical consistency (R=50)", criterion7},
        {8, "V_t component CLT (R=400)", criterion8},
        {9, "supercritical consistency + CLT (R=200)", criterion9},
        {10, "p = 0 degenerate behavior (R=400 x2)", criterion10},
        {11, "determinism of reports", criterion11},
    };

    int failures = 0;
    int unexpected = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only.count(c.number) == 0) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %2d: %s — %s (%.1f s)\n", out.pass ? "PASS" : "FAIL",
                    c.number, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
        if (expect_mode && out.pass != (expect_pass.count(c.number) > 0)) {
            ++unexpected;
            std::printf("  -> outcome differs from the pinned baseline\n");
        }
    }
    if (failures > 0) std::printf("%d criterion(s) FAILED\n", failures);
    if (expect_mode) {
        std::printf("%d criterion(s) deviate from the pinned baseline\n", unexpected);
        return unexpected == 0 ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
