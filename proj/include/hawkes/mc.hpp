#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hawkes/kernel.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/subcritical.hpp"

namespace hawkes {

enum class Target {
    graph_v_inf_clt,
    graph_u_inf,
    sub_consistency,
    sub_clt_regime_i,
    sub_clt_regime_ii,
    sub_clt_regime_iii,
    super_consistency,
    super_clt,
    p_zero_prop,
};

std::string target_name(Target t);
Target target_from_name(const std::string& name);

struct Tolerances {
    double variance_band = 0.3;   // relative band on empirical/theoretical variance; 0 = report only
    double ks_level = 0.01;       // 0 = report only
    double mean_abs_band = 0.1;   // graph_u_inf: |mean U - (1/p - 1)|
    double plug_in_band = 0.03;   // graph_u_inf: |mean 1/(U+1) - p|
    double median_p_band = 0.05;
    double median_mu_band = 0.1;
    double median_lambda_band = 0.15;
    double freq_low = 0.4;        // p_zero_prop regime (ii) band on P(p_hat > 0.5)
    double freq_high = 0.6;
    double dominance_factor = 5.0;
    std::optional<double> coverage_low;   // enables the CI coverage check when set
    std::optional<double> coverage_high;
};

struct ExperimentConfig {
    Target target = Target::graph_v_inf_clt;
    int n = 100;
    int k = 50;
    double t = 100.0;
    double q = 7.0;
    double mu = 1.0;
    std::string kernel = "exp:1";
    double p = 0.5;
    std::optional<double> gamma;
    double alpha = 0.1;
    int replicas = 100;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    std::uint64_t event_budget = 10'000'000;
    std::string p_zero_flavor = "regime_ii";  // p_zero_prop only
    Tolerances tol;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
};

struct ReplicaRecord {
    int index = 0;
    std::uint64_t graph_seed = 0;
    std::uint64_t sim_seed = 0;
    std::uint64_t events = 0;
    bool failed = false;
    std::string failure;
    std::map<std::string, double> stats;
    std::optional<double> normalized_error;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct MCReport {
    ExperimentConfig config;
    std::vector<ReplicaRecord> replicas;

    int ok_count = 0;
    int failed_count = 0;
    std::uint64_t total_events = 0;

    // Normalized-error aggregates for CLT targets.
    double mean_normalized = 0.0;
    double var_normalized = 0.0;
    double theoretical_variance_paper = 0.0;
    double theoretical_variance_delta = 0.0;
    double variance_ratio = 0.0;  // empirical over delta-method theoretical
    KsResult ks;
    std::vector<std::pair<double, double>> qq;

    std::map<std::string, double> summary;  // target-specific scalars (medians, means, coverage)
    RateTerms rates;
    Regime regime = Regime::mixed;
    double realized_dominance = 0.0;

    std::vector<CheckResult> checks;
    bool pass = false;

    double wall_clock_sec = 0.0;  // excluded from the deterministic serialization

    std::string to_json(bool include_timing = true) const;
};

// The three error-rate terms and the strictly dominating regime (or mixed).
std::pair<Regime, RateTerms> classify_regime(int n, int k, double t, double q,
                                             double factor = 5.0);

MCReport run_experiment(const ExperimentConfig& cfg);

void write_qq_csv(const MCReport& report, const std::string& path);

}  // namespace hawkes
