#pragma once

#include <string>

#include "hawkes/event_log.hpp"

namespace hawkes {

// Bandwidth rule Delta_t = t / (2 floor(t^{1-4/(q+1)})); t/(2 Delta) is a
// positive integer by construction.
double delta_rule(double t, double q);

double epsilon_stat(const EventLog& log, int k_obs, double t);
double v_stat(const EventLog& log, int k_obs, double t);
double z_delta_stat(const EventLog& log, int k_obs, double t, double delta);
double w_stat(const EventLog& log, int k_obs, double t, double delta);
double x_stat(const EventLog& log, int k_obs, double t, double delta);

// Plug-in maps; total functions with the zero fallback outside their domains.
double psi1(double u, double v, double w);
double psi2(double u, double v, double w);
double psi3(double u, double v, double w);

// f(u,v,w) = u(w-u)/(w+sqrt(wu)); psi3 = f^2/(v+f^2) on v > 0.
double psi3_f(double u, double v, double w);

enum class Regime { i, ii, iii, mixed };

std::string regime_name(Regime r);

// The three error-rate terms of the joint limit.
struct RateTerms {
    double regime_i = 0.0;    // 1/sqrt(K)
    double regime_ii = 0.0;   // N/(t sqrt(K))
    double regime_iii = 0.0;  // (N/K) sqrt(Delta_t/t)
};

RateTerms rate_terms(int n, int k, double t, double q);

// Strict dominance by `factor` (max over median of the three terms), else mixed.
Regime dominant_regime(const RateTerms& terms, double factor = 5.0);

// Asymptotic variance of the normalized p-hat error in each regime.
// `paper_literal` is the constant as printed in the source publication;
// `delta_method` propagates the component CLT variances through the partial
// derivatives of psi3 at the fixed point. The two disagree in regimes I and
// II; the delta-method value is the one checked by tests, and reports carry
// both.
struct AsymptoticVariance {
    double paper_literal = 0.0;
    double delta_method = 0.0;
};

AsymptoticVariance asymptotic_variance(Regime regime, double mu, double lambda, double p,
                                       double gamma = -1.0);

// Partial derivatives of psi3 at the consistency point C(mu, Lambda, p).
double psi3_dy_at_fixed_point(double mu, double lambda, double p);
double psi3_dz_at_fixed_point(double mu, double lambda, double p);

struct SubcriticalEstimate {
    double epsilon = 0.0;
    double v_stat = 0.0;
    double z_delta = 0.0;
    double z_2delta = 0.0;
    double w_stat = 0.0;
    double x_stat = 0.0;
    double delta = 0.0;
    double p_hat = 0.0;
    double mu_hat = 0.0;
    double lambda_hat = 0.0;

    // Confidence interval half-widths at level alpha. The default keeps the
    // printed three-term sum but replaces each term's standard deviation by
    // the delta-method value; "paper" is the published display verbatim and
    // "rss" combines the same three terms in quadrature.
    bool ci_valid = false;
    double ci_halfwidth = 0.0;        // default (delta-method, three-term sum)
    double ci_halfwidth_paper = 0.0;  // paper-literal display
    double ci_halfwidth_rss = 0.0;    // delta-method, quadrature combination
    std::string ci_mode = "delta-method";

    int n = 0;
    int k = 0;
    double t = 0.0;
    double q = 0.0;
    double alpha = 0.0;

    RateTerms rates;
    Regime regime = Regime::mixed;
};

SubcriticalEstimate estimate(const EventLog& log, int k_obs, double t, double q, double alpha);

std::string estimate_to_json(const SubcriticalEstimate& e);
std::string estimate_to_csv(const SubcriticalEstimate& e);

}  // namespace hawkes
