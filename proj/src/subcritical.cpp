#include "hawkes/subcritical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hawkes/errors.hpp"
#include "hawkes/stats.hpp"

namespace hawkes {

double delta_rule(double t, double q) {
    if (!(t >= 4.0)) throw horizon_error("delta_rule: requires t >= 4");
    if (!(q > 3.0)) throw domain_error("delta_rule: requires q > 3");
    const double m = std::floor(std::pow(t, 1.0 - 4.0 / (q + 1.0)));
    if (m < 1.0) throw horizon_error("delta_rule: floor(t^{1-4/(q+1)}) = 0, horizon too short");
    return t / (2.0 * m);
}

namespace {

void check_window(const EventLog& log, int k_obs, double t) {
    if (k_obs < 1 || k_obs > log.n) throw domain_error("k_obs must satisfy 1 <= K <= N");
    if (!(t > 0.0)) throw domain_error("t must be > 0");
    if (log.horizon < 2.0 * t - 1e-9)
        throw horizon_error("statistic needs horizon >= 2t");
}

// Number of grid cells t/delta, validated to be integral.
long grid_cells(double t, double delta) {
    const double cells = t / delta;
    const double rounded = std::round(cells);
    if (std::abs(cells - rounded) > 1e-9 || rounded < 1.0)
        throw grid_error("t/Delta must be a positive integer");
    return static_cast<long>(rounded);
}

}  // namespace

double epsilon_stat(const EventLog& log, int k_obs, double t) {
    check_window(log, k_obs, t);
    return (log.bar_count(k_obs, 2.0 * t) - log.bar_count(k_obs, t)) / t;
}

double v_stat(const EventLog& log, int k_obs, double t) {
    check_window(log, k_obs, t);
    const double eps = epsilon_stat(log, k_obs, t);
    const double n = static_cast<double>(log.n);
    const double k = static_cast<double>(k_obs);
    double ss = 0.0;
    for (int i = 0; i < k_obs; ++i) {
        const double inc =
            static_cast<double>(log.count_at(i, 2.0 * t) - log.count_at(i, t)) / t;
        ss += (inc - eps) * (inc - eps);
    }
    return n / k * ss - n / t * eps;
}

double z_delta_stat(const EventLog& log, int k_obs, double t, double delta) {
    check_window(log, k_obs, t);
    const long cells = grid_cells(t, delta);
    const double eps = epsilon_stat(log, k_obs, t);

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(cells) + 1);
    for (long a = cells; a <= 2 * cells; ++a) grid.push_back(static_cast<double>(a) * delta);
    const auto bar = log.bar_counts_on_grid(k_obs, grid);

    double ss = 0.0;
    for (std::size_t idx = 1; idx < bar.size(); ++idx) {
        const double d = bar[idx] - bar[idx - 1] - delta * eps;
        ss += d * d;
    }
    return static_cast<double>(log.n) / t * ss;
}

double w_stat(const EventLog& log, int k_obs, double t, double delta) {
    return 2.0 * z_delta_stat(log, k_obs, t, 2.0 * delta) - z_delta_stat(log, k_obs, t, delta);
}

double x_stat(const EventLog& log, int k_obs, double t, double delta) {
    const double w = w_stat(log, k_obs, t, delta);
    const double eps = epsilon_stat(log, k_obs, t);
    return w - static_cast<double>(log.n - k_obs) / static_cast<double>(k_obs) * eps;
}

double psi1(double u, double v, double w) {
    if (!(u > 0.0 && v > 0.0 && w > u)) return 0.0;
    return u * std::sqrt(u / w);
}

double psi2(double u, double v, double w) {
    if (!(u > 0.0 && v > 0.0 && w > u)) return 0.0;
    const double p1 = u * std::sqrt(u / w);
    return (v + (u - p1) * (u - p1)) / (u * (u - p1));
}

double psi3(double u, double v, double w) {
    if (!(u > 0.0 && v > 0.0 && w > 0.0)) return 0.0;
    const double r = 1.0 - std::sqrt(u / w);
    const double num = u * u * r * r;
    return num / (v + num);
}

double psi3_f(double u, double v, double w) {
    (void)v;
    if (!(u > 0.0 && w > 0.0)) return 0.0;
    return u * (w - u) / (w + std::sqrt(w * u));
}

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::i: return "I";
        case Regime::ii: return "II";
        case Regime::iii: return "III";
        default: return "mixed";
    }
}

RateTerms rate_terms(int n, int k, double t, double q) {
    const double delta = delta_rule(t, q);
    RateTerms terms;
    terms.regime_i = 1.0 / std::sqrt(static_cast<double>(k));
    terms.regime_ii = static_cast<double>(n) / (t * std::sqrt(static_cast<double>(k)));
    terms.regime_iii =
        static_cast<double>(n) / static_cast<double>(k) * std::sqrt(delta / t);
    return terms;
}

Regime dominant_regime(const RateTerms& terms, double factor) {
    double sorted[3] = {terms.regime_i, terms.regime_ii, terms.regime_iii};
    std::sort(sorted, sorted + 3);
    if (sorted[1] <= 0.0 || sorted[2] < factor * sorted[1]) return Regime::mixed;
    if (sorted[2] == terms.regime_i) return Regime::i;
    if (sorted[2] == terms.regime_ii) return Regime::ii;
    return Regime::iii;
}

double psi3_dy_at_fixed_point(double mu, double lambda, double p) {
    const double s = 1.0 - lambda * p;
    return -s * s / (mu * mu * lambda * lambda);
}

double psi3_dz_at_fixed_point(double mu, double lambda, double p) {
    const double s = 1.0 - lambda * p;
    return s * s * s * s * (1.0 - p) / (mu * lambda);
}

AsymptoticVariance asymptotic_variance(Regime regime, double mu, double lambda, double p,
                                       double gamma) {
    if (!(lambda * p < 1.0)) throw domain_error("asymptotic_variance: requires Lambda*p < 1");
    if (!(mu > 0.0 && lambda > 0.0)) throw domain_error("asymptotic_variance: mu, Lambda > 0");
    const double s = 1.0 - lambda * p;
    const double dy = psi3_dy_at_fixed_point(mu, lambda, p);
    const double dz = psi3_dz_at_fixed_point(mu, lambda, p);

    AsymptoticVariance out;
    switch (regime) {
        case Regime::i: {
            // sqrt(K) fluctuation of V_t comes from the matrix limit, scaled by mu^2.
            const double matrix_sd = mu * mu * lambda * lambda * p * (1.0 - p) / (s * s);
            out.delta_method = dy * dy * matrix_sd * matrix_sd;
            out.paper_literal = p * p * (1.0 - p) * (1.0 - p) / std::pow(mu, 4);
            break;
        }
        case Regime::ii: {
            const double component_var = 2.0 * mu * mu / (s * s);
            out.delta_method = dy * dy * component_var;
            out.paper_literal = 2.0 * s / (mu * mu * std::pow(lambda, 4));
            break;
        }
        case Regime::iii: {
            if (gamma < 0.0 || gamma > 1.0)
                throw domain_error("asymptotic_variance: regime III requires gamma in [0,1]");
            const double bracket = (1.0 - gamma) / s + gamma / (s * s * s);
            const double component_var = 1.5 * bracket * bracket;
            out.delta_method = dz * dz * component_var;
            const double lit = (1.0 - gamma) * s * s * s + gamma * s;
            out.paper_literal =
                3.0 * (1.0 - p) * (1.0 - p) / (2.0 * mu * mu * lambda * lambda) * lit * lit;
            break;
        }
        default:
            throw domain_error("asymptotic_variance: regime must be I, II or III");
    }
    return out;
}

SubcriticalEstimate estimate(const EventLog& log, int k_obs, double t, double q, double alpha) {
    SubcriticalEstimate e;
    e.n = log.n;
    e.k = k_obs;
    e.t = t;
    e.q = q;
    e.alpha = alpha;
    e.delta = delta_rule(t, q);
    e.epsilon = epsilon_stat(log, k_obs, t);
    e.v_stat = v_stat(log, k_obs, t);
    e.z_delta = z_delta_stat(log, k_obs, t, e.delta);
    e.z_2delta = z_delta_stat(log, k_obs, t, 2.0 * e.delta);
    e.w_stat = 2.0 * e.z_2delta - e.z_delta;
    e.x_stat = e.w_stat -
               static_cast<double>(log.n - k_obs) / static_cast<double>(k_obs) * e.epsilon;
    e.p_hat = psi3(e.epsilon, e.v_stat, e.x_stat);
    e.mu_hat = psi1(e.epsilon, e.v_stat, e.x_stat);
    e.lambda_hat = psi2(e.epsilon, e.v_stat, e.x_stat);
    e.rates = rate_terms(log.n, k_obs, t, q);
    e.regime = dominant_regime(e.rates);

    // Interval of the printed display and its delta-method counterpart; both
    // need plug-in estimates inside their asymptotic domain.
    const bool domain_ok = e.p_hat > 0.0 && e.p_hat < 1.0 && e.mu_hat > 0.0 &&
                           e.lambda_hat > 0.0 && e.lambda_hat * e.p_hat < 1.0;
    if (domain_ok && alpha > 0.0 && alpha < 1.0) {
        const double quant = normal_quantile(1.0 - alpha / 2.0);
        const double gamma = static_cast<double>(k_obs) / static_cast<double>(log.n);

        const double s1 =
            std::sqrt(asymptotic_variance(Regime::i, e.mu_hat, e.lambda_hat, e.p_hat).delta_method);
        const double s2 = std::sqrt(
            asymptotic_variance(Regime::ii, e.mu_hat, e.lambda_hat, e.p_hat).delta_method);
        const double s3 = std::sqrt(
            asymptotic_variance(Regime::iii, e.mu_hat, e.lambda_hat, e.p_hat, gamma).delta_method);
        const double a1 = e.rates.regime_i * s1;
        const double a2 = e.rates.regime_ii * s2;
        const double a3 = e.rates.regime_iii * s3;
        e.ci_halfwidth = quant * (a1 + a2 + a3);
        e.ci_halfwidth_rss = quant * std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);

        // Verbatim display, typos included; may be NaN when 1 - mu_hat < 0.
        const double term1 = e.rates.regime_i * (e.p_hat * (1.0 - e.p_hat) / e.p_hat);
        const double term2 = e.rates.regime_ii * std::sqrt(2.0 * (1.0 - e.mu_hat)) /
                             (e.mu_hat * e.lambda_hat * e.lambda_hat);
        const double term3 =
            e.rates.regime_iii * std::sqrt(3.0 * (1.0 - e.p_hat) * (1.0 - e.p_hat) /
                                           (2.0 * e.mu_hat * e.mu_hat * e.lambda_hat * e.lambda_hat));
        e.ci_halfwidth_paper = quant * (term1 + term2 + term3);
        e.ci_valid = true;
    }
    return e;
}

namespace {

nlohmann::json estimate_json(const SubcriticalEstimate& e) {
    nlohmann::json j;
    j["epsilon"] = e.epsilon;
    j["v_stat"] = e.v_stat;
    j["z_delta"] = e.z_delta;
    j["z_2delta"] = e.z_2delta;
    j["w_stat"] = e.w_stat;
    j["x_stat"] = e.x_stat;
    j["delta"] = e.delta;
    j["p_hat"] = e.p_hat;
    j["mu_hat"] = e.mu_hat;
    j["lambda_hat"] = e.lambda_hat;
    j["ci"] = {{"valid", e.ci_valid},
               {"mode", e.ci_mode},
               {"halfwidth", e.ci_valid ? nlohmann::json(e.ci_halfwidth) : nlohmann::json()},
               {"halfwidth_rss", e.ci_valid ? nlohmann::json(e.ci_halfwidth_rss) : nlohmann::json()},
               {"halfwidth_paper_literal",
                e.ci_valid && std::isfinite(e.ci_halfwidth_paper)
                    ? nlohmann::json(e.ci_halfwidth_paper)
                    : nlohmann::json()}};
    j["inputs"] = {{"n", e.n}, {"k", e.k}, {"t", e.t}, {"q", e.q}, {"alpha", e.alpha}};
    j["regime"] = {{"dominant", regime_name(e.regime)},
                   {"term_i", e.rates.regime_i},
                   {"term_ii", e.rates.regime_ii},
                   {"term_iii", e.rates.regime_iii}};
    return j;
}

}  // namespace

std::string estimate_to_json(const SubcriticalEstimate& e) { return estimate_json(e).dump(2); }

std::string estimate_to_csv(const SubcriticalEstimate& e) {
    std::ostringstream os;
    os.precision(17);
    os << "epsilon,v_stat,z_delta,z_2delta,w_stat,x_stat,delta,p_hat,mu_hat,lambda_hat,"
          "ci_halfwidth,ci_halfwidth_paper_literal,n,k,t,q,alpha,regime\n";
    os << e.epsilon << ',' << e.v_stat << ',' << e.z_delta << ',' << e.z_2delta << ','
       << e.w_stat << ',' << e.x_stat << ',' << e.delta << ',' << e.p_hat << ',' << e.mu_hat
       << ',' << e.lambda_hat << ',' << (e.ci_valid ? e.ci_halfwidth : std::nan("")) << ','
       << (e.ci_valid ? e.ci_halfwidth_paper : std::nan("")) << ',' << e.n << ',' << e.k << ','
       << e.t << ',' << e.q << ',' << e.alpha << ',' << regime_name(e.regime) << '\n';
    return os.str();
}

}  // namespace hawkes
