#include "hawkes/supercritical.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hawkes/errors.hpp"

namespace hawkes {

double u_stat(const EventLog& log, int k_obs, double t) {
    if (k_obs < 1 || k_obs > log.n) throw domain_error("u_stat: K must satisfy 1 <= K <= N");
    if (t < 0.0 || t > log.horizon + 1e-9) throw horizon_error("u_stat: needs horizon >= t");
    const double k = static_cast<double>(k_obs);
    const double n = static_cast<double>(log.n);
    double z_bar = 0.0;
    for (int i = 0; i < k_obs; ++i) z_bar += log.count_at(i, t);
    z_bar /= k;
    if (!(z_bar > 0.0)) return 0.0;
    double ss = 0.0;
    for (int i = 0; i < k_obs; ++i) {
        const double d = (static_cast<double>(log.count_at(i, t)) - z_bar) / z_bar;
        ss += d * d;
    }
    return n / k * ss - n / z_bar;
}

double p_stat(double u) { return u >= 0.0 ? 1.0 / (u + 1.0) : 0.0; }

double asymptotic_variance_super(double mu, double p, double b) {
    if (!(mu > 0.0)) throw domain_error("asymptotic_variance_super: mu must be > 0");
    if (!(p > b)) throw domain_error("asymptotic_variance_super: requires p > b (alpha0 > 0)");
    const double alpha0 = p - b;
    return 2.0 * std::pow(alpha0, 4) * p * p / (mu * mu);
}

namespace {

SupercriticalEstimate base_estimate(const EventLog& log, int k_obs, double t) {
    SupercriticalEstimate e;
    e.n = log.n;
    e.k = k_obs;
    e.t = t;
    e.z_bar = log.bar_count(k_obs, t);
    e.u_stat = u_stat(log, k_obs, t);
    e.p_stat = p_stat(e.u_stat);
    return e;
}

}  // namespace

SupercriticalEstimate estimate_super(const EventLog& log, int k_obs, double t, double p_true,
                                     double b) {
    if (!(p_true > b)) throw domain_error("estimate_super: requires p > b");
    SupercriticalEstimate e = base_estimate(log, k_obs, t);
    e.alpha0_used = p_true - b;
    e.alpha0_mode = "validation";
    return e;
}

SupercriticalEstimate estimate_super_inferred(const EventLog& log, int k_obs, double t) {
    SupercriticalEstimate e = base_estimate(log, k_obs, t);
    // Least-squares slope of log bar-Z over a grid spanning the last quarter.
    const int points = 32;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int used = 0;
    for (int idx = 0; idx < points; ++idx) {
        const double s =
            0.75 * t + 0.25 * t * static_cast<double>(idx + 1) / static_cast<double>(points);
        const double z = log.bar_count(k_obs, s);
        if (!(z > 0.0)) continue;
        const double y = std::log(z);
        sx += s;
        sy += y;
        sxx += s * s;
        sxy += s * y;
        ++used;
    }
    if (used >= 2 && sxx * used - sx * sx > 0.0)
        e.alpha0_used = (sxy * used - sx * sy) / (sxx * used - sx * sx);
    else
        e.alpha0_used = 0.0;
    e.alpha0_mode = "fitted-slope";
    return e;
}

std::string estimate_super_to_json(const SupercriticalEstimate& e) {
    nlohmann::json j;
    j["z_bar"] = e.z_bar;
    j["u"] = e.u_stat;
    j["p"] = e.p_stat;
    j["alpha0_used"] = e.alpha0_used;
    j["alpha0_mode"] = e.alpha0_mode;
    j["inputs"] = {{"n", e.n}, {"k", e.k}, {"t", e.t}};
    return j.dump(2);
}

std::string estimate_super_to_csv(const SupercriticalEstimate& e) {
    std::ostringstream os;
    os.precision(17);
    os << "z_bar,u,p,alpha0_used,alpha0_mode,n,k,t\n";
    os << e.z_bar << ',' << e.u_stat << ',' << e.p_stat << ',' << e.alpha0_used << ','
       << e.alpha0_mode << ',' << e.n << ',' << e.k << ',' << e.t << '\n';
    return os.str();
}

}  // namespace hawkes
