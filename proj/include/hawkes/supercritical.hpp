#pragma once

#include <string>

#include "hawkes/event_log.hpp"

namespace hawkes {

double u_stat(const EventLog& log, int k_obs, double t);

// P = 1/(U+1) on U >= 0, else 0.
double p_stat(double u);

// Limit variance 2 (p-b)^4 p^2 / mu^2 of the normalized P-error; requires p > b.
double asymptotic_variance_super(double mu, double p, double b);

struct SupercriticalEstimate {
    double z_bar = 0.0;
    double u_stat = 0.0;
    double p_stat = 0.0;
    int n = 0;
    int k = 0;
    double t = 0.0;
    // Growth rate used for normalizations: exact p - b in validation mode, a
    // log-slope fit over the last quarter of [0, t] otherwise (auxiliary, not
    // a quantity from the estimator itself).
    double alpha0_used = 0.0;
    std::string alpha0_mode = "validation";
};

// Validation mode: alpha0 from the true (p, b).
SupercriticalEstimate estimate_super(const EventLog& log, int k_obs, double t, double p_true,
                                     double b);

// Pure-inference mode: alpha0 fitted from the growth of log bar-Z.
SupercriticalEstimate estimate_super_inferred(const EventLog& log, int k_obs, double t);

std::string estimate_super_to_json(const SupercriticalEstimate& e);
std::string estimate_super_to_csv(const SupercriticalEstimate& e);

}  // namespace hawkes
