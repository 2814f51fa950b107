#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace hawkes {

double normal_cdf(double x);

// Inverse standard normal CDF, Acklam's rational approximation plus one
// Halley refinement step; absolute error well below 1e-9.
double normal_quantile(double p);

struct KsResult {
    double statistic = 0.0;  // sup-norm distance D_n
    double p_value = 1.0;    // asymptotic, with Stephens' small-sample correction
};

// One-sample two-sided KS test against a continuous CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
double kolmogorov_sf(double lambda);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // unbiased
double median(std::vector<double> v);

// (theoretical, empirical) quantile pairs against N(mu, sigma^2).
std::vector<std::pair<double, double>> normal_qq_points(std::vector<double> samples,
                                                        double mu, double sigma);

}  // namespace hawkes
