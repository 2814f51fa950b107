#include "hawkes/kernel.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "hawkes/errors.hpp"

namespace hawkes {

namespace {

double lgamma_int(int n) { return std::lgamma(static_cast<double>(n)); }

// Density of the sum of n iid Uniform(0,1), the Irwin-Hall density.
double irwin_hall_density(int n, double x) {
    if (x <= 0.0 || x >= static_cast<double>(n)) return (n == 1 && x == 0.0) ? 1.0 : 0.0;
    const int kmax = static_cast<int>(std::floor(x));
    double sum = 0.0;
    double binom = 1.0;  // C(n, k)
    for (int k = 0; k <= kmax; ++k) {
        const double term = binom * std::pow(x - k, n - 1);
        sum += (k % 2 == 0) ? term : -term;
        binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
    }
    return sum / std::exp(lgamma_int(n));
}

// Adaptive Gauss-Kronrod over [lo, hi], split at the supplied breakpoints.
template <typename F>
double integrate_piecewise(const F& f, double lo, double hi, double piece) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    double left = lo;
    while (left < hi) {
        const double right = std::min(hi, left + piece);
        total += gauss_kronrod<double, 31>::integrate(f, left, right, 12, 1e-12);
        left = right;
    }
    return total;
}

}  // namespace

KernelSpec KernelSpec::exponential(double b) {
    if (!(b > 0.0)) throw domain_error("exponential kernel requires rate b > 0");
    return KernelSpec(KernelFamily::exponential, b);
}

KernelSpec KernelSpec::uniform_indicator(double a) {
    if (!(a > 0.0)) throw domain_error("uniform kernel requires cutoff a > 0");
    return KernelSpec(KernelFamily::uniform_indicator, a);
}

KernelSpec KernelSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw domain_error("kernel spec must be \"exp:<b>\" or \"unif:<a>\", got \"" + text + "\"");
    const std::string name = text.substr(0, colon);
    double value;
    try {
        value = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw domain_error("kernel spec has non-numeric parameter: \"" + text + "\"");
    }
    if (name == "exp") return exponential(value);
    if (name == "unif") return uniform_indicator(value);
    throw domain_error("unknown kernel family \"" + name + "\"");
}

std::string KernelSpec::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << (family_ == KernelFamily::exponential ? "exp:" : "unif:") << param_;
    return os.str();
}

double KernelSpec::lambda() const {
    return family_ == KernelFamily::exponential ? 1.0 / param_ : param_;
}

double KernelSpec::q_max() const { return std::numeric_limits<double>::infinity(); }

double KernelSpec::value(double s) const {
    if (s < 0.0) throw domain_error("kernel_value: s must be >= 0");
    if (family_ == KernelFamily::exponential) return std::exp(-param_ * s);
    return s <= param_ ? 1.0 : 0.0;
}

double KernelSpec::tail_integral(double t) const {
    if (t < 0.0) t = 0.0;
    if (family_ == KernelFamily::exponential) return std::exp(-param_ * t) / param_;
    return std::max(0.0, param_ - t);
}

double KernelSpec::convolution_power(int n, double s) const {
    if (n == 0)
        throw domain_error("convolution_power: n = 0 is the Dirac mass, no pointwise value");
    if (n < 0) throw domain_error("convolution_power: n must be >= 0");
    if (s < 0.0) throw domain_error("convolution_power: s must be >= 0");
    if (family_ == KernelFamily::exponential) {
        // phi^{*n}(s) = s^{n-1} e^{-bs} / (n-1)!
        if (n == 1) return std::exp(-param_ * s);
        if (s == 0.0) return 0.0;
        return std::exp((n - 1) * std::log(s) - param_ * s - lgamma_int(n));
    }
    if (n == 1) return value(s);
    // Scaled Irwin-Hall: phi^{*n}(s) = a^{n-1} f_n(s/a).
    const double a = param_;
    return std::pow(a, n - 1) * irwin_hall_density(n, s / a);
}

double KernelSpec::convolution_mass(int n, double t) const {
    if (n < 0) throw domain_error("convolution_mass: n must be >= 0");
    if (n == 0) return t >= 0.0 ? 1.0 : 0.0;
    if (t <= 0.0) return 0.0;
    if (family_ == KernelFamily::exponential) {
        // Lambda^n P(n, bt) with P the regularized lower incomplete gamma.
        return std::pow(lambda(), n) * boost::math::gamma_p(static_cast<double>(n), param_ * t);
    }
    const double hi = std::min(t, static_cast<double>(n) * param_);
    return integrate_piecewise([&](double s) { return convolution_power(n, s); }, 0.0, hi, param_);
}

double KernelSpec::tail_mass(int n, double t) const {
    if (n < 1) throw domain_error("tail_mass: n must be >= 1");
    if (t < 0.0) throw domain_error("tail_mass: t must be >= 0");
    return static_cast<double>(n) * std::pow(lambda(), n - 1) *
           tail_integral(t / static_cast<double>(n));
}

double KernelSpec::excitation_weight(int n, double t) const {
    if (n < 0) throw domain_error("excitation_weight: n must be >= 0");
    if (t < 0.0) throw domain_error("excitation_weight: t must be >= 0");
    if (n == 0) return t;  // phi^{*0} = delta_0
    if (family_ == KernelFamily::exponential) {
        // t Lambda^n P(n, bt) - n Lambda^{n+1} P(n+1, bt)
        const double bt = param_ * t;
        const double lam = lambda();
        return t * std::pow(lam, n) * boost::math::gamma_p(static_cast<double>(n), bt) -
               static_cast<double>(n) * std::pow(lam, n + 1) *
                   boost::math::gamma_p(static_cast<double>(n + 1), bt);
    }
    const double hi = std::min(t, static_cast<double>(n) * param_);
    if (hi <= 0.0) return 0.0;
    return integrate_piecewise([&](double u) { return (t - u) * convolution_power(n, u); }, 0.0,
                               hi, param_);
}

void RegimeParams::validate(const KernelSpec& kernel) const {
    if (!(mu > 0.0)) throw domain_error("regime: mu must be > 0");
    if (p < 0.0 || p > 1.0) throw domain_error("regime: p must be in [0,1]");
    const double lp = kernel.lambda() * p;
    if (criticality == Criticality::subcritical) {
        if (!(lp < 1.0)) throw domain_error("regime: subcritical requires Lambda*p < 1");
    } else {
        if (!(lp > 1.0)) throw domain_error("regime: supercritical requires Lambda*p > 1");
        if (kernel.family() != KernelFamily::exponential)
            throw domain_error("regime: supercritical requires the exponential kernel");
        if (!(p > kernel.param()))
            throw domain_error("regime: supercritical requires p > b");
        if (alpha0 && std::abs(*alpha0 - (p - kernel.param())) > 1e-12)
            throw domain_error("regime: alpha0 must equal p - b");
    }
    if (gamma && (*gamma < 0.0 || *gamma > 1.0))
        throw domain_error("regime: gamma must be in [0,1]");
}

}  // namespace hawkes
