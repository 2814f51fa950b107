#pragma once

#include <optional>
#include <string>

namespace hawkes {

enum class KernelFamily {
    exponential,        // phi(s) = exp(-b s)
    uniform_indicator,  // phi(s) = 1_{[0,a]}(s)
};

// Decay kernel phi with exact total mass Lambda and the convolution machinery
// needed by the expected-trajectory series.
class KernelSpec {
public:
    static KernelSpec exponential(double b);
    static KernelSpec uniform_indicator(double a);

    // Config syntax: "exp:<b>" or "unif:<a>".
    static KernelSpec parse(const std::string& text);
    std::string to_string() const;

    KernelFamily family() const { return family_; }
    // Decay rate b (exponential) or cutoff a (uniform).
    double param() const { return param_; }

    // Lambda = integral of phi over [0, inf), closed form.
    double lambda() const;

    // Largest q with finite q-th moment of phi; +inf for both built-ins.
    double q_max() const;

    // phi(s); s must be >= 0.
    double value(double s) const;

    // Integral of phi over [t, inf).
    double tail_integral(double t) const;

    // n-fold self-convolution phi^{*n}(s), n >= 1 (n = 0 is the Dirac mass and
    // has no pointwise value).
    double convolution_power(int n, double s) const;

    // Integral of phi^{*n} over [0, t].
    double convolution_mass(int n, double t) const;

    // Upper bound n Lambda^{n-1} Integral_{t/n}^inf phi(s) ds on
    // |Integral_0^t phi^{*n} - Lambda^n|; drives series truncation depth.
    double tail_mass(int n, double t) const;

    // Integral_0^t (t-u) phi^{*n}(u) du; n = 0 returns t (Dirac convention).
    double excitation_weight(int n, double t) const;

private:
    KernelSpec(KernelFamily family, double param) : family_(family), param_(param) {}

    KernelFamily family_;
    double param_;
};

enum class Criticality { subcritical, supercritical };

// Baseline rate, edge probability and regime flags, validated against the kernel.
struct RegimeParams {
    double mu = 1.0;
    double p = 0.0;
    Criticality criticality = Criticality::subcritical;
    std::optional<double> alpha0;  // p - b, supercritical only
    std::optional<double> gamma;   // limit of K/N, regime (iii)

    // Throws domain_error when the (kernel, parameters) pair violates the
    // regime's standing assumptions.
    void validate(const KernelSpec& kernel) const;
};

}  // namespace hawkes
