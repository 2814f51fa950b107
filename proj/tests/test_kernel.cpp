#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "hawkes/errors.hpp"
#include "hawkes/kernel.hpp"

using namespace hawkes;

namespace {

// Independent numeric mass of phi^{*n} over [0, hi], piecewise Gauss-Kronrod.
double numeric_mass(const KernelSpec& k, int n, double hi, double piece) {
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    double left = 0.0;
    while (left < hi) {
        const double right = std::min(hi, left + piece);
        total += gauss_kronrod<double, 31>::integrate(
            [&](double s) { return k.convolution_power(n, s); }, left, right, 12, 1e-12);
        left = right;
    }
    return total;
}

// Integrates f over [0, hi] splitting panels at the supplied kink locations
// (the uniform-kernel convolution powers are only piecewise smooth).
template <typename F>
double integrate_with_kinks(const F& f, double hi, std::vector<double> kinks) {
    using boost::math::quadrature::gauss_kronrod;
    kinks.push_back(0.0);
    kinks.push_back(hi);
    std::sort(kinks.begin(), kinks.end());
    double total = 0.0;
    for (std::size_t i = 1; i < kinks.size(); ++i) {
        const double a = std::clamp(kinks[i - 1], 0.0, hi);
        const double b = std::clamp(kinks[i], 0.0, hi);
        if (b - a < 1e-14) continue;
        total += gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
    }
    return total;
}

std::vector<double> kink_points(const KernelSpec& k, double hi, double mirror_at) {
    std::vector<double> kinks;
    if (k.family() == KernelFamily::uniform_indicator) {
        for (double x = 0.0; x <= hi + 1e-12; x += k.param()) {
            kinks.push_back(x);
            if (mirror_at > 0.0) kinks.push_back(mirror_at - x);
        }
    }
    return kinks;
}

}  // namespace

TEST_CASE("kernel_value examples") {
    const auto e2 = KernelSpec::exponential(2.0);
    CHECK(e2.value(0.0) == 1.0);
    CHECK(e2.value(0.5) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
    const auto u3 = KernelSpec::uniform_indicator(3.0);
    CHECK(u3.value(5.0) == 0.0);
    CHECK(u3.value(3.0) == 1.0);
    CHECK_THROWS_AS(e2.value(-1.0), domain_error);
}

TEST_CASE("lambda is the exact closed form") {
    CHECK(KernelSpec::exponential(2.0).lambda() == 0.5);
    CHECK(KernelSpec::uniform_indicator(3.0).lambda() == 3.0);
    CHECK(std::isinf(KernelSpec::exponential(1.0).q_max()));
}

TEST_CASE("kernel config parsing") {
    CHECK(KernelSpec::parse("exp:2").family() == KernelFamily::exponential);
    CHECK(KernelSpec::parse("exp:2").param() == 2.0);
    CHECK(KernelSpec::parse("unif:0.5").family() == KernelFamily::uniform_indicator);
    CHECK(KernelSpec::parse(KernelSpec::exponential(1.25).to_string()).param() == 1.25);
    CHECK_THROWS_AS(KernelSpec::parse("exp"), domain_error);
    CHECK_THROWS_AS(KernelSpec::parse("gauss:1"), domain_error);
    CHECK_THROWS_AS(KernelSpec::parse("exp:zzz"), domain_error);
    CHECK_THROWS_AS(KernelSpec::exponential(0.0), domain_error);
}

TEST_CASE("convolution_power examples") {
    const auto e1 = KernelSpec::exponential(1.0);
    CHECK(e1.convolution_power(1, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(e1.convolution_power(3, 2.0) == doctest::Approx(0.2706705664732254).epsilon(1e-13));
    CHECK_THROWS_AS(e1.convolution_power(0, 1.0), domain_error);

    const auto u1 = KernelSpec::uniform_indicator(1.0);
    // phi^{*2} is the triangle on [0, 2].
    CHECK(u1.convolution_power(2, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u1.convolution_power(2, 1.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(u1.convolution_power(2, 3.0) == 0.0);
}

TEST_CASE("mass conservation for n <= 6") {
    const auto e = KernelSpec::exponential(1.5);
    const auto u = KernelSpec::uniform_indicator(0.8);
    for (int n = 1; n <= 6; ++n) {
        const double le = std::pow(e.lambda(), n);
        const double lu = std::pow(u.lambda(), n);
        CHECK(std::abs(numeric_mass(e, n, (n + 60.0) / 1.5, 1.0) - le) < 1e-8);
        CHECK(std::abs(numeric_mass(u, n, n * 0.8, 0.8) - lu) < 1e-8);
        // convolution_mass agrees with the independent quadrature
        CHECK(e.convolution_mass(n, (n + 60.0) / 1.5) == doctest::Approx(le).epsilon(1e-10));
        CHECK(u.convolution_mass(n, n * 0.8) == doctest::Approx(lu).epsilon(1e-9));
    }
}

TEST_CASE("semigroup property on a grid") {
    for (const auto& k : {KernelSpec::exponential(1.3), KernelSpec::uniform_indicator(0.9)}) {
        for (int m = 1; m <= 3; ++m) {
            for (int n = 1; n <= 3; ++n) {
                for (double s : {0.4, 1.1, 2.3}) {
                    const double direct = k.convolution_power(m + n, s);
                    const double conv = integrate_with_kinks(
                        [&](double r) {
                            return k.convolution_power(m, r) * k.convolution_power(n, s - r);
                        },
                        s, kink_points(k, s, s));
                    CHECK(std::abs(direct - conv) < 1e-8);
                }
            }
        }
    }
}

TEST_CASE("tail_mass examples and monotonicity") {
    const auto e1 = KernelSpec::exponential(1.0);
    CHECK(e1.tail_mass(1, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(e1.tail_mass(2, 4.0) == doctest::Approx(0.2706705664732254).epsilon(1e-13));
    const auto e2 = KernelSpec::exponential(2.0);
    CHECK(e2.tail_mass(1, 10.0) == doctest::Approx(1.030576811219279e-09).epsilon(1e-12));

    for (const auto& k : {KernelSpec::exponential(0.7), KernelSpec::uniform_indicator(1.4)}) {
        for (int n = 1; n <= 4; ++n) {
            double prev = k.tail_mass(n, 0.0);
            CHECK(prev <= n * std::pow(k.lambda(), n) + 1e-12);
            for (double t = 0.25; t < 8.0; t += 0.25) {
                const double cur = k.tail_mass(n, t);
                CHECK(cur <= prev + 1e-12);
                prev = cur;
            }
        }
    }
}

TEST_CASE("excitation weights match independent quadrature") {
    for (const auto& k : {KernelSpec::exponential(2.0), KernelSpec::uniform_indicator(0.7)}) {
        CHECK(k.excitation_weight(0, 3.5) == 3.5);
        for (int n = 1; n <= 4; ++n) {
            for (double t : {0.5, 2.0, 7.0}) {
                const double direct = k.excitation_weight(n, t);
                const double numeric = integrate_with_kinks(
                    [&](double u) { return (t - u) * k.convolution_power(n, u); }, t,
                    kink_points(k, t, 0.0));
                CHECK(std::abs(direct - numeric) < 1e-9);
            }
        }
    }
}

TEST_CASE("regime validation") {
    const auto e1 = KernelSpec::exponential(1.0);  // Lambda = 1
    RegimeParams sub{1.0, 0.5, Criticality::subcritical, {}, {}};
    CHECK_NOTHROW(sub.validate(e1));
    RegimeParams bad_sub{1.0, 1.0, Criticality::subcritical, {}, {}};
    CHECK_THROWS_AS(bad_sub.validate(e1), domain_error);

    const auto e03 = KernelSpec::exponential(0.3);  // Lambda = 10/3
    RegimeParams sup{1.0, 0.6, Criticality::supercritical, 0.3, {}};
    CHECK_NOTHROW(sup.validate(e03));
    RegimeParams sup_pb{1.0, 0.2, Criticality::supercritical, {}, {}};
    CHECK_THROWS_AS(sup_pb.validate(e03), domain_error);
    RegimeParams sup_unif{1.0, 0.9, Criticality::supercritical, {}, {}};
    CHECK_THROWS_AS(sup_unif.validate(KernelSpec::uniform_indicator(2.0)), domain_error);
    RegimeParams bad_gamma{1.0, 0.5, Criticality::subcritical, {}, 1.5};
    CHECK_THROWS_AS(bad_gamma.validate(e1), domain_error);
}
