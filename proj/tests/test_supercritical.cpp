#include <doctest.h>

#include <cmath>

#include "hawkes/errors.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/supercritical.hpp"

using namespace hawkes;

TEST_CASE("u_stat hand counts and indicator clauses") {
    EventLog empty;
    empty.n = 2;
    empty.horizon = 5.0;
    empty.events = {{}, {}};
    CHECK(u_stat(empty, 2, 1.0) == 0.0);  // bar Z = 0 -> indicator

    EventLog toy;
    toy.n = 2;
    toy.horizon = 1.0;
    toy.events = {{0.1, 0.2, 0.3}, {0.5}};
    CHECK(u_stat(toy, 2, 1.0) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("p_stat clauses and monotonicity") {
    CHECK(p_stat(0.0) == 1.0);
    CHECK(p_stat(1.0) == 0.5);
    CHECK(p_stat(-0.2) == 0.0);
    double prev = 1.0;
    for (double u = 0.05; u < 20.0; u += 0.37) {
        const double cur = p_stat(u);
        CHECK(cur < prev);
        CHECK(cur >= 0.0);
        CHECK(cur <= 1.0);
        prev = cur;
    }
}

TEST_CASE("supercritical asymptotic variance") {
    CHECK(asymptotic_variance_super(1.0, 0.5, 0.2) == doctest::Approx(0.00405).epsilon(1e-12));
    CHECK(asymptotic_variance_super(2.0, 0.6, 0.3) == doctest::Approx(0.001458).epsilon(1e-12));
    CHECK_THROWS_AS(asymptotic_variance_super(1.0, 0.3, 0.3), domain_error);
}

TEST_CASE("estimate_super on a simulated burst") {
    const auto g = sample_graph(100, 0.6, 13579);
    const auto kernel = KernelSpec::exponential(0.3);
    const auto log = simulate(g, kernel, 1.0, 15.0, 24680, 20'000'000);

    const auto est = estimate_super(log, 50, 15.0, 0.6, 0.3);
    CHECK(est.alpha0_used == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(est.alpha0_mode == "validation");
    CHECK(est.u_stat > 0.0);
    CHECK(est.p_stat > 0.3);
    CHECK(est.p_stat < 0.9);
    CHECK(est.z_bar > 0.0);

    const auto fit = estimate_super_inferred(log, 50, 15.0);
    CHECK(fit.alpha0_mode == "fitted-slope");
    CHECK(std::abs(fit.alpha0_used - 0.3) / 0.3 < 0.3);

    CHECK_THROWS_AS(estimate_super(log, 50, 15.0, 0.2, 0.3), domain_error);
}

TEST_CASE("json and csv serializations carry the report shape") {
    EventLog toy;
    toy.n = 2;
    toy.horizon = 1.0;
    toy.events = {{0.1}, {0.5}};
    const auto est = estimate_super(toy, 2, 1.0, 0.6, 0.3);
    const auto j = estimate_super_to_json(est);
    CHECK(j.find("\"u\"") != std::string::npos);
    CHECK(j.find("\"p\"") != std::string::npos);
    CHECK(j.find("alpha0_used") != std::string::npos);
    const auto c = estimate_super_to_csv(est);
    CHECK(c.find("z_bar,u,p") == 0);
}
