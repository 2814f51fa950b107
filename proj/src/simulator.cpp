#include "hawkes/simulator.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <deque>

#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

void check_horizon(double horizon) {
    if (!(horizon > 0.0)) throw domain_error("simulate: horizon must be > 0");
}

double subcritical_gate(const InteractionGraph& g, double lambda) {
    return lambda * static_cast<double>(g.max_row_sum()) / static_cast<double>(g.n());
}

// Appends an accepted event time, quantized to the on-disk precision and kept
// strictly increasing within the individual.
void push_event(std::vector<double>& times, double t) {
    double tq = quantize_time(t);
    if (!times.empty() && tq <= times.back()) tq = times.back() + 1e-9;
    times.push_back(tq);
}

EventLog simulate_exponential(const InteractionGraph& g, const KernelSpec& kernel, double mu,
                              double horizon, std::uint64_t seed, std::uint64_t budget) {
    const int n = g.n();
    const double b = kernel.param();
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto receivers = g.receivers_by_source();

    EventLog log;
    log.n = n;
    log.horizon = horizon;
    log.events.assign(static_cast<std::size_t>(n), {});

    Rng rng(derive_seed(seed, 0x73696dULL));

    // lambda_i(t) = mu + decay * h_i, with one shared decay factor; h_i is
    // rescaled whenever decay underflows.
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    double decay = 1.0;
    double h_total = 0.0;
    double now = 0.0;
    std::uint64_t accepted = 0;
    const double base_rate = mu * static_cast<double>(n);

    while (true) {
        const double bound = base_rate + decay * h_total;
        const double wait = rng.exponential(bound);
        const double candidate = now + wait;
        if (candidate > horizon) break;

        const double decay_at = decay * std::exp(-b * wait);
        const double total = base_rate + decay_at * h_total;
        now = candidate;
        decay = decay_at;

        if (rng.uniform() * bound >= total) continue;  // rejected candidate

        // Select the jumping individual proportionally to lambda_i(now-).
        const double z = rng.uniform() * total;
        int j = n - 1;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
            cum += mu + decay * h[static_cast<std::size_t>(i)];
            if (z <= cum) {
                j = i;
                break;
            }
        }

        if (++accepted > budget)
            throw budget_error("simulate: event budget exceeded (" + std::to_string(budget) + ")",
                               std::move(log));
        push_event(log.events[static_cast<std::size_t>(j)], now);

        const double inc = inv_n / decay;
        for (std::int32_t r : receivers[static_cast<std::size_t>(j)])
            h[static_cast<std::size_t>(r)] += inc;
        h_total += inc * static_cast<double>(receivers[static_cast<std::size_t>(j)].size());

        if (decay < 1e-150) {
            h_total = 0.0;
            for (auto& v : h) {
                v *= decay;
                h_total += v;
            }
            decay = 1.0;
        }
    }
    return log;
}

EventLog simulate_uniform(const InteractionGraph& g, const KernelSpec& kernel, double mu,
                          double horizon, std::uint64_t seed, std::uint64_t budget) {
    const int n = g.n();
    const double a = kernel.param();
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto receivers = g.receivers_by_source();

    if (subcritical_gate(g, kernel.lambda()) >= 1.0)
        throw subcritical_gate_error("simulate: uniform kernel requires the subcritical gate");

    EventLog log;
    log.n = n;
    log.horizon = horizon;
    log.events.assign(static_cast<std::size_t>(n), {});

    Rng rng(derive_seed(seed, 0x73696dULL));

    // lambda_i(t) = mu + r_i(t)/N with r_i the number of active received events.
    std::vector<int> r(static_cast<std::size_t>(n), 0);
    std::deque<std::pair<double, std::int32_t>> window;  // (expiry, source)
    double active = 0.0;  // sum_i r_i / N
    double now = 0.0;
    std::uint64_t accepted = 0;
    const double base_rate = mu * static_cast<double>(n);

    auto expire_until = [&](double t) {
        while (!window.empty() && window.front().first <= t) {
            const std::int32_t j = window.front().second;
            window.pop_front();
            for (std::int32_t rec : receivers[static_cast<std::size_t>(j)])
                r[static_cast<std::size_t>(rec)] -= 1;
            active -= inv_n * static_cast<double>(receivers[static_cast<std::size_t>(j)].size());
        }
    };

    while (true) {
        const double bound = base_rate + active;  // expiries only lower the rate
        const double wait = rng.exponential(bound);
        const double candidate = now + wait;
        if (candidate > horizon) break;

        now = candidate;
        expire_until(now);
        const double total = base_rate + active;
        if (rng.uniform() * bound >= total) continue;

        const double z = rng.uniform() * total;
        int j = n - 1;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
            cum += mu + inv_n * static_cast<double>(r[static_cast<std::size_t>(i)]);
            if (z <= cum) {
                j = i;
                break;
            }
        }

        if (++accepted > budget)
            throw budget_error("simulate: event budget exceeded (" + std::to_string(budget) + ")",
                               std::move(log));
        push_event(log.events[static_cast<std::size_t>(j)], now);

        window.emplace_back(now + a, static_cast<std::int32_t>(j));
        for (std::int32_t rec : receivers[static_cast<std::size_t>(j)])
            r[static_cast<std::size_t>(rec)] += 1;
        active += inv_n * static_cast<double>(receivers[static_cast<std::size_t>(j)].size());
    }
    return log;
}

}  // namespace

EventLog simulate(const InteractionGraph& g, const KernelSpec& kernel, double mu, double horizon,
                  std::uint64_t seed, std::uint64_t event_budget) {
    check_horizon(horizon);
    if (!(mu > 0.0)) throw domain_error("simulate: mu must be > 0");
    EventLog log = kernel.family() == KernelFamily::exponential
                       ? simulate_exponential(g, kernel, mu, horizon, seed, event_budget)
                       : simulate_uniform(g, kernel, mu, horizon, seed, event_budget);
    log.meta.mu = mu;
    log.meta.kernel = kernel.to_string();
    log.meta.p = g.p();
    log.meta.graph_seed = g.seed();
    log.meta.sim_seed = seed;
    log.meta.event_budget = event_budget;
    return log;
}

std::vector<double> expected_counts_series(const InteractionGraph& g, const KernelSpec& kernel,
                                           double mu, double t, int k_obs, double tol) {
    const int n = g.n();
    if (k_obs < 1 || k_obs > n) throw domain_error("expected_counts: k_obs out of range");
    if (t < 0.0) throw domain_error("expected_counts: t must be >= 0");
    const double gate = subcritical_gate(g, kernel.lambda());
    if (gate >= 1.0)
        throw subcritical_gate_error("expected_counts_series: subcritical gate failed");

    // E[Z_t] = mu sum_n w_n(t) A^n 1 with w_n the excitation weight; the
    // remainder after n* is below mu t gate^{n*+1}/(1-gate) since w_n <= t Lambda^n
    // and ||A^n 1||_inf <= ||A||_inf^n.
    std::vector<double> acc(static_cast<std::size_t>(n), mu * t);  // n = 0 term
    std::vector<double> power(static_cast<std::size_t>(n), 1.0);
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    double geom = gate;
    for (int order = 1; order <= 20000; ++order) {
        graph_matvec(g, power, next);
        // next = A^order 1 (A already carries the 1/N normalization)
        const double weight = mu * kernel.excitation_weight(order, t);
        for (int i = 0; i < n; ++i)
            acc[static_cast<std::size_t>(i)] += weight * next[static_cast<std::size_t>(i)];
        power.swap(next);
        if (mu * t * geom / (1.0 - gate) < tol) break;
        geom *= gate;
    }
    acc.resize(static_cast<std::size_t>(k_obs));
    return acc;
}

std::vector<double> expected_counts_ode(const InteractionGraph& g, const KernelSpec& kernel,
                                        double mu, double t, int k_obs) {
    const int n = g.n();
    if (k_obs < 1 || k_obs > n) throw domain_error("expected_counts: k_obs out of range");
    if (t < 0.0) throw domain_error("expected_counts: t must be >= 0");
    if (kernel.family() != KernelFamily::exponential)
        throw domain_error("expected_counts_ode: exponential kernel only");
    const double b = kernel.param();

    // State y = (g, Z): g' = A(mu 1 + g) - b g, Z' = mu 1 + g, g(0) = Z(0) = 0.
    using state_type = std::vector<double>;
    state_type y(2 * static_cast<std::size_t>(n), 0.0);
    std::vector<double> lam(static_cast<std::size_t>(n), 0.0);
    std::vector<double> alam(static_cast<std::size_t>(n), 0.0);
    auto system = [&](const state_type& y_in, state_type& dydt, double /*time*/) {
        for (int i = 0; i < n; ++i) lam[static_cast<std::size_t>(i)] = mu + y_in[static_cast<std::size_t>(i)];
        graph_matvec(g, lam, alam);
        for (int i = 0; i < n; ++i) {
            dydt[static_cast<std::size_t>(i)] =
                alam[static_cast<std::size_t>(i)] - b * y_in[static_cast<std::size_t>(i)];
            dydt[static_cast<std::size_t>(n + i)] = lam[static_cast<std::size_t>(i)];
        }
    };

    if (t > 0.0) {
        namespace odeint = boost::numeric::odeint;
        auto stepper =
            odeint::make_controlled(1e-10, 1e-10, odeint::runge_kutta_dopri5<state_type>());
        odeint::integrate_adaptive(stepper, system, y, 0.0, t, std::min(0.1, t));
    }
    std::vector<double> out(static_cast<std::size_t>(k_obs));
    for (int i = 0; i < k_obs; ++i) out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(n + i)];
    return out;
}

std::vector<double> expected_counts(const InteractionGraph& g, const KernelSpec& kernel, double mu,
                                    double t, int k_obs) {
    if (kernel.family() == KernelFamily::exponential)
        return expected_counts_ode(g, kernel, mu, t, k_obs);
    return expected_counts_series(g, kernel, mu, t, k_obs);
}

}  // namespace hawkes
