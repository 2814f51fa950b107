#pragma once

#include <cstdint>
#include <vector>

#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/kernel.hpp"

namespace hawkes {

// Supercritical explosion guard tripped; carries whatever was simulated.
class budget_error : public domain_error {
public:
    budget_error(const std::string& msg, EventLog partial)
        : domain_error(msg), partial_log(std::move(partial)) {}
    EventLog partial_log;
};

constexpr std::uint64_t kDefaultEventBudget = 10'000'000;

// Exact thinning simulation of the interacting system on [0, horizon].
// Exponential kernel: O(1) decay bookkeeping per event via a shared decay
// factor. Uniform kernel: sliding window of active events; requires the
// subcritical gate.
EventLog simulate(const InteractionGraph& g, const KernelSpec& kernel, double mu, double horizon,
                  std::uint64_t seed, std::uint64_t event_budget = kDefaultEventBudget);

// E_theta[Z^i_t] for i < k_obs.
// Series evaluator: truncated expansion in powers of A_N, remainder below tol;
// requires the subcritical gate.
std::vector<double> expected_counts_series(const InteractionGraph& g, const KernelSpec& kernel,
                                           double mu, double t, int k_obs, double tol = 1e-8);

// ODE evaluator, exponential kernel only (valid in both regimes).
std::vector<double> expected_counts_ode(const InteractionGraph& g, const KernelSpec& kernel,
                                        double mu, double t, int k_obs);

// Exponential kernel -> ODE path, uniform kernel -> series path.
std::vector<double> expected_counts(const InteractionGraph& g, const KernelSpec& kernel, double mu,
                                    double t, int k_obs);

}  // namespace hawkes
