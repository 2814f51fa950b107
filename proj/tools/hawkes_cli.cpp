#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hawkes/errors.hpp"
#include "hawkes/event_log.hpp"
#include "hawkes/graph.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/mc.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/subcritical.hpp"
#include "hawkes/supercritical.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-" || path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os) throw hawkes::io_error("cannot open output file: " + path);
    os << text;
    if (!os) throw hawkes::io_error("failed writing output file: " + path);
}

hawkes::InteractionGraph make_graph(const std::string& graph_file, int n, double p,
                                    std::optional<std::uint64_t> seed) {
    if (!graph_file.empty()) return hawkes::InteractionGraph::load_file(graph_file);
    const std::uint64_t s = seed ? *seed : entropy_seed();
    return hawkes::sample_graph(n, p, s);
}

int run(int argc, char** argv) {
    CLI::App app{"Simulation, estimation and validation toolkit for partially observed "
                 "interacting Hawkes processes on Bernoulli graphs"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate the interacting system by thinning");
    int n = 100, k = 0;
    double p = 0.5, mu = 1.0, horizon = 100.0;
    std::string kernel_text = "exp:1", out_path = "events.csv", graph_file, save_graph;
    std::optional<std::uint64_t> seed_flag;
    std::uint64_t budget = hawkes::kDefaultEventBudget;
    sim->add_option("--n", n, "population size");
    sim->add_option("--p", p, "edge probability");
    sim->add_option("--mu", mu, "baseline rate");
    sim->add_option("--kernel", kernel_text, "kernel, exp:<b> or unif:<a>");
    sim->add_option("--horizon", horizon, "simulation end time");
    sim->add_option("--seed", seed_flag, "master seed (graph and sim streams derive from it)");
    sim->add_option("--budget", budget, "event budget per run");
    sim->add_option("--graph-file", graph_file, "load the interaction graph instead of sampling");
    sim->add_option("--save-graph", save_graph, "write the sampled graph to this path");
    sim->add_option("--out", out_path, "output event CSV (meta JSON sidecar alongside)");

    // --- graph-limits -----------------------------------------------------
    auto* gl = app.add_subcommand("graph-limits", "matrix-oracle functionals of one graph sample");
    bool with_perron = false, full_vectors = false;
    std::string gl_out = "-";
    gl->add_option("--n", n, "population size");
    gl->add_option("--p", p, "edge probability");
    gl->add_option("--seed", seed_flag, "graph seed");
    gl->add_option("--kernel", kernel_text, "kernel (fixes Lambda and b)");
    gl->add_option("--mu", mu, "baseline rate");
    gl->add_option("--k", k, "observed sub-sample size (default N)");
    gl->add_flag("--perron", with_perron, "also compute rho_N, V_N, alpha_N, U_inf");
    gl->add_flag("--full", full_vectors, "emit the full ell / Perron vectors");
    gl->add_option("--graph-file", graph_file, "load the interaction graph instead of sampling");
    gl->add_option("--save-graph", save_graph, "write the graph to this path");
    gl->add_option("--out", gl_out, "output JSON (default stdout)");

    // --- estimate-sub -----------------------------------------------------
    auto* es = app.add_subcommand("estimate-sub", "subcritical estimators from an event CSV");
    std::string events_path, format = "json";
    double t = 100.0, q = 7.0, alpha = 0.1;
    es->add_option("--events", events_path, "event CSV path")->required();
    es->add_option("--k", k, "observed sub-sample size")->required();
    es->add_option("--t", t, "estimation time (horizon must cover 2t)")->required();
    es->add_option("--q", q, "moment exponent for the Delta rule");
    es->add_option("--alpha", alpha, "confidence level alpha");
    std::string es_out = "-";
    es->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    es->add_option("--out", es_out, "output path (default stdout)");

    // --- estimate-super ---------------------------------------------------
    auto* eu = app.add_subcommand("estimate-super", "supercritical estimators from an event CSV");
    std::optional<double> p_true;
    std::optional<double> b_flag;
    eu->add_option("--events", events_path, "event CSV path")->required();
    eu->add_option("--k", k, "observed sub-sample size")->required();
    eu->add_option("--t", t, "estimation time")->required();
    eu->add_option("--p-true", p_true, "true p (validation mode alpha0 = p - b)");
    eu->add_option("--b", b_flag, "kernel decay rate b (default from the meta sidecar)");
    std::string eu_out = "-";
    eu->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    eu->add_option("--out", eu_out, "output path (default stdout)");

    // --- validate ---------------------------------------------------------
    auto* va = app.add_subcommand("validate", "run a replicated Monte Carlo experiment");
    std::string config_path, report_path = "-", qq_path;
    int threads_flag = 0;
    va->add_option("--config", config_path, "experiment config JSON")->required();
    va->add_option("--out", report_path, "report JSON path (default stdout)");
    va->add_option("--qq", qq_path, "also write QQ points as CSV");
    va->add_option("--threads", threads_flag, "worker threads (default: available cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "E1: " << e.what() << "\n";
        return kExitDomain;
    }

    try {
        if (sim->parsed()) {
            const std::uint64_t master = seed_flag ? *seed_flag : entropy_seed();
            const std::uint64_t graph_seed = hawkes::derive_seed(master, 1);
            const std::uint64_t sim_seed = hawkes::derive_seed(master, 2);
            const auto kernel = hawkes::KernelSpec::parse(kernel_text);
            const auto g = graph_file.empty()
                               ? hawkes::sample_graph(n, p, graph_seed)
                               : hawkes::InteractionGraph::load_file(graph_file);
            if (!save_graph.empty()) g.save_file(save_graph);
            const auto log = hawkes::simulate(g, kernel, mu, horizon, sim_seed, budget);
            hawkes::write_event_csv(log, out_path);
            std::cerr << "wrote " << log.total_events() << " events to " << out_path << "\n";
            return kExitOk;
        }

        if (gl->parsed()) {
            const auto kernel = hawkes::KernelSpec::parse(kernel_text);
            const auto g = make_graph(graph_file, n, p, seed_flag);
            if (!save_graph.empty()) g.save_file(save_graph);
            const int k_obs = k > 0 ? k : g.n();
            std::optional<double> b;
            if (with_perron) {
                if (kernel.family() != hawkes::KernelFamily::exponential)
                    throw hawkes::domain_error("perron data requires the exponential kernel");
                b = kernel.param();
            }
            const auto lim = hawkes::graph_limits(g, kernel.lambda(), mu, k_obs, b);
            nlohmann::json j;
            j["n"] = g.n();
            j["p"] = g.p();
            j["seed"] = g.seed();
            j["k"] = k_obs;
            j["lambda"] = kernel.lambda();
            j["mu"] = mu;
            j["ell_bar_k"] = lim.ell_bar_k;
            j["v_inf"] = lim.v_inf;
            j["x_inf"] = lim.x_inf;
            j["w_inf"] = lim.w_inf;
            j["a_inf"] = lim.a_inf;
            if (lim.rho) {
                j["rho"] = *lim.rho;
                j["alpha_n"] = *lim.alpha_n;
                j["u_inf"] = *lim.u_inf;
            }
            if (full_vectors) {
                j["ell"] = lim.ell;
                if (lim.perron) j["perron"] = *lim.perron;
            }
            write_text(gl_out, j.dump(2) + "\n");
            return kExitOk;
        }

        if (es->parsed()) {
            const auto log = hawkes::read_event_csv(events_path);
            const auto est = hawkes::estimate(log, k, t, q, alpha);
            write_text(es_out, format == "json" ? hawkes::estimate_to_json(est) + "\n"
                                                 : hawkes::estimate_to_csv(est));
            return kExitOk;
        }

        if (eu->parsed()) {
            const auto log = hawkes::read_event_csv(events_path);
            hawkes::SupercriticalEstimate est;
            if (p_true) {
                double b = 0.0;
                if (b_flag) {
                    b = *b_flag;
                } else {
                    const auto kernel = hawkes::KernelSpec::parse(log.meta.kernel);
                    if (kernel.family() != hawkes::KernelFamily::exponential)
                        throw hawkes::domain_error("estimate-super: exponential kernel required");
                    b = kernel.param();
                }
                est = hawkes::estimate_super(log, k, t, *p_true, b);
            } else {
                est = hawkes::estimate_super_inferred(log, k, t);
            }
            write_text(eu_out, format == "json" ? hawkes::estimate_super_to_json(est) + "\n"
                                                 : hawkes::estimate_super_to_csv(est));
            return kExitOk;
        }

        if (va->parsed()) {
            std::ifstream is(config_path);
            if (!is) throw hawkes::io_error("cannot open config: " + config_path);
            std::stringstream buf;
            buf << is.rdbuf();
            auto cfg = hawkes::ExperimentConfig::from_json(buf.str());
            if (threads_flag > 0) cfg.threads = threads_flag;
            const auto report = hawkes::run_experiment(cfg);
            write_text(report_path, report.to_json() + "\n");
            if (!qq_path.empty()) hawkes::write_qq_csv(report, qq_path);
            if (!report.pass) {
                std::cerr << "E3: validation checks failed for target "
                          << hawkes::target_name(cfg.target) << "\n";
                return kExitValidation;
            }
            return kExitOk;
        }
    } catch (const hawkes::io_error& e) {
        std::cerr << "E2: " << e.what() << "\n";
        return kExitIo;
    } catch (const hawkes::domain_error& e) {
        std::cerr << "E1: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "E1: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitDomain;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
