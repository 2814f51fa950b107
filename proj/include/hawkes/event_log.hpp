#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hawkes {

// Generating parameters carried for reproducibility.
struct LogMeta {
    double mu = 0.0;
    std::string kernel;
    double p = 0.0;
    std::uint64_t graph_seed = 0;
    std::uint64_t sim_seed = 0;
    std::uint64_t event_budget = 0;
};

// Per-individual sorted jump times over (0, horizon].
struct EventLog {
    int n = 0;
    double horizon = 0.0;
    std::vector<std::vector<double>> events;
    LogMeta meta;

    std::size_t total_events() const;

    // Z^i(t): number of jumps of individual i in [0, t].
    int count_at(int i, double t) const;

    // K^{-1} sum_{i<K} Z^i(t).
    double bar_count(int k, double t) const;

    // bar Z at each of the (sorted, ascending) grid times, one pass per individual.
    std::vector<double> bar_counts_on_grid(int k, const std::vector<double>& grid) const;
};

// Rounds a time to the canonical 9-decimal on-disk representation so that the
// in-memory log and its CSV round-trip are bit-identical.
double quantize_time(double t);

void write_event_csv(const EventLog& log, const std::string& path);
EventLog read_event_csv(const std::string& path);

// Meta sidecar <path>.meta.json; read_event_csv picks it up when present.
void write_meta_json(const EventLog& log, const std::string& csv_path);

}  // namespace hawkes
