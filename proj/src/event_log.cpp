#include "hawkes/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hawkes/errors.hpp"

namespace hawkes {

std::size_t EventLog::total_events() const {
    std::size_t total = 0;
    for (const auto& v : events) total += v.size();
    return total;
}

int EventLog::count_at(int i, double t) const {
    if (i < 0 || i >= n) throw domain_error("count_at: individual out of range");
    if (t < 0.0 || t > horizon) throw domain_error("count_at: t outside [0, horizon]");
    const auto& times = events[static_cast<std::size_t>(i)];
    // [0, t] convention: events at exactly t count.
    return static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
}

double EventLog::bar_count(int k, double t) const {
    if (k < 1 || k > n) throw domain_error("bar_count: K must satisfy 1 <= K <= N");
    double total = 0.0;
    for (int i = 0; i < k; ++i) total += count_at(i, t);
    return total / static_cast<double>(k);
}

std::vector<double> EventLog::bar_counts_on_grid(int k, const std::vector<double>& grid) const {
    if (k < 1 || k > n) throw domain_error("bar_counts_on_grid: K must satisfy 1 <= K <= N");
    std::vector<double> out(grid.size(), 0.0);
    for (int i = 0; i < k; ++i) {
        const auto& times = events[static_cast<std::size_t>(i)];
        std::size_t pos = 0;
        for (std::size_t gidx = 0; gidx < grid.size(); ++gidx) {
            while (pos < times.size() && times[pos] <= grid[gidx]) ++pos;
            out[gidx] += static_cast<double>(pos);
        }
    }
    for (auto& v : out) v /= static_cast<double>(k);
    return out;
}

double quantize_time(double t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", t);
    return std::strtod(buf, nullptr);
}

void write_event_csv(const EventLog& log, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot open event CSV for writing: " + path);
    std::fputs("individual,time\n", f);
    for (int i = 0; i < log.n; ++i)
        for (double t : log.events[static_cast<std::size_t>(i)])
            std::fprintf(f, "%d,%.9f\n", i, t);
    if (std::fclose(f) != 0) throw io_error("failed writing event CSV: " + path);
    write_meta_json(log, path);
}

void write_meta_json(const EventLog& log, const std::string& csv_path) {
    nlohmann::json j;
    j["n"] = log.n;
    j["horizon"] = log.horizon;
    j["events"] = log.total_events();
    j["mu"] = log.meta.mu;
    j["kernel"] = log.meta.kernel;
    j["p"] = log.meta.p;
    j["graph_seed"] = log.meta.graph_seed;
    j["sim_seed"] = log.meta.sim_seed;
    j["event_budget"] = log.meta.event_budget;
    std::ofstream os(csv_path + ".meta.json");
    if (!os) throw io_error("cannot open meta sidecar for writing: " + csv_path + ".meta.json");
    os << j.dump(2) << '\n';
}

EventLog read_event_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open event CSV: " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("individual,time", 0) != 0)
        throw io_error("event CSV: missing \"individual,time\" header");

    EventLog log;
    int max_individual = -1;
    std::vector<std::pair<int, double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("event CSV: malformed row \"" + line + "\"");
        int individual;
        double t;
        try {
            individual = std::stoi(line.substr(0, comma));
            t = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw io_error("event CSV: malformed row \"" + line + "\"");
        }
        if (individual < 0) throw io_error("event CSV: negative individual id");
        max_individual = std::max(max_individual, individual);
        rows.emplace_back(individual, t);
    }

    // The sidecar, when present, pins n / horizon / meta.
    std::ifstream ms(path + ".meta.json");
    if (ms) {
        nlohmann::json j;
        ms >> j;
        log.n = j.at("n").get<int>();
        log.horizon = j.at("horizon").get<double>();
        log.meta.mu = j.value("mu", 0.0);
        log.meta.kernel = j.value("kernel", std::string());
        log.meta.p = j.value("p", 0.0);
        log.meta.graph_seed = j.value("graph_seed", std::uint64_t{0});
        log.meta.sim_seed = j.value("sim_seed", std::uint64_t{0});
        log.meta.event_budget = j.value("event_budget", std::uint64_t{0});
    } else {
        log.n = max_individual + 1;
        double hi = 0.0;
        for (const auto& [i, t] : rows) hi = std::max(hi, t);
        log.horizon = hi;
    }
    if (max_individual >= log.n) throw io_error("event CSV: individual id beyond meta n");

    log.events.assign(static_cast<std::size_t>(log.n), {});
    for (const auto& [i, t] : rows) log.events[static_cast<std::size_t>(i)].push_back(t);
    for (auto& times : log.events) {
        if (!std::is_sorted(times.begin(), times.end()))
            throw io_error("event CSV: rows not sorted by time within individual");
        for (std::size_t k = 1; k < times.size(); ++k)
            if (times[k] <= times[k - 1]) throw io_error("event CSV: non-increasing times");
    }
    return log;
}

}  // namespace hawkes
