#include "hawkes/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hawkes/errors.hpp"
#include "hawkes/rng.hpp"

namespace hawkes {

namespace {

constexpr double kSolveTol = 1e-10;

}  // namespace

// y = (A x) with A(i,j) = theta_ij / N, iterating set bits word by word.
void graph_matvec(const InteractionGraph& g, const std::vector<double>& x, std::vector<double>& y) {
    const int n = g.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    const std::size_t words = g.words();
    const std::uint64_t* bits = g.raw_bits();
    for (int i = 0; i < n; ++i) {
        const std::uint64_t* row = bits + static_cast<std::size_t>(i) * words;
        double acc = 0.0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t word = row[w];
            const int base = static_cast<int>(w << 6);
            while (word) {
                acc += x[static_cast<std::size_t>(base + std::countr_zero(word))];
                word &= word - 1;
            }
        }
        y[i] = acc * inv_n;
    }
}

// y = (A^T x): scatter the rows of A into y.
void graph_matvec_transpose(const InteractionGraph& g, const std::vector<double>& x,
                            std::vector<double>& y) {
    const int n = g.n();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::fill(y.begin(), y.end(), 0.0);
    const std::size_t words = g.words();
    const std::uint64_t* bits = g.raw_bits();
    for (int i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        const std::uint64_t* row = bits + static_cast<std::size_t>(i) * words;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t word = row[w];
            const int base = static_cast<int>(w << 6);
            while (word) {
                y[static_cast<std::size_t>(base + std::countr_zero(word))] += xi;
                word &= word - 1;
            }
        }
    }
    for (int j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] *= inv_n;
}

InteractionGraph::InteractionGraph(int n, double p, std::uint64_t seed)
    : n_(n), p_(p), seed_(seed), words_((static_cast<std::size_t>(n) + 63) / 64),
      bits_(static_cast<std::size_t>(n) * words_, 0) {
    if (n < 1) throw domain_error("graph: n must be >= 1");
    if (p < 0.0 || p > 1.0) throw domain_error("graph: p must be in [0,1]");
}

void InteractionGraph::set_edge(int i, int j, bool value) {
    auto& word = bits_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j >> 6)];
    const std::uint64_t mask = 1ULL << (j & 63);
    if (value)
        word |= mask;
    else
        word &= ~mask;
}

int InteractionGraph::row_sum(int i) const {
    int total = 0;
    for (std::size_t w = 0; w < words_; ++w)
        total += std::popcount(bits_[static_cast<std::size_t>(i) * words_ + w]);
    return total;
}

int InteractionGraph::max_row_sum() const {
    int best = 0;
    for (int i = 0; i < n_; ++i) best = std::max(best, row_sum(i));
    return best;
}

std::vector<std::vector<std::int32_t>> InteractionGraph::receivers_by_source() const {
    std::vector<std::vector<std::int32_t>> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j)
        out[static_cast<std::size_t>(j)].reserve(static_cast<std::size_t>(n_ * p_ * 1.2) + 4);
    for (int i = 0; i < n_; ++i) {
        const std::uint64_t* row = bits_.data() + static_cast<std::size_t>(i) * words_;
        for (std::size_t w = 0; w < words_; ++w) {
            std::uint64_t word = row[w];
            const int base = static_cast<int>(w << 6);
            while (word) {
                out[static_cast<std::size_t>(base + std::countr_zero(word))].push_back(i);
                word &= word - 1;
            }
        }
    }
    return out;
}

InteractionGraph sample_graph(int n, double p, std::uint64_t seed) {
    InteractionGraph g(n, p, seed);
    Rng rng(seed);
    if (p <= 0.0) return g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p >= 1.0 || rng.bernoulli(p)) g.set_edge(i, j, true);
    return g;
}

void InteractionGraph::save(std::ostream& os) const {
    os << n_ << ' ' << std::setprecision(17) << p_ << ' ' << seed_ << '\n';
    const char* hex = "0123456789abcdef";
    std::string line((static_cast<std::size_t>(n_) + 3) / 4, '0');
    for (int i = 0; i < n_; ++i) {
        std::fill(line.begin(), line.end(), '0');
        for (int j = 0; j < n_; ++j)
            if (edge(i, j)) {
                auto& c = line[static_cast<std::size_t>(j / 4)];
                int nib = (c <= '9') ? c - '0' : c - 'a' + 10;
                nib |= 1 << (j % 4);
                c = hex[nib];
            }
        os << line << '\n';
    }
}

void InteractionGraph::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open graph file for writing: " + path);
    save(os);
    if (!os) throw io_error("failed writing graph file: " + path);
}

InteractionGraph InteractionGraph::load(std::istream& is) {
    int n;
    double p;
    std::uint64_t seed;
    if (!(is >> n >> p >> seed)) throw io_error("graph file: bad header");
    InteractionGraph g(n, p, seed);
    std::string line;
    std::getline(is, line);  // rest of header line
    for (int i = 0; i < n; ++i) {
        if (!std::getline(is, line)) throw io_error("graph file: truncated rows");
        if (line.size() != (static_cast<std::size_t>(n) + 3) / 4)
            throw io_error("graph file: bad row width");
        for (int j = 0; j < n; ++j) {
            const char c = line[static_cast<std::size_t>(j / 4)];
            int nib;
            if (c >= '0' && c <= '9')
                nib = c - '0';
            else if (c >= 'a' && c <= 'f')
                nib = c - 'a' + 10;
            else
                throw io_error("graph file: non-hex character");
            if ((nib >> (j % 4)) & 1) g.set_edge(i, j, true);
        }
    }
    return g;
}

InteractionGraph InteractionGraph::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open graph file: " + path);
    return load(is);
}

std::vector<double> compute_ell(const InteractionGraph& g, double lambda) {
    const int n = g.n();
    const double gate = lambda * static_cast<double>(g.max_row_sum()) / static_cast<double>(n);
    if (gate >= 1.0)
        throw subcritical_gate_error(
            "compute_ell: Lambda * ||A_N||_inf = " + std::to_string(gate) + " >= 1");

    // Fixed point ell = 1 + Lambda A ell, contraction factor `gate`.
    std::vector<double> ell(static_cast<std::size_t>(n), 1.0);
    std::vector<double> tmp(static_cast<std::size_t>(n), 0.0);
    const int max_iter = 10000;
    for (int iter = 0; iter < max_iter; ++iter) {
        graph_matvec(g, ell, tmp);
        double diff = 0.0;
        for (int i = 0; i < n; ++i) {
            const double next = 1.0 + lambda * tmp[i];
            diff = std::max(diff, std::abs(next - ell[i]));
            ell[i] = next;
        }
        // Residual bound: ||(I - Lambda A) ell - 1||_inf <= (1 + gate) * step;
        // iterate two extra decades below the contract tolerance.
        if (diff * (1.0 + gate) / std::max(1e-300, 1.0 - gate) < 0.01 * kSolveTol) break;
    }
    // Verify the residual directly.
    graph_matvec(g, ell, tmp);
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(ell[i] - lambda * tmp[i] - 1.0));
    if (res > kSolveTol) throw domain_error("compute_ell: residual did not reach 1e-10");
    return ell;
}

namespace {

std::vector<double> column_sums_c(const InteractionGraph& g, double lambda, int k) {
    // Solves (I - Lambda A)^T c = 1_K-indicator, i.e. c = 1_K + Lambda A^T c.
    const int n = g.n();
    const double gate = lambda * static_cast<double>(g.max_row_sum()) / static_cast<double>(n);
    if (gate >= 1.0) throw subcritical_gate_error("x_infinity: subcritical gate failed");
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    std::vector<double> tmp(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = 1.0;
    const int max_iter = 10000;
    for (int iter = 0; iter < max_iter; ++iter) {
        graph_matvec_transpose(g, c, tmp);
        double diff = 0.0;
        for (int j = 0; j < n; ++j) {
            const double next = (j < k ? 1.0 : 0.0) + lambda * tmp[static_cast<std::size_t>(j)];
            diff = std::max(diff, std::abs(next - c[static_cast<std::size_t>(j)]));
            c[static_cast<std::size_t>(j)] = next;
        }
        if (diff * (1.0 + gate) / std::max(1e-300, 1.0 - gate) < 0.01 * kSolveTol) break;
    }
    return c;
}

}  // namespace

double v_infinity(const InteractionGraph& g, double lambda, int k) {
    const int n = g.n();
    if (k < 1 || k > n) throw domain_error("v_infinity: K must satisfy 1 <= K <= N");
    const auto ell = compute_ell(g, lambda);
    double bar = 0.0;
    for (int i = 0; i < k; ++i) bar += ell[static_cast<std::size_t>(i)];
    bar /= static_cast<double>(k);
    double ss = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = ell[static_cast<std::size_t>(i)] - bar;
        ss += d * d;
    }
    return static_cast<double>(n) / static_cast<double>(k) * ss;
}

XInfinity x_infinity(const InteractionGraph& g, double lambda, double mu, int k) {
    const int n = g.n();
    if (k < 1 || k > n) throw domain_error("x_infinity: K must satisfy 1 <= K <= N");
    const auto ell = compute_ell(g, lambda);
    const auto c = column_sums_c(g, lambda, k);
    XInfinity out;
    for (int j = 0; j < n; ++j)
        out.a_inf += c[static_cast<std::size_t>(j)] * c[static_cast<std::size_t>(j)] *
                     ell[static_cast<std::size_t>(j)];
    out.w_inf = mu * static_cast<double>(n) / (static_cast<double>(k) * static_cast<double>(k)) *
                out.a_inf;
    double bar = 0.0;
    for (int i = 0; i < k; ++i) bar += ell[static_cast<std::size_t>(i)];
    bar /= static_cast<double>(k);
    out.x_inf = out.w_inf -
                static_cast<double>(n - k) * mu / static_cast<double>(k) * bar;
    return out;
}

bool positivity_proxy_holds(const InteractionGraph& g) {
    // (A^2)_{ij} > 0 iff row i of theta intersects column j, i.e. some path
    // i -> m -> j exists. Columns are materialized once as bitsets.
    const int n = g.n();
    const std::size_t words = g.words();
    std::vector<std::uint64_t> cols(static_cast<std::size_t>(n) * words, 0);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            if (g.edge(m, j))
                cols[static_cast<std::size_t>(j) * words + static_cast<std::size_t>(m >> 6)] |=
                    1ULL << (m & 63);
    const std::uint64_t* bits = g.raw_bits();
    for (int i = 0; i < n; ++i) {
        const std::uint64_t* row = bits + static_cast<std::size_t>(i) * words;
        for (int j = 0; j < n; ++j) {
            const std::uint64_t* col = cols.data() + static_cast<std::size_t>(j) * words;
            bool hit = false;
            for (std::size_t w = 0; w < words && !hit; ++w) hit = (row[w] & col[w]) != 0;
            if (!hit) return false;
        }
    }
    return true;
}

PerronData perron_data(const InteractionGraph& g, double b) {
    const int n = g.n();
    std::vector<double> v(static_cast<std::size_t>(n), 1.0);
    std::vector<double> av(static_cast<std::size_t>(n), 0.0);
    const int max_iter = 20000;
    double rho = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        graph_matvec(g, v, av);
        double vv = 0.0, vav = 0.0;
        for (int i = 0; i < n; ++i) {
            vv += v[i] * v[i];
            vav += v[i] * av[i];
        }
        rho = vav / vv;
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = av[i] - rho * v[i];
            res += r * r;
        }
        res = std::sqrt(res / vv);
        if (res <= 1e-10 && rho > 0.0) {
            double norm = 0.0;
            for (int i = 0; i < n; ++i) norm += v[i] * v[i];
            const double scale = std::sqrt(static_cast<double>(n) / norm);
            PerronData out;
            out.rho = rho;
            out.v.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                out.v[static_cast<std::size_t>(i)] = v[i] * scale;
                if (!(out.v[static_cast<std::size_t>(i)] > 0.0))
                    throw degenerate_graph_error("perron_data: eigenvector not strictly positive");
            }
            out.alpha_n = rho - b;
            return out;
        }
        // Normalize to sup norm 1 to avoid overflow/underflow.
        double amax = 0.0;
        for (int i = 0; i < n; ++i) amax = std::max(amax, std::abs(av[i]));
        if (amax <= 0.0)
            throw degenerate_graph_error("perron_data: A annihilates the start vector");
        for (int i = 0; i < n; ++i) v[i] = av[i] / amax;
    }
    throw degenerate_graph_error("perron_data: power iteration did not converge");
}

double u_infinity(const InteractionGraph& g, double b, int k) {
    const int n = g.n();
    if (k < 1 || k > n) throw domain_error("u_infinity: K must satisfy 1 <= K <= N");
    const auto pd = perron_data(g, b);
    double bar = 0.0;
    for (int i = 0; i < k; ++i) bar += pd.v[static_cast<std::size_t>(i)];
    bar /= static_cast<double>(k);
    double ss = 0.0;
    for (int i = 0; i < k; ++i) {
        const double d = pd.v[static_cast<std::size_t>(i)] - bar;
        ss += d * d;
    }
    return static_cast<double>(n) / (static_cast<double>(k) * bar * bar) * ss;
}

GraphLimits graph_limits(const InteractionGraph& g, double lambda, double mu, int k,
                         std::optional<double> b) {
    GraphLimits out;
    out.ell = compute_ell(g, lambda);
    double bar = 0.0;
    for (int i = 0; i < k; ++i) bar += out.ell[static_cast<std::size_t>(i)];
    out.ell_bar_k = bar / static_cast<double>(k);
    out.v_inf = v_infinity(g, lambda, k);
    const auto x = x_infinity(g, lambda, mu, k);
    out.x_inf = x.x_inf;
    out.w_inf = x.w_inf;
    out.a_inf = x.a_inf;
    if (b) {
        const auto pd = perron_data(g, *b);
        out.rho = pd.rho;
        out.perron = pd.v;
        out.alpha_n = pd.alpha_n;
        out.u_inf = u_infinity(g, *b, k);
    }
    return out;
}

}  // namespace hawkes
