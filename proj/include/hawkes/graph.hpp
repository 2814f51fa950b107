#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hawkes {

// N x N Bernoulli(p) adjacency sample; theta_ij = 1 means j influences i.
// Rows are bit-packed, entries are independent and NOT symmetrized.
class InteractionGraph {
public:
    InteractionGraph(int n, double p, std::uint64_t seed);

    int n() const { return n_; }
    double p() const { return p_; }
    std::uint64_t seed() const { return seed_; }

    bool edge(int i, int j) const {
        return (bits_[static_cast<std::size_t>(i) * words_ + static_cast<std::size_t>(j >> 6)] >>
                (j & 63)) &
               1ULL;
    }
    void set_edge(int i, int j, bool value);

    // Row-major bit-packed storage, words() 64-bit words per row.
    std::size_t words() const { return words_; }
    const std::uint64_t* raw_bits() const { return bits_.data(); }

    // Number of ones in row i (in-edges of i).
    int row_sum(int i) const;
    int max_row_sum() const;

    // Receiver lists by source: S_j = { i : theta_ij = 1 }.
    std::vector<std::vector<std::int32_t>> receivers_by_source() const;

    void save(std::ostream& os) const;
    void save_file(const std::string& path) const;
    static InteractionGraph load(std::istream& is);
    static InteractionGraph load_file(const std::string& path);

private:
    int n_;
    double p_;
    std::uint64_t seed_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

InteractionGraph sample_graph(int n, double p, std::uint64_t seed);

// y = A_N x and y = A_N^T x with A_N(i,j) = theta_ij / N.
void graph_matvec(const InteractionGraph& g, const std::vector<double>& x, std::vector<double>& y);
void graph_matvec_transpose(const InteractionGraph& g, const std::vector<double>& x,
                            std::vector<double>& y);

// Solves (I - Lambda A_N) ell = 1_N; rejects inputs with
// Lambda * ||A_N||_inf >= 1. Residual <= 1e-10 in the sup norm.
std::vector<double> compute_ell(const InteractionGraph& g, double lambda);

// V_inf^{N,K} = (N/K) sum_{i<=K} (ell(i) - mean_K ell)^2.
double v_infinity(const InteractionGraph& g, double lambda, int k);

struct XInfinity {
    double w_inf = 0.0;  // W_inf^{N,K}
    double x_inf = 0.0;  // X_inf^{N,K}
    double a_inf = 0.0;  // sum_j c_K(j)^2 ell(j)
};

XInfinity x_infinity(const InteractionGraph& g, double lambda, double mu, int k);

struct PerronData {
    double rho = 0.0;          // spectral radius of A_N
    std::vector<double> v;     // Perron vector, ||v||_2 = sqrt(N), entries > 0
    double alpha_n = 0.0;      // rho - b
};

// Power iteration from 1_N; residual ||A v - rho v||_2 / ||v||_2 <= 1e-10.
PerronData perron_data(const InteractionGraph& g, double b);

// Positivity certificate: all entries of A_N^2 strictly positive, which
// guarantees a simple positive dominant eigenpair. The harness uses it to
// pre-filter random graphs.
bool positivity_proxy_holds(const InteractionGraph& g);

double u_infinity(const InteractionGraph& g, double b, int k);

// Deterministic functionals of one graph sample, assembled in one pass.
struct GraphLimits {
    std::vector<double> ell;
    double ell_bar_k = 0.0;
    double v_inf = 0.0;
    double x_inf = 0.0;
    double w_inf = 0.0;
    double a_inf = 0.0;
    std::optional<double> rho;
    std::optional<std::vector<double>> perron;
    std::optional<double> alpha_n;
    std::optional<double> u_inf;
};

GraphLimits graph_limits(const InteractionGraph& g, double lambda, double mu, int k,
                         std::optional<double> b = std::nullopt);

}  // namespace hawkes
