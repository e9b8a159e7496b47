#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rgglab/kernels.hpp"

namespace rgglab {

using BigInt = boost::multiprecision::cpp_int;

/// Gegenbauer polynomial C_k^lambda(t) by the three-term recurrence
/// (C_0 = 1, C_1 = 2*lambda*t).
double gegenbauer_eval(int k, double lambda, double t);

/// dim of the space of degree-k spherical harmonics on S^{d-1}:
/// binom(d-1+k, d-1) - binom(d-3+k, d-1), exact.
BigInt harmonic_dim(int d, int k);

/// log of harmonic_dim for dimensions that overflow double; also defined for
/// real-valued d (gamma-function continuation, used by the threshold solver).
double harmonic_dim_log(double d, int k);

struct SpectrumEntry {
    int k = 0;
    double alpha = 0;        // Gegenbauer coefficient of kappa
    double eigenvalue = 0;   // (lambda/(k+lambda)) * alpha, lambda = (d-2)/2
    double log_multiplicity = 0;
    double multiplicity = 0;  // +inf once past double range (log companion above)
};

/// Eigenvalues of the kappa operator up to degree kmax, with multiplicities
/// and the residual L2 mass not captured by the truncation.
struct KernelSpectrum {
    double d = 0;
    int kmax = 0;
    double kappa_sq_norm = 0;  // ||kappa||^2_{L2(mu)}
    double tail_mass = 0;      // kappa_sq_norm - sum lambda_k^2 m_k
    std::vector<SpectrumEntry> entries;
};

KernelSpectrum gegenbauer_coefficients(const StandardizedKernel& sk, int kmax);

/// alpha_k through the Rodrigues route; requires the exact k-th derivative,
/// so the base kernel must be polynomial-like.
double rodrigues_coefficient(const StandardizedKernel& sk, int k);

/// tr(kappa^m) = sum_k eigenvalue_k^m * multiplicity_k (compensated sum).
struct TracePower {
    double value = 0;
    double tail_bound = 0;  // Bessel tail, meaningful for even m
    bool tail_warning = false;
};
TracePower trace_power(const KernelSpectrum& spectrum, int m);

/// Monte Carlo cycle estimate of tr(kappa^m):
/// E[kappa(<y1,y2>) ... kappa(<ym,y1>)] over uniform sphere m-cycles.
struct McEstimate {
    double mean = 0;
    double std_error = 0;
    std::int64_t samples = 0;
};
McEstimate trace_power_mc(const StandardizedKernel& sk, int d, int m,
                          std::int64_t samples, std::uint64_t seed);

/// Multigraph on [k]; parallel edges allowed, self-loops not.
class Multigraph {
public:
    explicit Multigraph(int vertex_count);

    void add_edge(int u, int v, int multiplicity = 1);
    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return total_edges_; }  // with multiplicity
    int degree(int v) const { return degrees_[v]; }
    const std::vector<std::pair<int, int>>& edge_list() const { return edges_; }

private:
    int vertex_count_ = 0;
    int total_edges_ = 0;
    std::vector<std::pair<int, int>> edges_;  // one entry per parallel copy
    std::vector<int> degrees_;
};

/// Exact E[prod_{(i,j) in E(H)} <g_i, g_j>] for i.i.d. N(0, I_d) vectors,
/// by enumerating set partitions of the edge multiset:
///   sum_pi (d)_{|pi|} prod_{B in pi} prod_{i in V(B)} mu_{deg_B(i)}.
/// Integer arithmetic throughout; |E(H)| <= 12.
BigInt wick_multigraph_expectation_exact(const Multigraph& h, int d);
double wick_multigraph_expectation(const Multigraph& h, int d);

/// E[prod <x_i, x_j>^{mult}] for uniform sphere points: the Wick value
/// divided by prod_v d(d+2)...(d+deg(v)-2). Zero when any degree is odd.
double spherical_multigraph_expectation(const Multigraph& h, int d);

}  // namespace rgglab
