#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rgglab/graph.hpp"
#include "rgglab/latent.hpp"

namespace rgglab {

/// Distance kernel on point pairs: K(x, y) = gamma * exp(-(beta/2)|x-y|^2).
struct DistanceKernelSpec {
    double gamma = 0.5;
    double beta = 1.0;

    double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    /// From the squared distance directly.
    double from_sq_distance(double dist_sq) const;
    std::string to_string() const;
};

DistanceKernelSpec parse_distance_kernel(const std::string& text);

/// Simple graph used as a motif; caches its Laplacian spectrum.
struct SimpleSubgraph {
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> laplacian_eigenvalues;  // ascending, sums to 2|E|

    static SimpleSubgraph from_edges(int vertex_count,
                                     std::vector<std::pair<int, int>> edges);
    static SimpleSubgraph single_edge();
    static SimpleSubgraph wedge();
    static SimpleSubgraph triangle();
    static SimpleSubgraph cycle(int length);
};

/// E[prod_{e in H} A_e] for Gaussian latent points x_i ~ N(0, I_d/d):
/// gamma^{|E|} prod_i (1 + beta*lambda_i/d)^{-d/2} over the Laplacian
/// spectrum of H.
double laplacian_subgraph_expectation(const SimpleSubgraph& h, double gamma,
                                      double beta, int d);

/// Edge density of the Gaussian-latent distance model (single-edge case of
/// the formula above; never computed by quadrature).
double distance_edge_density(const DistanceKernelSpec& kernel, int d);

/// E[prod_{e in H} (A_e - p)] by exact inclusion-exclusion over subsets of
/// E(H); no 1/d expansion involved. |E(H)| <= 16.
double signed_subgraph_expectation(const SimpleSubgraph& h, double gamma,
                                   double beta, int d);

/// RGG over Gaussian latent points with the distance kernel.
Graph sample_rgg(const DistanceKernelSpec& kernel, const PointCloud& cloud,
                 std::uint64_t seed);

struct WedgeExperimentResult {
    double w_mean = 0;       // centered signed wedge statistic, RGG model
    double w_se = 0;
    double w_theory = 0;     // 3 binom(n,3) * exact signed wedge expectation
    double w_null_mean = 0;  // ER at matched p
    double w_null_se = 0;
    double t_mean = 0;       // centered signed triangle statistic, RGG model
    double t_se = 0;
    double w_power = 0;      // wedge test at level alpha
    double t_power = 0;      // triangle test at level alpha
    double power_se = 0;     // binomial SE at `trials`
    double p = 0;
    std::vector<double> w_values;       // per-trial, RGG model
    std::vector<double> t_values;
    std::vector<double> w_null_values;  // per-trial, ER null
};

/// Appendix-style non-universality run: Gaussian latent points, distance
/// kernel, signed wedge vs signed triangle. Statistics use the centered
/// adjacency A_e - p (matching the closed forms above).
WedgeExperimentResult wedge_nonuniversality_experiment(double gamma, double beta,
                                                       int n, int d, int trials,
                                                       double alpha,
                                                       std::uint64_t seed);

}  // namespace rgglab
