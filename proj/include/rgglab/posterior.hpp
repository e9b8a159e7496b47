#pragma once

#include <cstdint>
#include <vector>

#include "rgglab/graph.hpp"
#include "rgglab/spectra.hpp"

namespace rgglab {

/// Closed-form E[X_12 | A_12 = a] for the single-edge posterior:
/// (-1)^{1-a} [p/(1-p)]^{1/2-a} E[X_12 kappa(X_12)].
double single_edge_posterior_mean(const StandardizedKernel& sk, int a);

/// eta(t) = E_x[kappa(<x,y>) kappa(<x,z>)] at <y,z> = t, i.e. the kernel of
/// the squared operator: sum_k lambda_k^2 ((k+lambda)/lambda) C_k^lambda(t).
double eta_function(const KernelSpectrum& spectrum, double t);

/// Both routes to E[(E[eta | A_12])^2]: the conditional-mean computation
/// with eta integrated by quadrature, against tr(kappa^3)^2 from the
/// eigenvalue sums.
struct EtaIdentity {
    double lhs = 0;
    double rhs = 0;
    double gap = 0;
};
EtaIdentity eta_conditional_identity_check(const KernelSpectrum& spectrum,
                                           const StandardizedKernel& sk);

/// Importance-sampling ensemble targeting the posterior of the latent cloud
/// given a graph: M prior draws with self-normalized likelihood weights.
struct WeightedEnsemble {
    int n = 0;
    int d = 0;
    std::int64_t draws = 0;
    Eigen::MatrixXd coords;      // draws x (n*d), row-flattened clouds
    Eigen::VectorXd weights;     // self-normalized, sums to 1
    double ess = 0;              // (sum w)^2 / sum w^2
    bool ess_trustworthy = true; // false when ess < 100
};

/// Prior importance sampling; requires n <= 12, d <= 8, M <= 10^7 and a
/// kernel bounded away from {0,1} on the observed overlaps.
WeightedEnsemble posterior_ensemble(const Graph& a, const KernelSpec& kernel,
                                    int d, std::int64_t draws, std::uint64_t seed);

/// Self-normalized posterior-mean estimate of X_ij under the ensemble.
double posterior_pair_mean(const WeightedEnsemble& ensemble, int i, int j);

/// Standard error of that estimate (delta method for a weighted mean).
double posterior_pair_mean_se(const WeightedEnsemble& ensemble, int i, int j);

/// g(2) = E_A[(E_{x|A}[eta(X_12)])^2] estimated over fresh graph replicates,
/// with independently weighted half-ensembles per replicate (replica
/// estimator of the squared conditional mean).
struct G2Result {
    double estimate = 0;
    double std_error = 0;
    double mean_ess = 0;
    int replicates = 0;
    std::vector<double> replicate_estimates;
};
G2Result g2_estimate(const KernelSpec& kernel, int n, int d, int graph_replicates,
                     std::int64_t draws, std::uint64_t seed);

}  // namespace rgglab
