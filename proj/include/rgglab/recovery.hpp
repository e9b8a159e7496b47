#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgglab/graph.hpp"
#include "rgglab/latent.hpp"

namespace rgglab {

/// Spectral Gram estimate: U spans the d largest-|eigenvalue| directions of
/// Abar and the estimate is (n/d) U U^T.
struct RecoveryResult {
    Eigen::MatrixXd estimate;
    double gap_d = 0;    // d-th largest |eigenvalue| of Abar
    double gap_d1 = 0;   // (d+1)-th largest
};

RecoveryResult spectral_recover(const StandardizedAdjacency& abar, int d);

/// Off-diagonal squared error divided by n(n-1)/d (the trivial-estimator
/// risk). `truth` must be a Zero-diagonal Gram matrix of d-dimensional
/// points.
double relative_mse(const Eigen::MatrixXd& estimate, const GramMatrix& truth, int d);

/// Diagnostic for unknown d: index of the largest consecutive-ratio gap in
/// the sorted |eigenvalue| sequence (1-based; not used by acceptance runs).
int estimate_rank_by_gap(const std::vector<double>& abs_eigenvalues_desc, int max_rank);

struct RecoveryCell {
    int d = 0;
    double mean_mse = 0;
    double se = 0;
    double mean_gap_d = 0;
    double mean_gap_d1 = 0;
    std::vector<double> trial_mse;
};

struct RecoverySweepResult {
    std::vector<RecoveryCell> cells;
    std::optional<double> crossing_d;  // where mean relative_mse crosses 0.5
};

/// Mean relative MSE as a function of the latent dimension, all at a fixed
/// n; per-trial seeds derive from (seed, d, trial).
RecoverySweepResult recovery_sweep(const KernelSpec& kernel, int n,
                                   const std::vector<int>& d_grid, int trials,
                                   std::uint64_t seed);

/// Single recovery trial without materializing the n x n estimate;
/// returns (relative_mse, gap_d, gap_d1).
struct RecoveryTrial {
    double mse = 0;
    double gap_d = 0;
    double gap_d1 = 0;
};
RecoveryTrial recovery_trial(const KernelSpec& kernel, int n, int d,
                             std::uint64_t seed);

}  // namespace rgglab
