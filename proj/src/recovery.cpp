#include "rgglab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rgglab/prng.hpp"

namespace rgglab {

namespace {

// Full symmetric eigendecomposition. `matrix` is replaced by the
// eigenvectors (columns), eigenvalues come back ascending. Eigen's
// tridiagonalization+QL solver is used directly: the system LAPACK in some
// deployment images returns subtly non-orthonormal eigenvectors for n in the
// hundreds, which a recovery estimator cannot tolerate.
void sym_eigendecompose(Eigen::MatrixXd& matrix, Eigen::VectorXd& eigenvalues) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sym_eigendecompose: eigensolver did not converge");
    eigenvalues = solver.eigenvalues();
    matrix = solver.eigenvectors();
}

// Indices of the d largest |eigenvalues| (eigenvalues given ascending).
std::vector<int> top_abs_indices(const Eigen::VectorXd& eigenvalues, int d) {
    std::vector<int> order(static_cast<std::size_t>(eigenvalues.size()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(eigenvalues[a]) > std::abs(eigenvalues[b]);
    });
    order.resize(d);
    return order;
}

struct EigenPick {
    Eigen::MatrixXd basis;  // n x d
    double gap_d = 0;
    double gap_d1 = 0;
};

EigenPick pick_top_subspace(Eigen::MatrixXd abar_entries, int d) {
    const int n = static_cast<int>(abar_entries.rows());
    Eigen::VectorXd eigenvalues;
    sym_eigendecompose(abar_entries, eigenvalues);
    const std::vector<int> top = top_abs_indices(eigenvalues, std::min(d + 1, n));
    EigenPick pick;
    pick.basis.resize(n, d);
    for (int c = 0; c < d; ++c) pick.basis.col(c) = abar_entries.col(top[c]);
    pick.gap_d = std::abs(eigenvalues[top[d - 1]]);
    pick.gap_d1 = d < n ? std::abs(eigenvalues[top[d]]) : 0.0;
    return pick;
}

}  // namespace

RecoveryResult spectral_recover(const StandardizedAdjacency& abar, int d) {
    if (d < 1 || d >= abar.n)
        throw std::invalid_argument("spectral_recover: need 1 <= d < n");
    EigenPick pick = pick_top_subspace(abar.entries, d);
    RecoveryResult result;
    result.gap_d = pick.gap_d;
    result.gap_d1 = pick.gap_d1;
    result.estimate.noalias() = (static_cast<double>(abar.n) / d) *
                                (pick.basis * pick.basis.transpose());
    return result;
}

double relative_mse(const Eigen::MatrixXd& estimate, const GramMatrix& truth, int d) {
    if (estimate.rows() != truth.entries.rows() || estimate.cols() != truth.entries.cols())
        throw std::invalid_argument("relative_mse: shape mismatch");
    if (truth.diag_mode != DiagMode::Zero)
        throw std::invalid_argument("relative_mse: truth must be a Zero-diagonal Gram matrix");
    const double n = static_cast<double>(truth.n);
    double err = 0.0;
    for (int i = 0; i < truth.n; ++i)
        for (int j = 0; j < truth.n; ++j) {
            if (i == j) continue;
            const double diff = estimate(i, j) - truth.entries(i, j);
            err += diff * diff;
        }
    return err / (n * (n - 1.0) / d);
}

int estimate_rank_by_gap(const std::vector<double>& abs_eigenvalues_desc, int max_rank) {
    const int limit = std::min<int>(max_rank, static_cast<int>(abs_eigenvalues_desc.size()) - 1);
    int best_k = 1;
    double best_ratio = 0.0;
    for (int k = 1; k <= limit; ++k) {
        const double denom = std::max(abs_eigenvalues_desc[k], 1e-300);
        const double ratio = abs_eigenvalues_desc[k - 1] / denom;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_k = k;
        }
    }
    return best_k;
}

RecoveryTrial recovery_trial(const KernelSpec& kernel, int n, int d, std::uint64_t seed) {
    if (d < 1 || d >= n) throw std::invalid_argument("recovery_trial: need 1 <= d < n");
    const double p = edge_density(kernel, d);
    const PointCloud cloud = sample_sphere_points(n, d, hash_combine(seed, 1));
    const Graph g = sample_rgg(kernel, cloud, hash_combine(seed, 2));
    const StandardizedAdjacency abar = standardize_adjacency(g, p);
    EigenPick pick = pick_top_subspace(abar.entries, d);

    // Blocked off-diagonal score: never materializes the n x n estimate.
    const double c = static_cast<double>(n) / d;
    const int block = 256;
    double err = 0.0;
    Eigen::MatrixXd est_block, truth_block;
    for (int i0 = 0; i0 < n; i0 += block) {
        const int rows = std::min(block, n - i0);
        est_block.noalias() =
            c * (pick.basis.middleRows(i0, rows) * pick.basis.transpose());
        truth_block.noalias() =
            cloud.coords.middleRows(i0, rows) * cloud.coords.transpose();
        for (int bi = 0; bi < rows; ++bi) {
            const int i = i0 + bi;
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                const double diff = est_block(bi, j) - truth_block(bi, j);
                err += diff * diff;
            }
        }
    }
    RecoveryTrial trial;
    trial.mse = err / (static_cast<double>(n) * (n - 1.0) / d);
    trial.gap_d = pick.gap_d;
    trial.gap_d1 = pick.gap_d1;
    return trial;
}

RecoverySweepResult recovery_sweep(const KernelSpec& kernel, int n,
                                   const std::vector<int>& d_grid, int trials,
                                   std::uint64_t seed) {
    if (trials < 10) throw std::invalid_argument("recovery_sweep: need trials >= 10");
    RecoverySweepResult result;
    for (int d : d_grid) {
        RecoveryCell cell;
        cell.d = d;
        double sum = 0.0, sum_sq = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            const std::uint64_t trial_seed =
                hash_combine(hash_combine(seed, static_cast<std::uint64_t>(d)),
                             static_cast<std::uint64_t>(trial));
            const RecoveryTrial r = recovery_trial(kernel, n, d, trial_seed);
            cell.trial_mse.push_back(r.mse);
            cell.mean_gap_d += r.gap_d;
            cell.mean_gap_d1 += r.gap_d1;
            sum += r.mse;
            sum_sq += r.mse * r.mse;
        }
        const double t = trials;
        cell.mean_mse = sum / t;
        cell.mean_gap_d /= t;
        cell.mean_gap_d1 /= t;
        const double var = std::max(sum_sq / t - cell.mean_mse * cell.mean_mse, 0.0);
        cell.se = std::sqrt(var / t);
        result.cells.push_back(std::move(cell));
    }

    for (std::size_t i = 1; i < result.cells.size(); ++i) {
        const auto& a = result.cells[i - 1];
        const auto& b = result.cells[i];
        if (a.mean_mse < 0.5 && b.mean_mse >= 0.5) {
            const double frac = (0.5 - a.mean_mse) / (b.mean_mse - a.mean_mse);
            result.crossing_d = std::exp(std::log(static_cast<double>(a.d)) +
                                         frac * (std::log(static_cast<double>(b.d)) -
                                                 std::log(static_cast<double>(a.d))));
            break;
        }
    }
    return result;
}

}  // namespace rgglab
