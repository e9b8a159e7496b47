#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgglab/graph.hpp"
#include "rgglab/spectra.hpp"

namespace rgglab {

/// Signed triangle count T = sum_{i<j<k} Abar_ij Abar_jk Abar_ki = tr(Abar^3)/6.
double signed_triangle_count(const StandardizedAdjacency& abar);

/// Matrix-free route: the two-valued Abar makes T a function of the triangle
/// count, the wedge count and the edge count, so dense cubes are never formed.
double signed_triangle_count(const Graph& g, double p);

/// Signed wedge count W = sum over paths (j-i-k) of Abar_ij Abar_ik.
double signed_wedge_count(const StandardizedAdjacency& abar);
double signed_wedge_count(const Graph& g, double p);

/// Raw triangle count (bitset intersection), exposed for tests.
std::int64_t triangle_count(const Graph& g);

/// Exact first two moments of T under both models.
struct TriangleTheory {
    double n = 0;
    double mean_p = 0;       // binom(n,3) tr(kappa^3)
    double var_p_bound = 0;  // upper bound, not equality
    double mean_q = 0;       // 0
    double var_q = 0;        // binom(n,3)
    double tr3 = 0;
    double tr4 = 0;
};

TriangleTheory triangle_theory(const KernelSpectrum& spectrum, int n, double p);

/// Analogous null moments for the signed wedge statistic
/// (mean 0, variance = number of wedges = 3 binom(n,3)).
struct WedgeTheory {
    double mean_q = 0;
    double var_q = 0;
};
WedgeTheory wedge_theory(int n);

/// One-sided z-test against the null; the rejection side follows the sign of
/// the RGG mean. Ties decide ER.
struct MotifTest {
    double threshold = 0;
    int side = +1;  // +1: reject for large values, -1: for small
    bool rejects(double statistic) const {
        return side > 0 ? statistic > threshold : statistic < threshold;
    }
};

MotifTest make_test(double mean_p, double mean_q, double var_q, double alpha);
inline MotifTest make_test(const TriangleTheory& theory, double alpha) {
    return make_test(theory.mean_p, theory.mean_q, theory.var_q, alpha);
}

struct TestOutcome {
    double statistic = 0;
    double threshold = 0;
    bool decided_rgg = false;
    double z_score = 0;
};

struct PowerResult {
    double power = 0;
    double power_se = 0;
    double fpr = 0;
    double fpr_se = 0;
    int trials = 0;
    std::vector<double> rgg_statistics;
    std::vector<double> er_statistics;
};

struct PowerOptions {
    double alpha = 0.01;
    bool empirical_p = false;  // plug-in density instead of the analytic one
};

/// `trials` RGG and `trials` ER replicates of the triangle test.
PowerResult power_experiment(const KernelSpec& kernel, int n, int d, int trials,
                             std::uint64_t seed, const PowerOptions& options = {});

/// Conjectured critical dimensions from the kernel spectrum.
struct PredictedThresholds {
    bool crossing_found = false;
    double d_test_bisection = 0;   // solves n^3 tr^2(kappa^3(d)) = 1
    double d_test_closed_form = 0; // b_{k0}^{3/(2 k0)} n^{3/(4 k0)}
    double d_est_closed_form = 0;  // b_1 sqrt(n) (0 when lambda_1 vanishes)
    int k0 = 1;                    // first degree with a non-vanishing scaled eigenvalue
    double b_k0 = 0;               // d^{k0} lambda_{k0} at the crossing dimension
};

PredictedThresholds predicted_thresholds(const KernelSpec& kernel, int n);

}  // namespace rgglab
