#include "rgglab/detection.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "rgglab/prng.hpp"

namespace rgglab {

namespace {

double binom3(double n) { return n * (n - 1.0) * (n - 2.0) / 6.0; }
double binom4(double n) { return n * (n - 1.0) * (n - 2.0) * (n - 3.0) / 24.0; }

struct TwoValues {
    double hi;  // (1-p)/sqrt(p(1-p))
    double lo;  // -p/sqrt(p(1-p))
};

TwoValues abar_values(double p) {
    const double scale = std::sqrt(p * (1.0 - p));
    return {(1.0 - p) / scale, -p / scale};
}

}  // namespace

double signed_triangle_count(const StandardizedAdjacency& abar) {
    // tr(Abar^3)/6; the diagonal is zero so this equals the triple sum.
    const Eigen::MatrixXd sq = abar.entries * abar.entries;
    return sq.cwiseProduct(abar.entries).sum() / 6.0;
}

std::int64_t triangle_count(const Graph& g) {
    const int n = g.vertex_count();
    const int words = g.words_per_row();
    std::int64_t triples = 0;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t* ri = g.row(i);
        for (int j = i + 1; j < n; ++j) {
            if (!g.edge(i, j)) continue;
            const std::uint64_t* rj = g.row(j);
            int common = 0;
            for (int w = 0; w < words; ++w)
                common += __builtin_popcountll(ri[w] & rj[w]);
            triples += common;
        }
    }
    return triples / 3;  // each triangle counted once per edge
}

double signed_triangle_count(const Graph& g, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("signed_triangle_count: p outside (0,1)");
    const double n = g.vertex_count();
    const auto [hi, lo] = abar_values(p);

    const double triangles = static_cast<double>(triangle_count(g));
    double wedge_pairs = 0;  // sum_i binom(deg_i, 2): triples carrying >= 2 edges
    double edges = 0;
    for (int i = 0; i < g.vertex_count(); ++i) {
        const double deg = g.degree(i);
        wedge_pairs += deg * (deg - 1.0) / 2.0;
        edges += deg;
    }
    edges /= 2.0;

    // Triples with exactly e edges, e = 0..3.
    const double n3 = triangles;
    const double n2 = wedge_pairs - 3.0 * triangles;
    const double n1 = edges * (n - 2.0) - 2.0 * wedge_pairs + 3.0 * triangles;
    const double n0 = binom3(n) - n1 - n2 - n3;

    return n3 * hi * hi * hi + n2 * hi * hi * lo + n1 * hi * lo * lo +
           n0 * lo * lo * lo;
}

double signed_wedge_count(const StandardizedAdjacency& abar) {
    double total = 0.0;
    for (int i = 0; i < abar.n; ++i) {
        const double row_sum = abar.entries.row(i).sum();
        const double row_sq = abar.entries.row(i).squaredNorm();
        total += row_sum * row_sum - row_sq;
    }
    return total / 2.0;
}

double signed_wedge_count(const Graph& g, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("signed_wedge_count: p outside (0,1)");
    const double n = g.vertex_count();
    const auto [hi, lo] = abar_values(p);
    double total = 0.0;
    for (int i = 0; i < g.vertex_count(); ++i) {
        const double deg = g.degree(i);
        const double row_sum = deg * hi + (n - 1.0 - deg) * lo;
        const double row_sq = deg * hi * hi + (n - 1.0 - deg) * lo * lo;
        total += row_sum * row_sum - row_sq;
    }
    return total / 2.0;
}

TriangleTheory triangle_theory(const KernelSpectrum& spectrum, int n, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("triangle_theory: p outside (0,1)");
    TriangleTheory theory;
    theory.n = n;
    theory.tr3 = trace_power(spectrum, 3).value;
    theory.tr4 = trace_power(spectrum, 4).value;
    theory.mean_p = binom3(n) * theory.tr3;
    theory.mean_q = 0.0;
    theory.var_q = binom3(n);
    const double skew = std::abs(1.0 - 2.0 * p);
    const double correction4 = 1.0 + std::max(skew / (1.0 - p), skew / p);
    const double correction3 = 1.0 + std::pow(1.0 - 2.0 * p, 3) /
                                         std::pow(p * (1.0 - p), 1.5) * theory.tr3;
    theory.var_p_bound =
        6.0 * binom4(n) * theory.tr4 * correction4 + binom3(n) * correction3;
    return theory;
}

WedgeTheory wedge_theory(int n) {
    WedgeTheory theory;
    theory.mean_q = 0.0;
    theory.var_q = 3.0 * binom3(n);
    return theory;
}

MotifTest make_test(double mean_p, double mean_q, double var_q, double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("make_test: alpha must lie in (0, 0.5]");
    if (!(var_q > 0.0)) throw std::invalid_argument("make_test: var_q must be positive");
    const double z = boost::math::erfc_inv(2.0 * alpha) * std::sqrt(2.0);
    MotifTest test;
    test.side = mean_p >= mean_q ? +1 : -1;
    test.threshold = mean_q + test.side * z * std::sqrt(var_q);
    return test;
}

PowerResult power_experiment(const KernelSpec& kernel, int n, int d, int trials,
                             std::uint64_t seed, const PowerOptions& options) {
    if (trials < 30) throw std::invalid_argument("power_experiment: need trials >= 30");
    const double p = edge_density(kernel, d);
    const StandardizedKernel sk = standardize(kernel, d);
    const KernelSpectrum spectrum = gegenbauer_coefficients(sk, 40);
    const TriangleTheory theory = triangle_theory(spectrum, n, p);
    const MotifTest test = make_test(theory, options.alpha);
    const double pair_count = n * (n - 1.0) / 2.0;

    PowerResult result;
    result.trials = trials;
    result.rgg_statistics.reserve(trials);
    result.er_statistics.reserve(trials);

    int rgg_rejections = 0;
    int er_rejections = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = hash_combine(seed, trial);
        {
            const PointCloud cloud =
                sample_sphere_points(n, d, hash_combine(trial_seed, 1));
            const Graph g = sample_rgg(kernel, cloud, hash_combine(trial_seed, 2));
            const double p_used =
                options.empirical_p ? static_cast<double>(g.edge_count()) / pair_count : p;
            const double statistic = signed_triangle_count(g, p_used);
            result.rgg_statistics.push_back(statistic);
            if (test.rejects(statistic)) ++rgg_rejections;
        }
        {
            const Graph g = sample_er(n, p, hash_combine(trial_seed, 3));
            const double p_used =
                options.empirical_p ? static_cast<double>(g.edge_count()) / pair_count : p;
            const double statistic = signed_triangle_count(g, p_used);
            result.er_statistics.push_back(statistic);
            if (test.rejects(statistic)) ++er_rejections;
        }
    }
    const double t = trials;
    result.power = rgg_rejections / t;
    result.fpr = er_rejections / t;
    result.power_se = std::sqrt(result.power * (1.0 - result.power) / t);
    result.fpr_se = std::sqrt(result.fpr * (1.0 - result.fpr) / t);
    return result;
}

namespace {

// log(n^3 tr^2(kappa^3)) at real-valued dimension d; -inf when the trace
// vanishes.
double log_conjecture_statistic(const KernelSpec& kernel, int n, double d, int kmax) {
    const StandardizedKernel sk = standardize(kernel, d);
    const KernelSpectrum spectrum = gegenbauer_coefficients(sk, kmax);
    const double tr3 = trace_power(spectrum, 3).value;
    if (tr3 == 0.0) return -std::numeric_limits<double>::infinity();
    return 3.0 * std::log(static_cast<double>(n)) + 2.0 * std::log(std::abs(tr3));
}

}  // namespace

PredictedThresholds predicted_thresholds(const KernelSpec& kernel, int n) {
    PredictedThresholds result;
    const int kmax = 40;
    const double d_lo = 4.0;
    const double d_hi = 1e7;

    const double f_lo = log_conjecture_statistic(kernel, n, d_lo, kmax);
    const double f_hi = log_conjecture_statistic(kernel, n, d_hi, kmax);
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
        result.crossing_found = false;
        return result;
    }
    double lo = std::log(d_lo), hi = std::log(d_hi);
    for (int iter = 0; iter < 60 && hi - lo > 1e-10; ++iter) {
        const double mid = (lo + hi) / 2.0;
        const double f = log_conjecture_statistic(kernel, n, std::exp(mid), kmax);
        (f > 0.0 ? lo : hi) = mid;
    }
    result.crossing_found = true;
    result.d_test_bisection = std::exp((lo + hi) / 2.0);

    // Scaled eigenvalues b_k = d^k lambda_k at the crossing dimension.
    const double d_star = result.d_test_bisection;
    const StandardizedKernel sk = standardize(kernel, d_star);
    const KernelSpectrum spectrum = gegenbauer_coefficients(sk, kmax);
    const double norm = std::sqrt(std::max(spectrum.kappa_sq_norm, 1e-300));
    int k0 = 0;
    double b_k0 = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        const double lambda_k = spectrum.entries[k].eigenvalue;
        const double b_k = std::pow(d_star, k) * lambda_k;
        if (std::abs(lambda_k) > 1e-9 * norm) {
            k0 = k;
            b_k0 = b_k;
            break;
        }
    }
    if (k0 == 0) {
        result.crossing_found = false;
        return result;
    }
    result.k0 = k0;
    result.b_k0 = b_k0;
    result.d_test_closed_form = std::pow(std::abs(b_k0), 1.5 / k0) *
                                std::pow(static_cast<double>(n), 0.75 / k0);
    if (k0 == 1) result.d_est_closed_form = std::abs(b_k0) * std::sqrt(static_cast<double>(n));
    return result;
}

}  // namespace rgglab
