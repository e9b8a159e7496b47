#include "rgglab/posterior.hpp"

#include <cmath>
#include <stdexcept>

#include "rgglab/prng.hpp"

namespace rgglab {

namespace {

void check_tiny_scale(int n, int d, std::int64_t draws) {
    if (n > 12 || d > 8 || draws > 10'000'000 || n < 1 || d < 1 || draws < 1)
        throw std::invalid_argument(
            "posterior oracle: limited to n <= 12, d <= 8, M <= 1e7");
}

// log L(A|x) relative to the ER baseline at density p.
double log_weight(const Graph& a, const Eigen::MatrixXd& gram,
                  const KernelSpec& kernel, double p) {
    double lw = 0.0;
    const int n = a.vertex_count();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double k = kernel(gram(i, j));
            if (k <= 0.0 || k >= 1.0)
                throw std::runtime_error(
                    "posterior oracle: kernel hit {0,1} exactly; weights undefined");
            lw += a.edge(i, j) ? std::log(k / p) : std::log((1.0 - k) / (1.0 - p));
        }
    return lw;
}

}  // namespace

double single_edge_posterior_mean(const StandardizedKernel& sk, int a) {
    if (a != 0 && a != 1) throw std::invalid_argument("single_edge_posterior_mean: a is a bit");
    const OverlapMeasure& mu = overlap_measure(sk.d, 512);
    const double cross = mu.integrate([&](double t) { return t * sk(t); });
    const double sign = a == 1 ? 1.0 : -1.0;
    const double ratio = std::pow(sk.p / (1.0 - sk.p), 0.5 - a);
    return sign * ratio * cross;
}

double eta_function(const KernelSpectrum& spectrum, double t) {
    const double d = spectrum.d;
    const double lambda = (d - 2.0) / 2.0;
    double value = 0.0;
    double prev = 1.0;
    double curr = 2.0 * lambda * t;
    for (const auto& entry : spectrum.entries) {
        const int k = entry.k;
        double c_k;
        if (k == 0) {
            c_k = 1.0;
        } else if (k == 1) {
            c_k = curr;
        } else {
            const double next =
                (2.0 * (k - 1.0 + lambda) * t * curr - (k - 2.0 + 2.0 * lambda) * prev) / k;
            prev = curr;
            curr = next;
            c_k = next;
        }
        value += entry.eigenvalue * entry.eigenvalue * ((k + lambda) / lambda) * c_k;
    }
    return value;
}

EtaIdentity eta_conditional_identity_check(const KernelSpectrum& spectrum,
                                           const StandardizedKernel& sk) {
    const OverlapMeasure& mu = overlap_measure(sk.d, 512);
    const double eta_kappa = mu.integrate([&](double t) { return eta_function(spectrum, t) * sk(t); });
    const double p = sk.p;
    // E[eta | A_12 = 1] = sqrt((1-p)/p) E[eta kappa]; the a=0 branch carries
    // the opposite ratio; the p/(1-p)-weighted squares collapse back.
    EtaIdentity identity;
    identity.lhs = p * ((1.0 - p) / p) * eta_kappa * eta_kappa +
                   (1.0 - p) * (p / (1.0 - p)) * eta_kappa * eta_kappa;
    const double tr3 = trace_power(spectrum, 3).value;
    identity.rhs = tr3 * tr3;
    identity.gap = std::abs(identity.lhs - identity.rhs);
    return identity;
}

WeightedEnsemble posterior_ensemble(const Graph& a, const KernelSpec& kernel,
                                    int d, std::int64_t draws, std::uint64_t seed) {
    const int n = a.vertex_count();
    check_tiny_scale(n, d, draws);
    const double p = edge_density(kernel, d);

    WeightedEnsemble ensemble;
    ensemble.n = n;
    ensemble.d = d;
    ensemble.draws = draws;
    ensemble.coords.resize(draws, static_cast<Eigen::Index>(n) * d);
    Eigen::VectorXd log_weights(draws);

    const std::uint64_t base = hash_combine(seed, 0x504F5354ULL);
    for (std::int64_t m = 0; m < draws; ++m) {
        const PointCloud cloud =
            sample_sphere_points(n, d, hash_combine(base, static_cast<std::uint64_t>(m)));
        for (int i = 0; i < n; ++i)
            ensemble.coords.row(m).segment(static_cast<Eigen::Index>(i) * d, d) =
                cloud.coords.row(i);
        const GramMatrix gram = gram_matrix(cloud, DiagMode::Zero);
        log_weights[m] = log_weight(a, gram.entries, kernel, p);
    }
    // The ER baseline constant cancels in self-normalization; stabilize by
    // the max before exponentiating.
    const double max_lw = log_weights.maxCoeff();
    ensemble.weights = (log_weights.array() - max_lw).exp();
    ensemble.weights /= ensemble.weights.sum();
    ensemble.ess = 1.0 / ensemble.weights.squaredNorm();
    ensemble.ess_trustworthy = ensemble.ess >= 100.0;
    return ensemble;
}

double posterior_pair_mean(const WeightedEnsemble& ensemble, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= ensemble.n || j >= ensemble.n)
        throw std::invalid_argument("posterior_pair_mean: bad pair");
    const int d = ensemble.d;
    double mean = 0.0;
    for (std::int64_t m = 0; m < ensemble.draws; ++m) {
        const auto xi = ensemble.coords.row(m).segment(static_cast<Eigen::Index>(i) * d, d);
        const auto xj = ensemble.coords.row(m).segment(static_cast<Eigen::Index>(j) * d, d);
        mean += ensemble.weights[m] * xi.dot(xj);
    }
    return mean;
}

double posterior_pair_mean_se(const WeightedEnsemble& ensemble, int i, int j) {
    const int d = ensemble.d;
    const double mean = posterior_pair_mean(ensemble, i, j);
    double var = 0.0;
    for (std::int64_t m = 0; m < ensemble.draws; ++m) {
        const auto xi = ensemble.coords.row(m).segment(static_cast<Eigen::Index>(i) * d, d);
        const auto xj = ensemble.coords.row(m).segment(static_cast<Eigen::Index>(j) * d, d);
        const double delta = xi.dot(xj) - mean;
        var += ensemble.weights[m] * ensemble.weights[m] * delta * delta;
    }
    return std::sqrt(var);
}

G2Result g2_estimate(const KernelSpec& kernel, int n, int d, int graph_replicates,
                     std::int64_t draws, std::uint64_t seed) {
    check_tiny_scale(n, d, draws);
    if (graph_replicates < 1) throw std::invalid_argument("g2_estimate: need replicates");
    const double p = edge_density(kernel, d);
    const StandardizedKernel sk = standardize(kernel, d);
    const KernelSpectrum spectrum = gegenbauer_coefficients(sk, 40);

    G2Result result;
    result.replicates = graph_replicates;
    double sum = 0.0, sum_sq = 0.0, ess_sum = 0.0;
    for (int rep = 0; rep < graph_replicates; ++rep) {
        const std::uint64_t rep_seed = hash_combine(seed, rep);
        const PointCloud truth =
            sample_sphere_points(n, d, hash_combine(rep_seed, 1));
        const Graph a = sample_rgg(kernel, truth, hash_combine(rep_seed, 2));

        // Stream prior draws; even/odd indices form the two half-ensembles.
        double half_wsum[2] = {0.0, 0.0};
        double half_weta[2] = {0.0, 0.0};
        double wsum = 0.0, wsq = 0.0;
        const std::uint64_t draw_base = hash_combine(rep_seed, 3);
        for (std::int64_t m = 0; m < draws; ++m) {
            const PointCloud cloud = sample_sphere_points(
                n, d, hash_combine(draw_base, static_cast<std::uint64_t>(m)));
            const GramMatrix gram = gram_matrix(cloud, DiagMode::Zero);
            const double w = std::exp(log_weight(a, gram.entries, kernel, p));
            const double eta = eta_function(spectrum, gram.entries(0, 1));
            const int half = static_cast<int>(m & 1);
            half_wsum[half] += w;
            half_weta[half] += w * eta;
            wsum += w;
            wsq += w * w;
        }
        if (half_wsum[0] <= 0.0 || half_wsum[1] <= 0.0)
            throw std::runtime_error("g2_estimate: degenerate importance weights");
        const double estimate =
            (half_weta[0] / half_wsum[0]) * (half_weta[1] / half_wsum[1]);
        result.replicate_estimates.push_back(estimate);
        sum += estimate;
        sum_sq += estimate * estimate;
        ess_sum += wsum * wsum / wsq;
    }
    const double r = graph_replicates;
    result.estimate = sum / r;
    const double var = std::max(sum_sq / r - result.estimate * result.estimate, 0.0);
    result.std_error = graph_replicates > 1 ? std::sqrt(var / r) : 0.0;
    result.mean_ess = ess_sum / r;
    if (result.mean_ess < 100.0)
        throw std::runtime_error("g2_estimate: effective sample size below 100; raise M");
    return result;
}

}  // namespace rgglab
