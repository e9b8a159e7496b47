#include "rgglab/distance_kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>
#include <Eigen/Eigenvalues>

#include "rgglab/detection.hpp"
#include "rgglab/prng.hpp"

namespace rgglab {

double DistanceKernelSpec::operator()(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const {
    return from_sq_distance((x - y).squaredNorm());
}

double DistanceKernelSpec::from_sq_distance(double dist_sq) const {
    return gamma * std::exp(-0.5 * beta * dist_sq);
}

std::string DistanceKernelSpec::to_string() const {
    std::ostringstream oss;
    oss.precision(17);
    oss << "distance(gamma=" << gamma << ",beta=" << beta << ")";
    return oss.str();
}

DistanceKernelSpec parse_distance_kernel(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (text.substr(0, open) != "distance" || open == std::string::npos ||
        close == std::string::npos || close < open)
        throw std::invalid_argument("expected distance(gamma=..,beta=..), got '" + text + "'");
    DistanceKernelSpec spec;
    bool saw_gamma = false, saw_beta = false;
    std::istringstream iss(text.substr(open + 1, close - open - 1));
    std::string token;
    while (std::getline(iss, token, ',')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("distance kernel: expected key=value, got '" + token + "'");
        const std::string key = token.substr(0, eq);
        const double value = std::stod(token.substr(eq + 1));
        if (key == "gamma") {
            spec.gamma = value;
            saw_gamma = true;
        } else if (key == "beta") {
            spec.beta = value;
            saw_beta = true;
        } else {
            throw std::invalid_argument("distance kernel: unknown key '" + key + "'");
        }
    }
    if (!saw_gamma || !saw_beta)
        throw std::invalid_argument("distance kernel: need both gamma and beta");
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0))
        throw std::invalid_argument("distance kernel: gamma must lie in (0,1)");
    if (!(spec.beta > 0.0)) throw std::invalid_argument("distance kernel: beta must be positive");
    return spec;
}

SimpleSubgraph SimpleSubgraph::from_edges(int vertex_count,
                                          std::vector<std::pair<int, int>> edges) {
    if (vertex_count < 1) throw std::invalid_argument("SimpleSubgraph: need vertices");
    if (edges.size() > 16)
        throw std::invalid_argument("SimpleSubgraph: more than 16 edges");
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(vertex_count, vertex_count);
    for (auto [u, v] : edges) {
        if (u == v || u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
            throw std::invalid_argument("SimpleSubgraph: bad edge");
        laplacian(u, u) += 1.0;
        laplacian(v, v) += 1.0;
        laplacian(u, v) -= 1.0;
        laplacian(v, u) -= 1.0;
    }
    SimpleSubgraph h;
    h.vertex_count = vertex_count;
    h.edges = std::move(edges);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    h.laplacian_eigenvalues.assign(solver.eigenvalues().data(),
                                   solver.eigenvalues().data() + vertex_count);
    return h;
}

SimpleSubgraph SimpleSubgraph::single_edge() { return from_edges(2, {{0, 1}}); }
SimpleSubgraph SimpleSubgraph::wedge() { return from_edges(3, {{0, 1}, {1, 2}}); }
SimpleSubgraph SimpleSubgraph::triangle() {
    return from_edges(3, {{0, 1}, {1, 2}, {2, 0}});
}
SimpleSubgraph SimpleSubgraph::cycle(int length) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < length; ++i) edges.emplace_back(i, (i + 1) % length);
    return from_edges(length, std::move(edges));
}

double laplacian_subgraph_expectation(const SimpleSubgraph& h, double gamma,
                                      double beta, int d) {
    if (d < 1) throw std::invalid_argument("laplacian_subgraph_expectation: d >= 1");
    double log_value = static_cast<double>(h.edges.size()) * std::log(gamma);
    for (double lambda : h.laplacian_eigenvalues) {
        const double x = beta * std::max(lambda, 0.0) / d;
        log_value -= 0.5 * d * std::log1p(x);
    }
    return std::exp(log_value);
}

double distance_edge_density(const DistanceKernelSpec& kernel, int d) {
    return laplacian_subgraph_expectation(SimpleSubgraph::single_edge(), kernel.gamma,
                                          kernel.beta, d);
}

double signed_subgraph_expectation(const SimpleSubgraph& h, double gamma,
                                   double beta, int d) {
    const std::size_t n_edges = h.edges.size();
    if (n_edges > 16)
        throw std::invalid_argument("signed_subgraph_expectation: more than 16 edges");
    const double p = laplacian_subgraph_expectation(SimpleSubgraph::single_edge(),
                                                    gamma, beta, d);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << n_edges); ++mask) {
        std::vector<std::pair<int, int>> subset;
        for (std::size_t e = 0; e < n_edges; ++e)
            if (mask & (1u << e)) subset.push_back(h.edges[e]);
        const int removed = static_cast<int>(n_edges - subset.size());
        const SimpleSubgraph f = SimpleSubgraph::from_edges(h.vertex_count, std::move(subset));
        const double sign = removed % 2 == 0 ? 1.0 : -1.0;
        total += sign * std::pow(p, removed) *
                 laplacian_subgraph_expectation(f, gamma, beta, d);
    }
    return total;
}

Graph sample_rgg(const DistanceKernelSpec& kernel, const PointCloud& cloud,
                 std::uint64_t seed) {
    Graph g(cloud.n);
    g.provenance = GraphProvenance::RGG;
    g.kernel_id = kernel.to_string();
    const int n = cloud.n;
    Eigen::VectorXd sq_norms(n);
    for (int i = 0; i < n; ++i) sq_norms[i] = cloud.coords.row(i).squaredNorm();
    const int block = 256;
    Eigen::MatrixXd overlaps;
    for (int i0 = 0; i0 < n; i0 += block) {
        const int rows = std::min(block, n - i0);
        overlaps.noalias() = cloud.coords.middleRows(i0, rows) * cloud.coords.transpose();
        for (int bi = 0; bi < rows; ++bi) {
            const int i = i0 + bi;
            for (int j = i + 1; j < n; ++j) {
                const double dist_sq =
                    std::max(sq_norms[i] + sq_norms[j] - 2.0 * overlaps(bi, j), 0.0);
                const double prob = kernel.from_sq_distance(dist_sq);
                if (edge_uniform(seed, static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)) < prob)
                    g.set_edge(i, j);
            }
        }
    }
    return g;
}

WedgeExperimentResult wedge_nonuniversality_experiment(double gamma, double beta,
                                                       int n, int d, int trials,
                                                       double alpha,
                                                       std::uint64_t seed) {
    DistanceKernelSpec kernel{gamma, beta};
    WedgeExperimentResult result;
    result.p = distance_edge_density(kernel, d);
    const double p = result.p;
    const double pq = p * (1.0 - p);

    const double wedge_signed = signed_subgraph_expectation(SimpleSubgraph::wedge(),
                                                            gamma, beta, d);
    const double triangle_signed = signed_subgraph_expectation(
        SimpleSubgraph::triangle(), gamma, beta, d);
    const double n_triples = static_cast<double>(n) * (n - 1.0) * (n - 2.0) / 6.0;
    result.w_theory = 3.0 * n_triples * wedge_signed;

    // Null-calibrated one-sided thresholds on the centered statistics.
    const double z = boost::math::erfc_inv(2.0 * alpha) * std::sqrt(2.0);
    const double w_sd_null = std::sqrt(3.0 * n_triples) * pq;
    const double t_sd_null = std::sqrt(n_triples) * std::pow(pq, 1.5);
    const double w_threshold = z * w_sd_null;  // wedge mean is positive (beta > 0)
    const double t_side = triangle_signed >= 0.0 ? 1.0 : -1.0;
    const double t_threshold = t_side * z * t_sd_null;

    double w_sum = 0, w_sumsq = 0, t_sum = 0, t_sumsq = 0;
    double w0_sum = 0, w0_sumsq = 0;
    int w_rejects = 0, t_rejects = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = hash_combine(seed, trial);
        const PointCloud cloud =
            sample_gaussian_points(n, d, hash_combine(trial_seed, 1));
        const Graph g = sample_rgg(kernel, cloud, hash_combine(trial_seed, 2));
        const double w = signed_wedge_count(g, p) * pq;
        const double t = signed_triangle_count(g, p) * std::pow(pq, 1.5);
        result.w_values.push_back(w);
        result.t_values.push_back(t);
        w_sum += w;
        w_sumsq += w * w;
        t_sum += t;
        t_sumsq += t * t;
        if (w > w_threshold) ++w_rejects;
        if (t_side > 0 ? t > t_threshold : t < t_threshold) ++t_rejects;

        const Graph g0 = sample_er(n, p, hash_combine(trial_seed, 3));
        const double w0 = signed_wedge_count(g0, p) * pq;
        result.w_null_values.push_back(w0);
        w0_sum += w0;
        w0_sumsq += w0 * w0;
    }
    const double t_count = trials;
    auto finalize = [t_count](double sum, double sumsq, double& mean, double& se) {
        mean = sum / t_count;
        const double var = std::max(sumsq / t_count - mean * mean, 0.0);
        se = std::sqrt(var / t_count);
    };
    finalize(w_sum, w_sumsq, result.w_mean, result.w_se);
    finalize(t_sum, t_sumsq, result.t_mean, result.t_se);
    finalize(w0_sum, w0_sumsq, result.w_null_mean, result.w_null_se);
    result.w_power = w_rejects / t_count;
    result.t_power = t_rejects / t_count;
    result.power_se = std::sqrt(0.25 / t_count);
    return result;
}

}  // namespace rgglab
