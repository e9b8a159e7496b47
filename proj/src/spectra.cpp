#include "rgglab/spectra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rgglab/latent.hpp"
#include "rgglab/prng.hpp"

namespace rgglab {

namespace {

BigInt binomial_exact(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    for (long long j = 1; j <= k; ++j) {
        result *= (n - k + j);
        result /= j;
    }
    return result;
}

// log binom(x, k) for real x >= k via lgamma.
double log_binomial_real(double x, int k) {
    if (k == 0) return 0.0;
    return std::lgamma(x + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(x - static_cast<double>(k) + 1.0);
}

// E[C_k^lambda(T)^2] = ((d-2)/(d+2k-2)) * binom(d-3+k, k), valid for real d.
double gegenbauer_sq_norm(double d, int k) {
    if (k == 0) return 1.0;
    return (d - 2.0) / (d + 2.0 * k - 2.0) * std::exp(log_binomial_real(d - 3.0 + k, k));
}

}  // namespace

double gegenbauer_eval(int k, double lambda, double t) {
    if (k < 0) throw std::invalid_argument("gegenbauer_eval: k must be >= 0");
    if (k == 0) return 1.0;
    double prev = 1.0;
    double curr = 2.0 * lambda * t;
    for (int m = 2; m <= k; ++m) {
        const double next =
            (2.0 * (m - 1.0 + lambda) * t * curr - (m - 2.0 + 2.0 * lambda) * prev) / m;
        prev = curr;
        curr = next;
    }
    return curr;
}

BigInt harmonic_dim(int d, int k) {
    if (d < 2) throw std::invalid_argument("harmonic_dim: d must be >= 2");
    if (k < 0) throw std::invalid_argument("harmonic_dim: k must be >= 0");
    if (k == 0) return 1;
    if (d == 2) return 2;  // limit convention: cos/sin pair for every k >= 1
    return binomial_exact(d - 1 + k, d - 1) - binomial_exact(d - 3 + k, d - 1);
}

double harmonic_dim_log(double d, int k) {
    if (k == 0) return 0.0;
    if (d <= 2.0) return std::log(2.0);
    // (d-2+2k)/(d-2) * binom(d-3+k, k)
    return std::log((d - 2.0 + 2.0 * k) / (d - 2.0)) + log_binomial_real(d - 3.0 + k, k);
}

KernelSpectrum gegenbauer_coefficients(const StandardizedKernel& sk, int kmax) {
    if (kmax < 1) throw std::invalid_argument("gegenbauer_coefficients: kmax must be >= 1");
    const double d = sk.d;
    if (d < 3.0)
        throw std::invalid_argument("gegenbauer_coefficients: requires d >= 3 (lambda > 0)");
    const double lambda = (d - 2.0) / 2.0;
    const int n_nodes = std::max(256, 4 * kmax + 16);
    const OverlapMeasure& mu = overlap_measure(d, n_nodes);

    KernelSpectrum spectrum;
    spectrum.d = d;
    spectrum.kmax = kmax;
    spectrum.kappa_sq_norm = mu.integrate([&](double t) {
        const double v = sk(t);
        return v * v;
    });

    // Degree-by-degree projection with the recurrence carried across all
    // nodes at once. Truncates adaptively: once two consecutive degrees
    // contribute less than 1e-14 * ||kappa||^2 the remaining terms are below
    // quadrature resolution (high degrees only produce cancellation noise).
    const Eigen::Index n_pts = mu.nodes.size();
    Eigen::VectorXd weighted_kappa(n_pts);
    for (Eigen::Index i = 0; i < n_pts; ++i)
        weighted_kappa[i] = mu.weights[i] * sk(mu.nodes[i]);
    Eigen::VectorXd prev = Eigen::VectorXd::Ones(n_pts);
    Eigen::VectorXd curr = 2.0 * lambda * mu.nodes;

    double captured = 0.0;
    int consecutive_negligible = 0;
    for (int k = 0; k <= kmax; ++k) {
        double numerator;
        if (k == 0) {
            numerator = weighted_kappa.sum();
        } else if (k == 1) {
            numerator = weighted_kappa.dot(curr);
        } else {
            Eigen::VectorXd next =
                (2.0 * (k - 1.0 + lambda) * mu.nodes.cwiseProduct(curr) -
                 (k - 2.0 + 2.0 * lambda) * prev) /
                static_cast<double>(k);
            prev.swap(curr);
            curr.swap(next);
            numerator = weighted_kappa.dot(curr);
        }
        SpectrumEntry entry;
        entry.k = k;
        entry.alpha = numerator / gegenbauer_sq_norm(d, k);
        entry.eigenvalue = lambda / (k + lambda) * entry.alpha;
        entry.log_multiplicity = harmonic_dim_log(d, k);
        const double d_rounded = std::round(d);
        if (std::abs(d - d_rounded) < 1e-9 && entry.log_multiplicity < 700.0) {
            // integer dimensions get the exact integer multiplicity
            entry.multiplicity =
                static_cast<double>(harmonic_dim(static_cast<int>(d_rounded), k));
            entry.log_multiplicity = std::log(entry.multiplicity);
        } else {
            entry.multiplicity = entry.log_multiplicity < 700.0
                                     ? std::exp(entry.log_multiplicity)
                                     : std::numeric_limits<double>::infinity();
        }
        // lambda_k^2 * m_k in log space to survive huge multiplicities
        double contribution = 0.0;
        if (entry.eigenvalue != 0.0)
            contribution = std::exp(2.0 * std::log(std::abs(entry.eigenvalue)) +
                                    entry.log_multiplicity);
        if (k >= 4) {
            if (contribution < 1e-14 * spectrum.kappa_sq_norm)
                ++consecutive_negligible;
            else
                consecutive_negligible = 0;
            if (consecutive_negligible >= 2) break;
        }
        captured += contribution;
        spectrum.entries.push_back(entry);
    }
    spectrum.kmax = static_cast<int>(spectrum.entries.size()) - 1;
    spectrum.tail_mass = spectrum.kappa_sq_norm - captured;
    if (spectrum.tail_mass < -1e-8)
        throw std::runtime_error("gegenbauer_coefficients: Bessel inequality violated");
    return spectrum;
}

double rodrigues_coefficient(const StandardizedKernel& sk, int k) {
    if (k < 0) throw std::invalid_argument("rodrigues_coefficient: k must be >= 0");
    const int degree = sk.base.polynomial_degree();
    if (degree < 0)
        throw std::invalid_argument("rodrigues_coefficient: exact derivatives need a polynomial kernel");
    const double d = sk.d;
    const OverlapMeasure& mu = overlap_measure(d, 512);
    if (k == 0) return mu.integrate([&](double t) { return sk(t); });

    // k-th derivative coefficients of kappa(t) = (K(t) - p)/scale
    std::vector<double> deriv(static_cast<std::size_t>(std::max(degree + 1, 1)), 0.0);
    if (sk.base.family == KernelFamily::Polynomial) {
        for (std::size_t i = 0; i < sk.base.coeffs.size(); ++i) deriv[i] = sk.base.coeffs[i];
    } else if (sk.base.family == KernelFamily::Linear) {
        deriv[0] = sk.base.p;
        deriv[1] = sk.base.r;
    } else {  // Constant
        deriv[0] = sk.base.p;
    }
    deriv[0] -= sk.p;
    for (double& c : deriv) c /= sk.scale;
    for (int pass = 0; pass < k; ++pass) {
        for (std::size_t i = 0; i + 1 < deriv.size(); ++i)
            deriv[i] = deriv[i + 1] * static_cast<double>(i + 1);
        deriv.back() = 0.0;
    }

    const double expectation = mu.integrate([&](double t) {
        double value = 0.0;
        for (auto it = deriv.rbegin(); it != deriv.rend(); ++it) value = value * t + *it;
        return value * std::pow(1.0 - t * t, k);
    });

    // (d+2k-2) / ((d-2)(d-1)(d+1)...(d+2k-3))
    double prefactor = (d + 2.0 * k - 2.0) / (d - 2.0);
    for (int j = 0; j < k; ++j) prefactor /= (d - 1.0 + 2.0 * j);
    return prefactor * expectation;
}

TracePower trace_power(const KernelSpectrum& spectrum, int m) {
    if (m < 2) throw std::invalid_argument("trace_power: m must be >= 2");
    TracePower result;
    double sum = 0.0, comp = 0.0;
    for (const auto& entry : spectrum.entries) {
        if (entry.k == 0 || entry.eigenvalue == 0.0) continue;
        const double log_term =
            m * std::log(std::abs(entry.eigenvalue)) + entry.log_multiplicity;
        double term = std::exp(log_term);
        if (entry.eigenvalue < 0.0 && m % 2 == 1) term = -term;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    result.value = sum;
    if (m % 2 == 0) {
        // |lambda| <= 1 for operators built from bounded kappa, so the tail of
        // sum lambda^m m_k is at most the quadratic tail mass.
        result.tail_bound = std::max(spectrum.tail_mass, 0.0);
        if (spectrum.kappa_sq_norm > 0.0 &&
            result.tail_bound / spectrum.kappa_sq_norm > 1e-3)
            result.tail_warning = true;
    }
    return result;
}

McEstimate trace_power_mc(const StandardizedKernel& sk, int d, int m,
                          std::int64_t samples, std::uint64_t seed) {
    if (m < 2) throw std::invalid_argument("trace_power_mc: m must be >= 2");
    McEstimate estimate;
    estimate.samples = samples;
    Prng rng(hash_combine(seed, 0x7472414345ULL));
    Eigen::MatrixXd pts(m, d);
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t s = 0; s < samples; ++s) {
        for (int i = 0; i < m; ++i) {
            double norm_sq = 0.0;
            for (int c = 0; c < d; ++c) {
                const double g = rng.next_normal();
                pts(i, c) = g;
                norm_sq += g * g;
            }
            pts.row(i) /= std::sqrt(norm_sq);
        }
        double prod = 1.0;
        for (int i = 0; i < m; ++i)
            prod *= sk(pts.row(i).dot(pts.row((i + 1) % m)));
        sum += prod;
        sum_sq += prod * prod;
    }
    const double n = static_cast<double>(samples);
    estimate.mean = sum / n;
    const double var = std::max(sum_sq / n - estimate.mean * estimate.mean, 0.0);
    estimate.std_error = std::sqrt(var / n);
    return estimate;
}

Multigraph::Multigraph(int vertex_count) : vertex_count_(vertex_count) {
    if (vertex_count < 1) throw std::invalid_argument("Multigraph: need at least one vertex");
    degrees_.assign(vertex_count, 0);
}

void Multigraph::add_edge(int u, int v, int multiplicity) {
    if (u == v) throw std::invalid_argument("Multigraph: self-loops not allowed");
    if (u < 0 || v < 0 || u >= vertex_count_ || v >= vertex_count_)
        throw std::invalid_argument("Multigraph: vertex out of range");
    if (multiplicity < 1) throw std::invalid_argument("Multigraph: multiplicity must be >= 1");
    for (int c = 0; c < multiplicity; ++c) edges_.emplace_back(u, v);
    degrees_[u] += multiplicity;
    degrees_[v] += multiplicity;
    total_edges_ += multiplicity;
}

namespace {

BigInt falling_factorial(int d, int m) {
    BigInt result = 1;
    for (int j = 0; j < m; ++j) result *= (d - j);
    return result;
}

BigInt gaussian_moment(int m) {  // E[N(0,1)^m]
    if (m % 2 == 1) return 0;
    BigInt result = 1;
    for (int j = m - 1; j >= 1; j -= 2) result *= j;
    return result;
}

// Value of one partition: prod over blocks of prod over block vertices of
// mu_{deg}; zero as soon as any block has an odd-degree vertex.
BigInt partition_value(const Multigraph& h, const std::vector<int>& block_of,
                       int n_blocks, int d) {
    const auto& edges = h.edge_list();
    std::vector<std::vector<int>> block_degree(
        static_cast<std::size_t>(n_blocks), std::vector<int>(h.vertex_count(), 0));
    for (std::size_t e = 0; e < edges.size(); ++e) {
        block_degree[block_of[e]][edges[e].first] += 1;
        block_degree[block_of[e]][edges[e].second] += 1;
    }
    BigInt value = falling_factorial(d, n_blocks);
    for (int b = 0; b < n_blocks; ++b)
        for (int v = 0; v < h.vertex_count(); ++v) {
            const int deg = block_degree[b][v];
            if (deg == 0) continue;
            if (deg % 2 == 1) return 0;
            value *= gaussian_moment(deg);
        }
    return value;
}

}  // namespace

BigInt wick_multigraph_expectation_exact(const Multigraph& h, int d) {
    const int n_edges = h.edge_count();
    if (n_edges > 12)
        throw std::invalid_argument("wick_multigraph_expectation: more than 12 edges");
    for (int v = 0; v < h.vertex_count(); ++v)
        if (h.degree(v) % 2 == 1) return 0;  // odd moment
    if (n_edges == 0) return 1;

    // Restricted-growth strings enumerate set partitions of the edge list.
    std::vector<int> block_of(static_cast<std::size_t>(n_edges), 0);
    BigInt total = 0;
    const auto recurse = [&](auto&& self, int pos, int max_block) -> void {
        if (pos == n_edges) {
            total += partition_value(h, block_of, max_block + 1, d);
            return;
        }
        for (int b = 0; b <= max_block + 1; ++b) {
            block_of[pos] = b;
            self(self, pos + 1, std::max(max_block, b));
        }
    };
    block_of[0] = 0;
    recurse(recurse, 1, 0);
    return total;
}

double wick_multigraph_expectation(const Multigraph& h, int d) {
    return static_cast<double>(wick_multigraph_expectation_exact(h, d));
}

double spherical_multigraph_expectation(const Multigraph& h, int d) {
    for (int v = 0; v < h.vertex_count(); ++v)
        if (h.degree(v) % 2 == 1) return 0.0;
    const BigInt wick = wick_multigraph_expectation_exact(h, d);
    BigInt denom = 1;
    for (int v = 0; v < h.vertex_count(); ++v)
        for (int j = 0; j < h.degree(v); j += 2) denom *= (d + j);
    const boost::multiprecision::cpp_rational ratio(wick, denom);
    return static_cast<double>(ratio);
}

}  // namespace rgglab
