#include "rgglab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <Eigen/Eigenvalues>

#include "rgglab/latent.hpp"

namespace rgglab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;

OverlapMeasure build_measure(double d, int n_nodes) {
    OverlapMeasure m;
    m.d = d;
    if (d < 1.0) throw std::invalid_argument("overlap_measure: d must be >= 1");
    if (d < 1.5) {  // d = 1: <x1,x2> in {-1,+1} with equal mass
        m.nodes.resize(2);
        m.weights.resize(2);
        m.nodes << -1.0, 1.0;
        m.weights << 0.5, 0.5;
        return m;
    }
    if (std::abs(d - 2.0) < 1e-12) {  // arcsine law: Gauss-Chebyshev
        m.nodes.resize(n_nodes);
        m.weights.resize(n_nodes);
        for (int j = 0; j < n_nodes; ++j) {
            m.nodes[j] = std::cos((2.0 * j + 1.0) * kPi / (2.0 * n_nodes));
            m.weights[j] = 1.0 / n_nodes;
        }
        return m;
    }

    // Golub-Welsch for the symmetric Jacobi weight (1-t^2)^a, a = (d-3)/2.
    const double a = (d - 3.0) / 2.0;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_nodes);
    Eigen::VectorXd subdiag(n_nodes - 1);
    for (int k = 1; k < n_nodes; ++k) {
        double bk;
        if (k == 1) {
            bk = 1.0 / (2.0 * a + 3.0);
        } else {
            bk = k * (k + 2.0 * a) /
                 ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0));
        }
        subdiag[k - 1] = std::sqrt(bk);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("overlap_measure: tridiagonal eigensolve failed");
    m.nodes = solver.eigenvalues();
    m.weights.resize(n_nodes);
    for (int j = 0; j < n_nodes; ++j) {
        const double v0 = solver.eigenvectors()(0, j);
        m.weights[j] = v0 * v0;
    }
    m.weights /= m.weights.sum();
    return m;
}

struct MeasureKey {
    long long d_bits;
    int n_nodes;
    bool operator<(const MeasureKey& o) const {
        return d_bits != o.d_bits ? d_bits < o.d_bits : n_nodes < o.n_nodes;
    }
};

std::mutex g_measure_mutex;
std::map<MeasureKey, OverlapMeasure> g_measure_cache;

double gauss_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double logistic_cdf(double x) {
    if (x >= 0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double horner(const std::vector<double>& coeffs, double t) {
    double value = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) value = value * t + *it;
    return value;
}

void check_probability_range(const KernelSpec& k) {
    const KernelRange range = kernel_range(k);
    if (range.min_value < -1e-12 || range.max_value > 1.0 + 1e-12) {
        std::ostringstream oss;
        oss << "kernel " << k.to_string() << " leaves [0,1] on [-1,1]: range ["
            << range.min_value << ", " << range.max_value << "]";
        throw std::invalid_argument(oss.str());
    }
}

// phi^{(m)}(0) via He_m(0): zero for odd m, (-1)^{m/2} (m-1)!! otherwise.
double gaussian_density_derivative_at_zero(int m) {
    if (m % 2 == 1) return 0.0;
    double hermite0 = 1.0;
    for (int j = 1; 2 * j <= m; ++j) hermite0 *= -(2.0 * j - 1.0);
    return hermite0 / std::sqrt(2.0 * kPi);
}

// d^m sigma / dx^m at 0 via the polynomial-in-sigma recursion
// (f = sum c_j s^j  =>  f' = sum c_j j (s^j - s^{j+1})).
double logistic_derivative_at_zero(int m) {
    std::vector<double> c = {0.0, 1.0};  // sigma itself
    for (int step = 0; step < m; ++step) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t j = 1; j < c.size(); ++j) {
            next[j] += c[j] * static_cast<double>(j);
            next[j + 1] -= c[j] * static_cast<double>(j);
        }
        c = std::move(next);
    }
    double value = 0.0;
    double s_pow = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        value += c[j] * s_pow;
        s_pow *= 0.5;
    }
    return value;
}

double quadrature_edge_density(const KernelSpec& kernel, double d, int n_nodes) {
    const OverlapMeasure& m = overlap_measure(d, n_nodes);
    return m.integrate([&](double t) { return kernel(t); });
}

}  // namespace

OverlapMeasure overlap_measure(double d, int n_nodes) {
    long long d_bits = 0;
    static_assert(sizeof(d_bits) == sizeof(d));
    std::memcpy(&d_bits, &d, sizeof(d));
    MeasureKey key{d_bits, n_nodes};
    {
        std::lock_guard<std::mutex> lock(g_measure_mutex);
        auto it = g_measure_cache.find(key);
        if (it != g_measure_cache.end()) return it->second;
    }
    OverlapMeasure m = build_measure(d, n_nodes);

    // Exact-moment self-diagnosis.
    const double m0 = m.weights.sum();
    const double m2 = m.integrate([](double t) { return t * t; });
    const double m4 = m.integrate([](double t) { return t * t * t * t; });
    if (std::abs(m0 - 1.0) > 1e-10 || std::abs(m2 - 1.0 / d) > 1e-8 ||
        std::abs(m4 - 3.0 / (d * (d + 2.0))) > 1e-8)
        throw std::runtime_error("overlap_measure: moment identities violated");

    std::lock_guard<std::mutex> lock(g_measure_mutex);
    return g_measure_cache.emplace(key, std::move(m)).first->second;
}

KernelSpec KernelSpec::constant(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("constant kernel: p outside [0,1]");
    KernelSpec k;
    k.family = KernelFamily::Constant;
    k.p = p;
    return k;
}

KernelSpec KernelSpec::linear(double p, double r, bool override_range) {
    if (!override_range && !(r > 0.0 && r <= p && p < 0.5))
        throw std::invalid_argument("linear kernel: require 0 < r <= p < 1/2 (or override)");
    KernelSpec k;
    k.family = KernelFamily::Linear;
    k.p = p;
    k.r = r;
    check_probability_range(k);
    return k;
}

KernelSpec KernelSpec::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial kernel: no coefficients");
    KernelSpec k;
    k.family = KernelFamily::Polynomial;
    k.coeffs = std::move(coeffs);
    check_probability_range(k);
    return k;
}

KernelSpec KernelSpec::gaussian_cdf(double r) {
    if (r <= 0.0) throw std::invalid_argument("gausscdf kernel: r must be positive");
    KernelSpec k;
    k.family = KernelFamily::GaussianCDF;
    k.r = r;
    return k;
}

KernelSpec KernelSpec::logistic(double r) {
    if (r <= 0.0) throw std::invalid_argument("logistic kernel: r must be positive");
    KernelSpec k;
    k.family = KernelFamily::Logistic;
    k.r = r;
    return k;
}

KernelSpec KernelSpec::hard_threshold(double tau) {
    KernelSpec k;
    k.family = KernelFamily::HardThreshold;
    k.tau = tau;
    return k;
}

double KernelSpec::operator()(double t) const {
    switch (family) {
        case KernelFamily::Constant: return p;
        case KernelFamily::Linear: return std::clamp(p + r * t, 0.0, 1.0);
        case KernelFamily::Polynomial: return horner(coeffs, t);
        case KernelFamily::GaussianCDF: return gauss_cdf(r * t);
        case KernelFamily::Logistic: return logistic_cdf(r * t);
        case KernelFamily::HardThreshold: return t >= tau ? 1.0 : 0.0;
    }
    return 0.0;
}

int KernelSpec::polynomial_degree() const {
    switch (family) {
        case KernelFamily::Constant: return 0;
        case KernelFamily::Linear: return 1;
        case KernelFamily::Polynomial: {
            int deg = 0;
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                if (coeffs[i] != 0.0) deg = static_cast<int>(i);
            return deg;
        }
        default: return -1;
    }
}

std::string KernelSpec::to_string() const {
    std::ostringstream oss;
    oss.precision(17);
    switch (family) {
        case KernelFamily::Constant: oss << "const(p=" << p << ")"; break;
        case KernelFamily::Linear: oss << "linear(p=" << p << ",r=" << r << ")"; break;
        case KernelFamily::GaussianCDF: oss << "gausscdf(r=" << r << ")"; break;
        case KernelFamily::Logistic: oss << "logistic(r=" << r << ")"; break;
        case KernelFamily::HardThreshold: oss << "threshold(tau=" << tau << ")"; break;
        case KernelFamily::Polynomial: {
            oss << "poly(";
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                if (i) oss << ",";
                oss << coeffs[i];
            }
            oss << ")";
            break;
        }
    }
    return oss.str();
}

KernelRange kernel_range(const KernelSpec& kernel) {
    constexpr int kGrid = 10000;
    KernelRange range;
    range.min_value = 1e300;
    range.max_value = -1e300;
    for (int j = 0; j < kGrid; ++j) {
        const double t = std::cos((2.0 * j + 1.0) * kPi / (2.0 * kGrid));
        const double v = kernel(t);
        range.min_value = std::min(range.min_value, v);
        range.max_value = std::max(range.max_value, v);
    }
    // endpoints matter for monotone kernels
    for (double t : {-1.0, 1.0}) {
        const double v = kernel(t);
        range.min_value = std::min(range.min_value, v);
        range.max_value = std::max(range.max_value, v);
    }
    range.bounded_away = range.min_value > 1e-6 && range.max_value < 1.0 - 1e-6;
    return range;
}

double edge_density(const KernelSpec& kernel, double d) {
    if (d < 1.0) throw std::invalid_argument("edge_density: d must be >= 1");
    switch (kernel.family) {
        case KernelFamily::Constant: return kernel.p;
        case KernelFamily::Linear: return kernel.p;  // odd term integrates to zero
        case KernelFamily::HardThreshold: {
            if (d < 1.5) {
                double p = 0.0;
                if (1.0 >= kernel.tau) p += 0.5;
                if (-1.0 >= kernel.tau) p += 0.5;
                return p;
            }
            if (kernel.tau <= -1.0) return 1.0;
            if (kernel.tau > 1.0) return 0.0;
            // (1+T)/2 ~ Beta(a,a) with a = (d-1)/2
            const double a = (d - 1.0) / 2.0;
            return 1.0 - boost::math::ibeta(a, a, (1.0 + kernel.tau) / 2.0);
        }
        default: break;
    }
    const int base_nodes = 256;
    const double coarse = quadrature_edge_density(kernel, d, base_nodes);
    const double fine = quadrature_edge_density(kernel, d, 2 * base_nodes);
    if (std::abs(coarse - fine) > 1e-8) {
        std::ostringstream oss;
        oss << "edge_density: quadrature did not converge for " << kernel.to_string()
            << " (delta " << std::abs(coarse - fine) << ")";
        throw QuadratureError(oss.str());
    }
    return fine;
}

StandardizedKernel standardize(const KernelSpec& kernel, double d) {
    const double p = edge_density(kernel, d);
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("standardize: degenerate edge density p=" + std::to_string(p));
    StandardizedKernel sk;
    sk.base = kernel;
    sk.d = d;
    sk.p = p;
    sk.scale = std::sqrt(p * (1.0 - p));
    if (kernel.family != KernelFamily::HardThreshold && d >= 2.0) {
        // discontinuous kernels center through the analytic density instead
        const OverlapMeasure& m = overlap_measure(d, 512);
        const double mean = m.integrate([&](double t) { return sk(t); });
        if (std::abs(mean) > 1e-8)
            throw std::runtime_error("standardize: centering failed, |mean| = " +
                                     std::to_string(std::abs(mean)));
    }
    return sk;
}

TaylorKernel taylor_kernel(const KernelSpec& kernel, int degree) {
    if (degree < 0) throw std::invalid_argument("taylor_kernel: degree must be >= 0");
    if (!kernel.smooth())
        throw std::invalid_argument("taylor_kernel: kernel has no Taylor expansion at 0");

    std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1, 0.0);
    switch (kernel.family) {
        case KernelFamily::Constant: coeffs[0] = kernel.p; break;
        case KernelFamily::Linear:
            coeffs[0] = kernel.p;
            if (degree >= 1) coeffs[1] = kernel.r;
            break;
        case KernelFamily::Polynomial:
            for (std::size_t i = 0; i < kernel.coeffs.size() && i < coeffs.size(); ++i)
                coeffs[i] = kernel.coeffs[i];
            break;
        case KernelFamily::GaussianCDF: {
            coeffs[0] = 0.5;
            double r_pow = kernel.r;
            double factorial = 1.0;
            for (int l = 1; l <= degree; ++l) {
                coeffs[l] = r_pow * gaussian_density_derivative_at_zero(l - 1) / factorial;
                r_pow *= kernel.r;
                factorial *= static_cast<double>(l + 1);
            }
            break;
        }
        case KernelFamily::Logistic: {
            coeffs[0] = 0.5;
            double r_pow = kernel.r;
            double factorial = 1.0;
            for (int l = 1; l <= degree; ++l) {
                coeffs[l] = r_pow * logistic_derivative_at_zero(l) / factorial;
                r_pow *= kernel.r;
                factorial *= static_cast<double>(l + 1);
            }
            break;
        }
        case KernelFamily::HardThreshold: break;  // unreachable
    }

    TaylorKernel result;
    result.poly.family = KernelFamily::Polynomial;
    result.poly.coeffs = std::move(coeffs);
    result.range = kernel_range(result.poly);
    result.valid = result.range.min_value > 0.0 && result.range.max_value < 1.0;
    return result;
}

double l2_mu_distance(const KernelSpec& k1, const KernelSpec& k2, double d) {
    auto sq_norm = [&](int n_nodes) {
        const OverlapMeasure& m = overlap_measure(d, n_nodes);
        return m.integrate([&](double t) {
            const double diff = k1(t) - k2(t);
            return diff * diff;
        });
    };
    const double coarse = sq_norm(256);
    const double fine = sq_norm(512);
    if (std::abs(coarse - fine) > 1e-8)
        throw QuadratureError("l2_mu_distance: quadrature did not converge (discontinuous pair?)");
    return std::sqrt(std::max(fine, 0.0));
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_arg_list(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> args;
    std::string token;
    std::istringstream iss(body);
    while (std::getline(iss, token, ',')) {
        const auto eq = token.find('=');
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (eq == std::string::npos)
            args.emplace_back("", trim(token));
        else
            args.emplace_back(trim(token.substr(0, eq)), trim(token.substr(eq + 1)));
    }
    return args;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("kernel grammar: bad numeric value '" + s + "' for " + what);
    }
}

}  // namespace

KernelSpec parse_kernel(const std::string& text) {
    const auto open = text.find('(');
    const auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("kernel grammar: expected name(args), got '" + text + "'");
    const std::string name = text.substr(0, open);
    const auto args = parse_arg_list(text.substr(open + 1, close - open - 1));

    auto named = [&](const std::string& key) -> double {
        for (const auto& [k, v] : args)
            if (k == key) return to_double(v, key);
        throw std::invalid_argument("kernel grammar: " + name + " missing argument '" + key + "'");
    };

    if (name == "const") return KernelSpec::constant(named("p"));
    if (name == "linear") return KernelSpec::linear(named("p"), named("r"));
    if (name == "gausscdf") return KernelSpec::gaussian_cdf(named("r"));
    if (name == "logistic") return KernelSpec::logistic(named("r"));
    if (name == "threshold") return KernelSpec::hard_threshold(named("tau"));
    if (name == "poly") {
        std::vector<double> coeffs;
        for (const auto& [k, v] : args) {
            if (!k.empty())
                throw std::invalid_argument("kernel grammar: poly takes positional coefficients");
            coeffs.push_back(to_double(v, "poly coefficient"));
        }
        return KernelSpec::polynomial(std::move(coeffs));
    }
    throw std::invalid_argument("kernel grammar: unknown kernel '" + name + "'");
}

}  // namespace rgglab
