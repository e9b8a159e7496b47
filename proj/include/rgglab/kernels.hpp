#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <Eigen/Core>

namespace rgglab {

/// Signals that doubling the quadrature node count moved the result by more
/// than the admissible tolerance (typically a discontinuous integrand).
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature for the overlap law mu_d of <x1,x2> on S^{d-1}, with density
/// proportional to (1-t^2)^{(d-3)/2} on [-1,1]. Gauss-Jacobi nodes via
/// Golub-Welsch; d=1 is the two-point measure on {-1,+1} and d=2 uses
/// Gauss-Chebyshev closed forms. Real-valued d > 2 is admitted (used by the
/// threshold solver, which treats dimension as a continuous parameter).
struct OverlapMeasure {
    double d = 0;
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;  // sum to 1

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0, comp = 0.0;  // Kahan
        for (Eigen::Index i = 0; i < nodes.size(); ++i) {
            const double term = weights[i] * f(nodes[i]) - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        return sum;
    }
};

OverlapMeasure overlap_measure(double d, int n_nodes);

enum class KernelFamily { Constant, Linear, Polynomial, GaussianCDF, Logistic, HardThreshold };

/// Connection-probability kernel K : [-1,1] -> [0,1].
/// GaussianCDF and Logistic are scaled families K(t) = F(r t) defined on all
/// of R; Linear extends linearly but clamps the probability to [0,1] when
/// evaluated outside [-1,1] (Gaussian latent points can land there).
struct KernelSpec {
    KernelFamily family = KernelFamily::Constant;
    double p = 0.5;    // Constant / Linear base density
    double r = 0.0;    // Linear slope or CDF scale
    double tau = 0.0;  // HardThreshold cut
    std::vector<double> coeffs;  // Polynomial a_0..a_L

    static KernelSpec constant(double p);
    static KernelSpec linear(double p, double r, bool override_range = false);
    static KernelSpec polynomial(std::vector<double> coeffs);
    static KernelSpec gaussian_cdf(double r);
    static KernelSpec logistic(double r);
    static KernelSpec hard_threshold(double tau);

    double operator()(double t) const;

    /// Taylor coefficients about 0 exist in closed form.
    bool smooth() const {
        return family != KernelFamily::HardThreshold;
    }
    int polynomial_degree() const;  // -1 if not polynomial-like

    std::string to_string() const;
};

/// Observed range of K on a dense Chebyshev grid over [-1,1].
struct KernelRange {
    double min_value = 0;
    double max_value = 0;
    /// strictly inside (margin, 1-margin) with margin 1e-6
    bool bounded_away = false;
};
KernelRange kernel_range(const KernelSpec& kernel);

/// p = E[K(<x1,x2>)] under mu_d. Closed forms for Constant/Linear and the
/// regularized incomplete beta for HardThreshold; Gauss-Jacobi otherwise,
/// with a node-doubling convergence check.
double edge_density(const KernelSpec& kernel, double d);

/// kappa(t) = (K(t) - p) / sqrt(p(1-p)), centered under mu_d.
struct StandardizedKernel {
    KernelSpec base;
    double d = 0;
    double p = 0;
    double scale = 0;  // sqrt(p(1-p))

    double operator()(double t) const { return (base(t) - p) / scale; }
};

StandardizedKernel standardize(const KernelSpec& kernel, double d);

/// Degree-L Taylor polynomial of a smooth kernel about 0, together with the
/// probability-kernel validity report (never clamped).
struct TaylorKernel {
    KernelSpec poly;
    bool valid = false;  // values in (0,1) on the grid
    KernelRange range;
};
TaylorKernel taylor_kernel(const KernelSpec& kernel, int degree);

/// || K1 - K2 ||_{L2(mu_d)}.
double l2_mu_distance(const KernelSpec& k1, const KernelSpec& k2, double d);

/// Parses the config mini-grammar:
///   const(p=0.4) | linear(p=0.3,r=0.05) | gausscdf(r=1) | logistic(r=2)
///   | threshold(tau=0) | poly(a0,a1,...)
KernelSpec parse_kernel(const std::string& text);

}  // namespace rgglab
