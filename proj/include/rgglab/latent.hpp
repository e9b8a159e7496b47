#pragma once

#include <cstdint>
#include <Eigen/Core>

namespace rgglab {

enum class Geometry { SphereUniform, GaussianIsotropic };
enum class DiagMode { Zero, Unit };

/// n latent points in R^d, one per row. Immutable after construction.
struct PointCloud {
    int n = 0;
    int d = 0;
    Eigen::MatrixXd coords;  // n x d
    Geometry geometry = Geometry::SphereUniform;
};

/// Pairwise inner products with a fixed diagonal convention.
struct GramMatrix {
    int n = 0;
    Eigen::MatrixXd entries;  // n x n, symmetric
    DiagMode diag_mode = DiagMode::Zero;
};

/// Points uniform on S^{d-1}; each row is generated from its own
/// counter-based stream keyed by (seed, row), so rows are independent and
/// the result is identical regardless of generation order.
PointCloud sample_sphere_points(int n, int d, std::uint64_t seed);

/// Points i.i.d. N(0, I_d / d).
PointCloud sample_gaussian_points(int n, int d, std::uint64_t seed);

GramMatrix gram_matrix(const PointCloud& cloud, DiagMode diag_mode = DiagMode::Zero);

/// E[<x1,x2>^k] for independent uniform points on S^{d-1}.
/// Zero for odd k; (k-1)!! / (d(d+2)...(d+k-2)) for even k.
/// Evaluated in log space for large k to avoid overflow.
double sphere_overlap_moment(int d, int k);

}  // namespace rgglab
