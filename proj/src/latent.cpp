#include "rgglab/latent.hpp"

#include <cmath>
#include <stdexcept>

#include "rgglab/prng.hpp"

namespace rgglab {

namespace {

constexpr std::uint64_t kSphereTag = 0x5048455245ULL;    // "SPHERE"-ish
constexpr std::uint64_t kGaussTag = 0x4741555353ULL;     // "GAUSS"-ish

void fill_gaussian_row(Eigen::MatrixXd& m, int row, std::uint64_t stream_seed) {
    Prng rng(stream_seed);
    for (int c = 0; c < m.cols(); ++c) m(row, c) = rng.next_normal();
}

}  // namespace

PointCloud sample_sphere_points(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("sample_sphere_points: need n >= 1 and d >= 1");
    PointCloud cloud;
    cloud.n = n;
    cloud.d = d;
    cloud.geometry = Geometry::SphereUniform;
    cloud.coords.resize(n, d);
    const std::uint64_t base = hash_combine(seed, kSphereTag);
    for (int i = 0; i < n; ++i) {
        std::uint64_t stream = hash_combine(base, static_cast<std::uint64_t>(i));
        for (;;) {
            fill_gaussian_row(cloud.coords, i, stream);
            const double norm = cloud.coords.row(i).norm();
            if (norm > 1e-100) {
                cloud.coords.row(i) /= norm;
                break;
            }
            // all-zero draw (probability 0 in exact arithmetic): redraw the row
            stream = hash_combine(stream, 0xDEADULL);
        }
    }
    return cloud;
}

PointCloud sample_gaussian_points(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("sample_gaussian_points: need n >= 1 and d >= 1");
    PointCloud cloud;
    cloud.n = n;
    cloud.d = d;
    cloud.geometry = Geometry::GaussianIsotropic;
    cloud.coords.resize(n, d);
    const std::uint64_t base = hash_combine(seed, kGaussTag);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < n; ++i) {
        fill_gaussian_row(cloud.coords, i, hash_combine(base, static_cast<std::uint64_t>(i)));
        cloud.coords.row(i) *= scale;
    }
    return cloud;
}

GramMatrix gram_matrix(const PointCloud& cloud, DiagMode diag_mode) {
    GramMatrix g;
    g.n = cloud.n;
    g.diag_mode = diag_mode;
    g.entries.noalias() = cloud.coords * cloud.coords.transpose();
    g.entries = 0.5 * (g.entries + g.entries.transpose()).eval();
    g.entries.diagonal().setConstant(diag_mode == DiagMode::Zero ? 0.0 : 1.0);
    return g;
}

double sphere_overlap_moment(int d, int k) {
    if (d < 1 || k < 0) throw std::invalid_argument("sphere_overlap_moment: need d >= 1 and k >= 0");
    if (k % 2 == 1) return 0.0;
    if (k == 0) return 1.0;
    const int half = k / 2;
    if (k <= 60) {
        double value = 1.0;
        for (int j = 0; j < half; ++j)
            value *= static_cast<double>(2 * j + 1) / static_cast<double>(d + 2 * j);
        return value;
    }
    double log_value = 0.0;
    for (int j = 0; j < half; ++j)
        log_value += std::log(static_cast<double>(2 * j + 1)) - std::log(static_cast<double>(d + 2 * j));
    return std::exp(log_value);
}

}  // namespace rgglab
