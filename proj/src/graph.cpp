#include "rgglab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rgglab/prng.hpp"

namespace rgglab {

Graph::Graph(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Graph: need n >= 1");
    if (n > kMaxVertices)
        throw std::invalid_argument("Graph: n exceeds the dense cap of 2^14");
    words_ = (n + 63) / 64;
    rows_.assign(static_cast<std::size_t>(n) * words_, 0ULL);
}

void Graph::set_edge(int i, int j) {
    if (i == j) throw std::invalid_argument("Graph: no self-loops");
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::invalid_argument("Graph: vertex out of range");
    rows_[static_cast<std::size_t>(i) * words_ + (j >> 6)] |= 1ULL << (j & 63);
    rows_[static_cast<std::size_t>(j) * words_ + (i >> 6)] |= 1ULL << (i & 63);
}

int Graph::degree(int i) const {
    int deg = 0;
    const std::uint64_t* r = row(i);
    for (int w = 0; w < words_; ++w) deg += __builtin_popcountll(r[w]);
    return deg;
}

std::int64_t Graph::edge_count() const {
    std::int64_t total = 0;
    for (int i = 0; i < n_; ++i) total += degree(i);
    return total / 2;
}

Graph sample_rgg(const KernelSpec& kernel, const PointCloud& cloud, std::uint64_t seed) {
    Graph g(cloud.n);
    g.provenance = GraphProvenance::RGG;
    g.kernel_id = kernel.to_string();
    const bool gaussian_cloud = cloud.geometry == Geometry::GaussianIsotropic;

    const int n = cloud.n;
    const int block = 256;
    Eigen::MatrixXd overlaps;
    for (int i0 = 0; i0 < n; i0 += block) {
        const int rows = std::min(block, n - i0);
        overlaps.noalias() = cloud.coords.middleRows(i0, rows) * cloud.coords.transpose();
        for (int bi = 0; bi < rows; ++bi) {
            const int i = i0 + bi;
            for (int j = i + 1; j < n; ++j) {
                const double t = overlaps(bi, j);
                double prob;
                if (kernel.family == KernelFamily::Linear) {
                    const double raw = kernel.p + kernel.r * t;
                    prob = std::clamp(raw, 0.0, 1.0);
                    if (raw != prob) ++g.clamp_count;
                } else {
                    prob = kernel(t);
                    if (prob < 0.0 || prob > 1.0) {
                        std::ostringstream oss;
                        oss << "sample_rgg: kernel " << kernel.to_string()
                            << " evaluated to " << prob << " at overlap " << t
                            << (gaussian_cloud ? " (Gaussian cloud outside [-1,1])" : "");
                        throw std::invalid_argument(oss.str());
                    }
                }
                if (edge_uniform(seed, static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)) < prob)
                    g.set_edge(i, j);
            }
        }
    }
    return g;
}

Graph sample_er(int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("sample_er: p outside [0,1]");
    Graph g(n);
    g.provenance = GraphProvenance::ER;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (edge_uniform(seed, static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j)) < p)
                g.set_edge(i, j);
    return g;
}

StandardizedAdjacency standardize_adjacency(const Graph& g, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("standardize_adjacency: p must be strictly inside (0,1)");
    StandardizedAdjacency abar;
    abar.n = g.vertex_count();
    abar.p = p;
    const double scale = std::sqrt(p * (1.0 - p));
    const double hi = (1.0 - p) / scale;
    const double lo = -p / scale;
    abar.entries.setConstant(abar.n, abar.n, lo);
    for (int i = 0; i < abar.n; ++i) {
        for (int j = i + 1; j < abar.n; ++j)
            if (g.edge(i, j)) {
                abar.entries(i, j) = hi;
                abar.entries(j, i) = hi;
            }
        abar.entries(i, i) = 0.0;
    }
    return abar;
}

void write_edge_list(const Graph& g, std::ostream& os) {
    os << g.vertex_count() << "\n";
    for (int i = 0; i < g.vertex_count(); ++i)
        for (int j = i + 1; j < g.vertex_count(); ++j)
            if (g.edge(i, j)) os << i << " " << j << "\n";
}

Graph read_edge_list(std::istream& is) {
    int n = 0;
    if (!(is >> n)) throw std::runtime_error("read_edge_list: missing vertex count header");
    Graph g(n);
    int i, j;
    while (is >> i >> j) g.set_edge(i, j);
    return g;
}

namespace {
constexpr char kPackedMagic[8] = {'R', 'G', 'G', 'B', 'I', 'T', '0', '1'};
}

void write_packed(const Graph& g, std::ostream& os) {
    os.write(kPackedMagic, sizeof(kPackedMagic));
    const std::int64_t n = g.vertex_count();
    os.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (int i = 0; i < g.vertex_count(); ++i)
        os.write(reinterpret_cast<const char*>(g.row(i)),
                 static_cast<std::streamsize>(g.words_per_row()) * 8);
}

Graph read_packed(std::istream& is) {
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kPackedMagic, sizeof(magic)) != 0)
        throw std::runtime_error("read_packed: bad magic");
    std::int64_t n = 0;
    is.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (!is || n < 1 || n > Graph::kMaxVertices)
        throw std::runtime_error("read_packed: bad vertex count");
    Graph g(static_cast<int>(n));
    std::vector<std::uint64_t> row(static_cast<std::size_t>(g.words_per_row()));
    for (int i = 0; i < g.vertex_count(); ++i) {
        is.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(g.words_per_row()) * 8);
        if (!is) throw std::runtime_error("read_packed: truncated payload");
        for (int j = i + 1; j < g.vertex_count(); ++j)
            if ((row[j >> 6] >> (j & 63)) & 1ULL) g.set_edge(i, j);
    }
    return g;
}

}  // namespace rgglab
