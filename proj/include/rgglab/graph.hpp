#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rgglab/kernels.hpp"
#include "rgglab/latent.hpp"

namespace rgglab {

enum class GraphProvenance { RGG, ER };

/// Simple undirected graph as a dense bit matrix (zero diagonal). Capped at
/// n = 2^14; larger inputs are refused rather than silently re-structured.
class Graph {
public:
    static constexpr int kMaxVertices = 1 << 14;

    explicit Graph(int n);

    int vertex_count() const { return n_; }
    bool edge(int i, int j) const {
        return (rows_[static_cast<std::size_t>(i) * words_ + (j >> 6)] >>
                (j & 63)) & 1ULL;
    }
    void set_edge(int i, int j);
    int degree(int i) const;
    std::int64_t edge_count() const;

    int words_per_row() const { return words_; }
    const std::uint64_t* row(int i) const {
        return rows_.data() + static_cast<std::size_t>(i) * words_;
    }

    GraphProvenance provenance = GraphProvenance::ER;
    std::string kernel_id;
    std::int64_t clamp_count = 0;  // Linear-kernel probability clamps seen while sampling

private:
    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> rows_;
};

/// RGG over an inner-product kernel: edges Bernoulli(K(<x_i,x_j>)) with
/// per-edge randomness keyed by (seed, i, j), so any vertex-subset subgraph
/// reproduces exactly.
Graph sample_rgg(const KernelSpec& kernel, const PointCloud& cloud, std::uint64_t seed);

Graph sample_er(int n, double p, std::uint64_t seed);

/// Abar_ij = (A_ij - p)/sqrt(p(1-p)) off the diagonal, zero on it.
struct StandardizedAdjacency {
    int n = 0;
    double p = 0;
    Eigen::MatrixXd entries;
};

StandardizedAdjacency standardize_adjacency(const Graph& g, double p);

/// Text edge list: a header line with n, then one "i j" pair per line.
void write_edge_list(const Graph& g, std::ostream& os);
Graph read_edge_list(std::istream& is);

/// Bit-packed binary matrix (exact round trip).
void write_packed(const Graph& g, std::ostream& os);
Graph read_packed(std::istream& is);

}  // namespace rgglab
