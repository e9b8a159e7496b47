#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rgglab/detection.hpp"
#include "rgglab/distance_kernels.hpp"
#include "rgglab/graph.hpp"
#include "rgglab/harness.hpp"
#include "rgglab/posterior.hpp"
#include "rgglab/prng.hpp"
#include "rgglab/recovery.hpp"
#include "rgglab/spectra.hpp"

namespace py = pybind11;
using namespace rgglab;

namespace {

Eigen::MatrixXd adjacency_dense(const Graph& g) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.vertex_count(), g.vertex_count());
    for (int i = 0; i < g.vertex_count(); ++i)
        for (int j = i + 1; j < g.vertex_count(); ++j)
            if (g.edge(i, j)) a(i, j) = a(j, i) = 1.0;
    return a;
}

}  // namespace

PYBIND11_MODULE(_rgglab, m) {
    m.doc() = "Random geometric graph laboratory: sampling, spectra, motif "
              "statistics and recovery.";

    py::class_<PointCloud>(m, "PointCloud")
        .def_readonly("n", &PointCloud::n)
        .def_readonly("d", &PointCloud::d)
        .def_readonly("coords", &PointCloud::coords);

    m.def("sample_sphere_points", &sample_sphere_points, py::arg("n"), py::arg("d"),
          py::arg("seed"));
    m.def("sample_gaussian_points", &sample_gaussian_points, py::arg("n"), py::arg("d"),
          py::arg("seed"));
    m.def(
        "gram_matrix",
        [](const PointCloud& cloud, bool unit_diag) {
            return gram_matrix(cloud, unit_diag ? DiagMode::Unit : DiagMode::Zero).entries;
        },
        py::arg("cloud"), py::arg("unit_diag") = false);
    m.def("sphere_overlap_moment", &sphere_overlap_moment, py::arg("d"), py::arg("k"));

    py::class_<KernelSpec>(m, "KernelSpec")
        .def("__call__", &KernelSpec::operator())
        .def("__repr__", &KernelSpec::to_string);
    m.def("parse_kernel", &parse_kernel, py::arg("text"));
    m.def("edge_density", &edge_density, py::arg("kernel"), py::arg("d"));

    py::class_<StandardizedKernel>(m, "StandardizedKernel")
        .def_readonly("p", &StandardizedKernel::p)
        .def("__call__", &StandardizedKernel::operator());
    m.def("standardize", &standardize, py::arg("kernel"), py::arg("d"));

    py::class_<KernelSpectrum>(m, "KernelSpectrum")
        .def_readonly("d", &KernelSpectrum::d)
        .def_readonly("tail_mass", &KernelSpectrum::tail_mass)
        .def_readonly("kappa_sq_norm", &KernelSpectrum::kappa_sq_norm)
        .def("rows", [](const KernelSpectrum& s) {
            std::vector<std::tuple<int, double, double, double>> rows;
            for (const auto& e : s.entries)
                rows.emplace_back(e.k, e.alpha, e.eigenvalue, e.multiplicity);
            return rows;
        });
    m.def("gegenbauer_coefficients", &gegenbauer_coefficients, py::arg("kernel"),
          py::arg("kmax") = 40);
    m.def("gegenbauer_eval", &gegenbauer_eval, py::arg("k"), py::arg("lambda_"),
          py::arg("t"));
    m.def("harmonic_dim",
          [](int d, int k) { return harmonic_dim(d, k).convert_to<double>(); },
          py::arg("d"), py::arg("k"));
    m.def(
        "trace_power",
        [](const KernelSpectrum& s, int p) { return trace_power(s, p).value; },
        py::arg("spectrum"), py::arg("m"));
    m.def(
        "trace_power_mc",
        [](const StandardizedKernel& sk, int d, int p, std::int64_t samples,
           std::uint64_t seed) {
            const McEstimate e = trace_power_mc(sk, d, p, samples, seed);
            return std::make_pair(e.mean, e.std_error);
        },
        py::arg("kernel"), py::arg("d"), py::arg("m"), py::arg("samples"),
        py::arg("seed"));

    py::class_<Graph>(m, "Graph")
        .def_property_readonly("n", &Graph::vertex_count)
        .def("edge", &Graph::edge)
        .def("edge_count", &Graph::edge_count)
        .def("dense", &adjacency_dense);
    m.def(
        "sample_rgg",
        [](const KernelSpec& kernel, const PointCloud& cloud, std::uint64_t seed) {
            return sample_rgg(kernel, cloud, seed);
        },
        py::arg("kernel"), py::arg("cloud"), py::arg("seed"));
    m.def("sample_er", &sample_er, py::arg("n"), py::arg("p"), py::arg("seed"));

    m.def(
        "signed_triangle_count",
        [](const Graph& g, double p) { return signed_triangle_count(g, p); },
        py::arg("graph"), py::arg("p"));
    m.def(
        "signed_wedge_count",
        [](const Graph& g, double p) { return signed_wedge_count(g, p); },
        py::arg("graph"), py::arg("p"));

    m.def(
        "spectral_recover",
        [](const Graph& g, double p, int d) {
            const StandardizedAdjacency abar = standardize_adjacency(g, p);
            RecoveryResult r = spectral_recover(abar, d);
            return std::make_tuple(r.estimate, r.gap_d, r.gap_d1);
        },
        py::arg("graph"), py::arg("p"), py::arg("d"),
        "Returns (estimate, gap_d, gap_d1).");
    m.def(
        "relative_mse",
        [](const Eigen::MatrixXd& estimate, const PointCloud& cloud) {
            return relative_mse(estimate, gram_matrix(cloud, DiagMode::Zero), cloud.d);
        },
        py::arg("estimate"), py::arg("cloud"));

    m.def(
        "predicted_thresholds",
        [](const KernelSpec& kernel, int n) {
            const PredictedThresholds p = predicted_thresholds(kernel, n);
            py::dict out;
            out["crossing_found"] = p.crossing_found;
            out["d_test_bisection"] = p.d_test_bisection;
            out["d_test_closed_form"] = p.d_test_closed_form;
            out["d_est_closed_form"] = p.d_est_closed_form;
            out["k0"] = p.k0;
            return out;
        },
        py::arg("kernel"), py::arg("n"));

    m.def(
        "wick_multigraph_expectation",
        [](int vertices, const std::vector<std::tuple<int, int, int>>& edges, int d) {
            Multigraph h(vertices);
            for (auto [u, v, mult] : edges) h.add_edge(u, v, mult);
            return wick_multigraph_expectation(h, d);
        },
        py::arg("vertices"), py::arg("edges"), py::arg("d"),
        "edges: list of (u, v, multiplicity)");
    m.def(
        "spherical_multigraph_expectation",
        [](int vertices, const std::vector<std::tuple<int, int, int>>& edges, int d) {
            Multigraph h(vertices);
            for (auto [u, v, mult] : edges) h.add_edge(u, v, mult);
            return spherical_multigraph_expectation(h, d);
        },
        py::arg("vertices"), py::arg("edges"), py::arg("d"));

    m.def("laplacian_subgraph_expectation",
          [](int vertices, const std::vector<std::pair<int, int>>& edges, double gamma,
             double beta, int d) {
              return laplacian_subgraph_expectation(
                  SimpleSubgraph::from_edges(vertices, edges), gamma, beta, d);
          });
    m.def("signed_subgraph_expectation",
          [](int vertices, const std::vector<std::pair<int, int>>& edges, double gamma,
             double beta, int d) {
              return signed_subgraph_expectation(
                  SimpleSubgraph::from_edges(vertices, edges), gamma, beta, d);
          });

    m.def(
        "single_edge_posterior_mean",
        [](const StandardizedKernel& sk, int a) { return single_edge_posterior_mean(sk, a); },
        py::arg("kernel"), py::arg("a"));

    m.attr("__version__") = "0.1.0";
}
