#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rgglab/distance_kernels.hpp"
#include "rgglab/prng.hpp"

using namespace rgglab;

TEST_CASE("laplacian spectra of the named motifs") {
    const SimpleSubgraph edge = SimpleSubgraph::single_edge();
    CHECK(edge.laplacian_eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(edge.laplacian_eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));

    const SimpleSubgraph wedge = SimpleSubgraph::wedge();
    CHECK(wedge.laplacian_eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(wedge.laplacian_eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wedge.laplacian_eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-12));

    const SimpleSubgraph triangle = SimpleSubgraph::triangle();
    CHECK(triangle.laplacian_eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(triangle.laplacian_eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-12));

    // eigenvalue sum = 2|E| for a batch of motifs
    for (const SimpleSubgraph& h :
         {edge, wedge, triangle, SimpleSubgraph::cycle(4),
          SimpleSubgraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}}),
          SimpleSubgraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}})}) {
        double sum = 0.0;
        for (double ev : h.laplacian_eigenvalues) {
            CHECK(ev > -1e-12);
            sum += ev;
        }
        CHECK(sum == doctest::Approx(2.0 * h.edges.size()).epsilon(1e-12));
    }
}

TEST_CASE("laplacian subgraph expectation closed forms") {
    const double gamma = 0.5, beta = 1.0;
    for (int d : {10, 100, 10000}) {
        const double p = laplacian_subgraph_expectation(SimpleSubgraph::single_edge(),
                                                        gamma, beta, d);
        CHECK(p == doctest::Approx(gamma * std::pow(1.0 + 2.0 * beta / d, -d / 2.0))
                       .epsilon(1e-12));

        const double tri = laplacian_subgraph_expectation(SimpleSubgraph::triangle(),
                                                          gamma, beta, d);
        CHECK(tri == doctest::Approx(std::pow(gamma, 3) *
                                     std::pow(1.0 + 3.0 * beta / d, -double(d)))
                         .epsilon(1e-11));

        const double wedge = laplacian_subgraph_expectation(SimpleSubgraph::wedge(),
                                                            gamma, beta, d);
        CHECK(wedge == doctest::Approx(gamma * gamma *
                                       std::pow(1.0 + beta / d, -d / 2.0) *
                                       std::pow(1.0 + 3.0 * beta / d, -d / 2.0))
                           .epsilon(1e-11));
    }
    CHECK(distance_edge_density({0.5, 1.0}, 100) ==
          laplacian_subgraph_expectation(SimpleSubgraph::single_edge(), 0.5, 1.0, 100));
}

TEST_CASE("laplacian formula matches the gaussian-cloud oracle") {
    const double gamma = 0.5, beta = 1.0;
    const int d = 8, samples = 200000;
    const SimpleSubgraph motifs[] = {
        SimpleSubgraph::single_edge(),
        SimpleSubgraph::wedge(),
        SimpleSubgraph::triangle(),
        SimpleSubgraph::cycle(4),
        SimpleSubgraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}}),
        SimpleSubgraph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}),
    };
    Prng rng(90210);
    for (const auto& motif : motifs) {
        const DistanceKernelSpec kernel{gamma, beta};
        double sum = 0.0, sum_sq = 0.0;
        Eigen::MatrixXd pts(motif.vertex_count, d);
        const double scale = 1.0 / std::sqrt(double(d));
        for (int s = 0; s < samples; ++s) {
            for (int i = 0; i < motif.vertex_count; ++i)
                for (int c = 0; c < d; ++c) pts(i, c) = scale * rng.next_normal();
            double prod = 1.0;
            for (auto [u, v] : motif.edges)
                prod *= kernel.from_sq_distance((pts.row(u) - pts.row(v)).squaredNorm());
            sum += prod;
            sum_sq += prod * prod;
        }
        const double mean = sum / samples;
        const double se =
            std::sqrt(std::max(sum_sq / samples - mean * mean, 0.0) / samples);
        const double exact = laplacian_subgraph_expectation(motif, gamma, beta, d);
        INFO("motif |E|=", motif.edges.size(), " exact=", exact, " mc=", mean);
        CHECK(std::abs(mean - exact) < 4.0 * se + 1e-12);
    }
}

TEST_CASE("signed subgraph expectations") {
    const double gamma = 0.5, beta = 1.0;
    SUBCASE("single edge is exactly centered") {
        for (int d : {10, 1000})
            CHECK(signed_subgraph_expectation(SimpleSubgraph::single_edge(), gamma, beta,
                                              d) == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("wedge approaches p^2 beta^2 / (2d)") {
        const int d = 10000;
        const double p = distance_edge_density({gamma, beta}, d);
        const double exact =
            signed_subgraph_expectation(SimpleSubgraph::wedge(), gamma, beta, d);
        const double leading = p * p * beta * beta / (2.0 * d);
        CHECK(std::abs(exact - leading) / exact < 10.0 / d);
    }
    SUBCASE("triangle remainder is O(1/d^2) with a bounded constant") {
        double previous_scaled = -1.0;
        for (int d : {1000, 10000, 100000}) {
            const double value =
                signed_subgraph_expectation(SimpleSubgraph::triangle(), gamma, beta, d);
            const double scaled = std::abs(value) * double(d) * double(d);
            CHECK(scaled < 1.0);  // bounded across d
            if (previous_scaled > 0.0) CHECK(scaled < previous_scaled * 1.5);
            previous_scaled = scaled;
        }
    }
    SUBCASE("wedge limit 2d * value / p^2 -> beta^2") {
        double previous_ratio = -1.0;
        for (int d : {1000, 10000, 100000}) {
            const double p = distance_edge_density({gamma, beta}, d);
            const double value =
                signed_subgraph_expectation(SimpleSubgraph::wedge(), gamma, beta, d);
            const double ratio = 2.0 * d * value / (p * p);
            CHECK(ratio == doctest::Approx(beta * beta).epsilon(0.01 + 30.0 / d));
            if (previous_ratio > 0.0)
                CHECK(std::abs(ratio - beta * beta) <
                      std::abs(previous_ratio - beta * beta) * 1.01);
            previous_ratio = ratio;
        }
    }
    SUBCASE("disconnected motifs factorize") {
        // two disjoint wedges on 6 vertices
        const SimpleSubgraph two_wedges = SimpleSubgraph::from_edges(
            6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
        for (int d : {50, 500}) {
            const double joint = signed_subgraph_expectation(two_wedges, gamma, beta, d);
            const double single =
                signed_subgraph_expectation(SimpleSubgraph::wedge(), gamma, beta, d);
            CHECK(joint == doctest::Approx(single * single).epsilon(1e-12));
        }
    }
}

TEST_CASE("distance rgg sampling matches its density") {
    const DistanceKernelSpec kernel{0.5, 1.0};
    const int n = 300, d = 50;
    const double p = distance_edge_density(kernel, d);
    const PointCloud cloud = sample_gaussian_points(n, d, 21);
    const Graph g = sample_rgg(kernel, cloud, 22);
    const double pairs = n * (n - 1.0) / 2.0;
    const double density = g.edge_count() / pairs;
    CHECK(std::abs(density - p) < 4.0 * std::sqrt(p * (1.0 - p) / pairs));
}

TEST_CASE("wedge experiment: theory match and test separation") {
    // desk-scale version of the non-universality run: d sits between
    // n^{3/4} ~ 21 and n^{3/2} ~ 465
    const WedgeExperimentResult r =
        wedge_nonuniversality_experiment(0.5, 1.0, 60, 300, 200, 0.01, 2027);
    CHECK(std::abs(r.w_mean - r.w_theory) < 4.0 * r.w_se);
    CHECK(std::abs(r.w_null_mean) < 4.0 * r.w_null_se);
    CHECK(r.w_power > r.t_power);
    CHECK(static_cast<int>(r.w_values.size()) == 200);
}

TEST_CASE("distance kernel grammar") {
    const DistanceKernelSpec k = parse_distance_kernel("distance(gamma=0.5,beta=2)");
    CHECK(k.gamma == 0.5);
    CHECK(k.beta == 2.0);
    CHECK_THROWS_AS(parse_distance_kernel("distance(gamma=0.5)"), std::invalid_argument);
    CHECK_THROWS_AS(parse_distance_kernel("distance(gamma=1.5,beta=1)"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_distance_kernel("linear(p=0.3,r=0.1)"), std::invalid_argument);
}
