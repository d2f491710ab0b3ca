#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/oracles.hpp"
#include "wedgelab/exponents.hpp"

using namespace wedgelab;
namespace ex = wedgelab::exponents;

TEST_CASE("edge exponent residual") {
    for (double a : {0.5, 1.0, 2.0})
        for (double k : {1.5, 3.0})
            CHECK(ex::edge_exponent_residual(1.0, k, a) ==
                  Catch::Approx(std::sin(a)).margin(1e-14));
    CHECK(ex::edge_exponent_residual(0.0, 2.0, 1.0) == 0.0);
    CHECK(ex::edge_exponent_residual(0.5, 2.0, pi / 2) ==
          Catch::Approx(std::sqrt(2.0) / 2.0 - 3.0).epsilon(1e-14));
}

TEST_CASE("edge exponents for k=2, a=pi/2") {
    auto mu = ex::solve_edge_exponents(2.0, pi / 2, 2);
    // closed form for the first root: cos(mu pi / 2) = 1/6
    double mu1_exact = 2.0 / pi * std::acos(1.0 / 6.0);
    CHECK(mu[0] == Catch::Approx(mu1_exact).margin(1e-10));
    CHECK(std::abs(ex::edge_exponent_residual(mu[0], 2.0, pi / 2)) < 1e-12);
    CHECK(mu[1] > 1.0);

    // with this opening the residual vanishes identically at mu = 2;
    // that root is excluded as a possible log-resonance
    auto full = ex::solve_edge_exponents_full(2.0, pi / 2, 2);
    bool found_resonance = false;
    for (const auto& r : full.all_roots)
        if (r.log_resonance && std::abs(r.mu - 2.0) < 1e-8) found_resonance = true;
    CHECK(found_resonance);
}

TEST_CASE("edge exponents large-contrast limit") {
    auto mu = ex::solve_edge_exponents(1e8, pi / 2, 1);
    CHECK(std::abs(mu[0] - 2.0 / 3.0) < 1e-4);
}

TEST_CASE("edge exponent interval law on a grid") {
    for (double k : {1.5, 2.0, 5.0, 10.0})
        for (double a : {pi / 6, pi / 4, pi / 2, 2 * pi / 3, 5 * pi / 6}) {
            auto mu = ex::solve_edge_exponents(k, a, 2);
            CHECK(mu[0] > 0.5);
            CHECK(mu[0] < 1.0);
            CHECK(mu[1] > 1.0);
        }
}

TEST_CASE("residual sign pattern forces a root in (0,1)") {
    for (double k : {1.5, 4.0})
        for (double a : {pi / 6, pi / 2, 2.5}) {
            CHECK(ex::edge_exponent_residual(1.0, k, a) > 0.0);
            CHECK(ex::edge_exponent_residual(1e-3, k, a) < 0.0);
            auto mu = ex::solve_edge_exponents(k, a, 1);
            CHECK(mu[0] < 1.0);
        }
}

TEST_CASE("mu1 decreasing in opening (empirical)") {
    // not proven by the source material; demoted to a non-failing check
    for (double k : {1.5, 2.0, 5.0}) {
        double prev = 2.0;
        for (int i = 1; i <= 5; ++i) {
            double mu1 = ex::solve_edge_exponents(k, i * pi / 6, 1)[0];
            CHECK_NOFAIL(mu1 < prev);
            prev = mu1;
        }
    }
}

TEST_CASE("edge exponent error paths") {
    CHECK_THROWS_AS(ex::solve_edge_exponents(1.0, 1.0, 1), domain_error);
    CHECK_THROWS_AS(ex::solve_edge_exponents(0.5, 1.0, 1), domain_error);
    CHECK_THROWS_AS(ex::solve_edge_exponents(2.0, -0.1, 1), domain_error);
}

TEST_CASE("icosphere mesh sanity") {
    auto mesh = ex::icosphere(2, ex::vertex_cone::octant());
    CHECK(mesh.euler_characteristic() == 2);
    for (const auto& n : mesh.nodes) CHECK(std::abs(norm(n) - 1.0) < 1e-14);
    // tags match centroid membership
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        vec3 c = (mesh.nodes[t[0]] + mesh.nodes[t[1]] + mesh.nodes[t[2]]) / 3.0;
        bool in = c.x >= 0 && c.y >= 0 && c.z >= 0;
        CHECK(static_cast<bool>(mesh.inside_cone[i]) == in);
    }
}

TEST_CASE("spherical operator structure") {
    auto mesh = ex::icosphere(2, ex::vertex_cone::octant());
    auto op = ex::assemble_spherical_operator(mesh, 2.0);
    int n = static_cast<int>(mesh.nodes.size());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    CHECK((op.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12);
    // total area of the polyhedral sphere approaches 4 pi under refinement
    double area2 = ones.dot(op.mass * ones);
    auto op3 = ex::assemble_spherical_operator(ex::icosphere(3), 1.0);
    Eigen::VectorXd ones3 = Eigen::VectorXd::Ones(op3.mass.rows());
    double area3 = ones3.dot(op3.mass * ones3);
    CHECK(std::abs(area3 - 4 * pi) < std::abs(area2 - 4 * pi));
    CHECK(std::abs(area3 - 4 * pi) / (4 * pi) < 0.005);

    // k = 1 with a tag is the same operator as untagged
    auto op1 = ex::assemble_spherical_operator(mesh, 1.0);
    auto mesh0 = mesh;
    std::fill(mesh0.inside_cone.begin(), mesh0.inside_cone.end(), 0);
    auto op0 = ex::assemble_spherical_operator(mesh0, 7.0);
    CHECK((Eigen::MatrixXd(op1.stiffness) - Eigen::MatrixXd(op0.stiffness))
              .cwiseAbs()
              .maxCoeff() < 1e-13);
}

TEST_CASE("uniform sphere first eigenvalue approaches 2") {
    double prev_err = 1e9;
    for (int lev : {2, 3}) {
        auto mesh = ex::icosphere(lev);
        double v = ex::first_vertex_eigenvalue(mesh, 1.0);
        double err = std::abs(v - 2.0);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.02);
}

TEST_CASE("octant cone raises the eigenvalue") {
    auto mesh = ex::icosphere(3, ex::vertex_cone::octant());
    double v1 = ex::first_vertex_eigenvalue(mesh, 2.0);
    CHECK(v1 > 2.0);
    double lam = ex::vertex_exponent(v1);
    CHECK(lam > 1.0);
    CHECK(lam < 2.0);  // sqrt(2k) for k = 2
}

TEST_CASE("vertex exponent map") {
    CHECK(ex::vertex_exponent(2.0) == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(ex::vertex_exponent(0.0) == 0.0);
    for (double u : {0.5, 2.0, 7.3, 30.0}) {
        double lam = ex::vertex_exponent(u);
        CHECK(std::abs(lam * (lam + 1.0) - u) < 1e-14 * std::max(1.0, u));
    }
    CHECK_THROWS_AS(ex::vertex_exponent(-0.1), domain_error);
}

TEST_CASE("choose_s policy") {
    auto c = ex::choose_s(0.9);
    CHECK(c.s == Catch::Approx(1.7).epsilon(1e-15));
    CHECK(c.eps_reg == Catch::Approx(0.2).epsilon(1e-12));
    CHECK(c.s0 == 0.9);
    CHECK(ex::choose_s(0.6).s == Catch::Approx(1.55).epsilon(1e-15));
    auto c3 = ex::choose_s(0.501);
    CHECK(c3.s > 1.5);
    CHECK(c3.s < 1.501 + 1e-12);
    CHECK(c3.eps_reg > 0.0);
    CHECK_THROWS_AS(ex::choose_s(0.4), validation_error);
    CHECK_THROWS_AS(ex::choose_s(1.1), validation_error);
}

TEST_CASE("exponent set assembly") {
    auto mu = ex::solve_edge_exponents(2.0, pi / 2, 2);
    auto es = ex::exponent_set::make(2.0, pi / 2, mu, {1.25});
    CHECK(es.s0 == Catch::Approx(mu[0]));  // min(lambda1 + 1/2, mu1) = mu1 here
    CHECK(es.s > 1.5);
    CHECK(es.s < mu[0] + 1.0);
    CHECK(es.a_tilde == Catch::Approx(std::cos(pi / 4)));
    CHECK(es.b_tilde == Catch::Approx(std::cos(3 * pi / 8)));
    CHECK(es.lambda_range_ok);
    // mu2 here exceeds s - 1/2, so the capped value applies
    CHECK(es.mu2_tilde() == Catch::Approx(es.s - 0.5));
}
