#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support/oracles.hpp"
#include "wedgelab/cgo.hpp"

using namespace wedgelab;
namespace g = wedgelab::geometry;

static g::edge_frame canonical_frame(double a, double rho) {
    return g::edge_frame::make({0, 0, 0}, {0, 0, 1}, {1, 0, 0}, a, rho);
}

TEST_CASE("cgo field basics") {
    auto fr = canonical_frame(pi / 2, 0.2);
    auto f = cgo::cgo_field::make(10.0, fr);

    CHECK(std::abs(f.eval(fr.origin) - complexd(1.0)) < 1e-15);

    // zeta . zeta = 0 (isotropy)
    CHECK(std::abs(dot(f.zeta, f.zeta)) <= 1e-14 * f.tau * f.tau);

    // |u0| = exp(-tau r cos theta)
    for (double r : {0.05, 0.3})
        for (double th : {-2.0, 0.0, 0.7, 3.0}) {
            vec3 x = fr.to_global(r, th, 0.1);
            CHECK(std::abs(f.eval(x)) ==
                  Catch::Approx(std::exp(-10.0 * r * std::cos(th))).epsilon(1e-13));
        }

    // |grad u0| = sqrt(2) tau |u0|
    for (double r : {0.05, 0.3}) {
        vec3 x = fr.to_global(r, 0.4, 0.0);
        CHECK(cnorm(f.gradient(x)) ==
              Catch::Approx(std::sqrt(2.0) * f.tau * std::abs(f.eval(x))).epsilon(1e-12));
    }
}

TEST_CASE("cgo gradient matches finite differences") {
    auto fr = canonical_frame(pi / 2, 0.2);
    auto f = cgo::cgo_field::make(10.0, fr);
    vec3 x = fr.to_global(0.3, 0.5, 0.1);
    double h = 1e-6;
    auto grad = f.gradient(x);
    complexd fdx = (f.eval({x.x + h, x.y, x.z}) - f.eval({x.x - h, x.y, x.z})) / (2 * h);
    complexd fdy = (f.eval({x.x, x.y + h, x.z}) - f.eval({x.x, x.y - h, x.z})) / (2 * h);
    complexd fdz = (f.eval({x.x, x.y, x.z + h}) - f.eval({x.x, x.y, x.z - h})) / (2 * h);
    double scale = cnorm(grad);
    CHECK(std::abs(grad.x - fdx) < 1e-7 * scale);
    CHECK(std::abs(grad.y - fdy) < 1e-7 * scale);
    CHECK(std::abs(grad.z - fdz) < 1e-7 * scale);
}

TEST_CASE("cgo harmonicity via finite-difference laplacian") {
    auto fr = canonical_frame(2 * pi / 3, 0.2);
    auto f = cgo::cgo_field::make(5.0, fr);
    for (auto [r, th] : {std::pair{0.2, 0.3}, {0.4, -1.2}, {0.1, 2.0}}) {
        vec3 x = fr.to_global(r, th, 0.05);
        double h = 1e-4;
        auto lap_re = oracle::fd_laplacian(
            [&](double px, double py, double pz) { return f.eval({px, py, pz}).real(); },
            x.x, x.y, x.z, h);
        CHECK(std::abs(lap_re) < 1e-6 * f.tau * f.tau * std::abs(f.eval(x)));
    }
}

TEST_CASE("overflow guard") {
    auto fr = canonical_frame(pi / 2, 0.2);
    auto f = cgo::cgo_field::make(1000.0, fr);
    CHECK_THROWS_AS(f.eval(fr.to_global(1.0, pi, 0.0)), numeric_error);
}

TEST_CASE("wedge bounds") {
    double a = pi / 2, h = 0.1, tau = 100.0;
    auto fr = canonical_frame(a, 0.2);
    auto w = g::wedge_geometry::build(fr, h, h, tau, 0.5);
    auto f = cgo::cgo_field::make(tau, fr);

    auto rep = cgo::wedge_bounds(f, w, 100000);
    CHECK(rep.sup_omega <= std::exp(1.0) * (1 + 1e-12));
    CHECK(rep.pointwise_ok);
    // the paper's interior decay bound, attained on the r = h face
    CHECK(rep.sup_d_face <= std::exp(-tau * std::cos(a / 2) * h) * (1 + 1e-12));
    CHECK(rep.sup_d_face > 0.5 * std::exp(-tau * std::cos(a / 2) * h));
    // the sup over the full D~ cloud tends to 1 near the edge axis
    CHECK(rep.sup_d <= 1.0 + 1e-12);
    CHECK(rep.sup_d > 0.5);
}

TEST_CASE("tau -> 0 limit of the field") {
    auto fr = canonical_frame(pi / 2, 0.2);
    auto w = g::wedge_geometry::build(fr, 0.1, 0.1, 100.0, 0.5);
    auto weak = cgo::cgo_field::make(1e-8, fr);
    auto rep = cgo::wedge_bounds(weak, w, 20000, false);
    CHECK(std::abs(rep.sup_omega - 1.0) < 1e-6);
    CHECK(std::abs(rep.sup_d - 1.0) < 1e-6);
}

TEST_CASE("S^i bound holds for tau >= tau0") {
    double a = pi / 2, h = 0.1;
    auto fr = canonical_frame(a, 0.2);
    for (double factor : {1.0, 2.0, 4.0}) {
        double tau = factor * g::wedge_geometry::tau0_for(a, h);
        auto w = g::wedge_geometry::build(fr, h, h, tau, 0.5);
        auto f = cgo::cgo_field::make(tau, fr);
        double margin = 0.0;
        CHECK(cgo::si_bound_holds(f, w, &margin));
        CHECK(margin <= 1.0 + 1e-12);
    }
}

TEST_CASE("frame mismatch rejected") {
    auto fr = canonical_frame(pi / 2, 0.2);
    auto fr2 = canonical_frame(pi / 2, 0.25);
    auto w = g::wedge_geometry::build(fr, 0.1, 0.1, 100.0, 0.5);
    auto f = cgo::cgo_field::make(100.0, fr2);
    CHECK_THROWS_AS(cgo::wedge_bounds(f, w, 100), validation_error);
}
