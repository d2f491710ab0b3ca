#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <vector>

#include "wedgelab/common.hpp"

// Planar sector transmission problem on the unit disk: an inclusion
// sector {|theta| < a/2, r < R_in} with conductivity k in a unit
// background, Dirichlet data on the outer circle, P1 Galerkin on a
// polar mesh geometrically graded toward the corner at the origin.
// Used to extract the leading singular exponent from the computed
// solution and cross-validate the transcendental root law.

namespace wedgelab::fem2d {

struct sector_problem {
    double R = 1.0;
    double R_in = 0.5;
    double a = pi / 2;
    double k = 2.0;
    int level = 1;  // 1, 2, 3, ...: halves both mesh widths per step
    std::function<double(double)> dirichlet = [](double theta) { return std::cos(theta); };
};

struct mesh2d {
    std::vector<std::array<double, 2>> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<char> in_inclusion;
    std::vector<int> boundary;        // node ids on r = R
    std::vector<int> ray_theta0;      // node ids on theta = 0, sorted by increasing r
    int center = 0;                   // node id of the origin
    double min_annulus_angle = pi;    // radians, fan elements excluded
};

namespace detail {

inline double triangle_min_angle(const std::array<double, 2>& p0,
                                 const std::array<double, 2>& p1,
                                 const std::array<double, 2>& p2) {
    auto side = [](const std::array<double, 2>& a, const std::array<double, 2>& b) {
        return std::hypot(a[0] - b[0], a[1] - b[1]);
    };
    double s0 = side(p1, p2), s1 = side(p0, p2), s2 = side(p0, p1);
    auto angle = [](double opp, double x, double y) {
        return std::acos(std::clamp((x * x + y * y - opp * opp) / (2 * x * y), -1.0, 1.0));
    };
    return std::min({angle(s0, s1, s2), angle(s1, s0, s2), angle(s2, s0, s1)});
}

}  // namespace detail

// Polar structured mesh: radius list with layer ratio 1/2 refined in equal
// log-steps, angle list containing the interface rays +-a/2 and theta = 0,
// quads split into triangles, and a center fan. The smallest ring satisfies
// r_min <= 1e-4 R.
inline mesh2d build_mesh(const sector_problem& prob) {
    if (!(prob.a > 0.0 && prob.a < pi)) throw config_error("sector opening outside (0, pi)");
    if (!(prob.level >= 1)) throw config_error("level must be >= 1");
    mesh2d m;
    const int sub = 1 << (prob.level - 1);
    const int layers = 14;  // 2^-14 ~ 6e-5 <= 1e-4
    // radii, innermost first; two log-equal sub-rings per ratio-1/2 layer
    // keep the radial extent comparable to the angular one
    const int sub_r = 2 * sub;
    std::vector<double> radii;
    for (int j = layers * sub_r; j >= 0; --j)
        radii.push_back(prob.R * std::pow(2.0, -j / static_cast<double>(sub_r)));
    // angles: interior split of [-a/2, a/2] (even count, contains 0) and
    // exterior split of [a/2, 2pi - a/2]
    int m_in = 2 * std::max(2, static_cast<int>(std::ceil(prob.a / 1.0))) * sub;
    int m_out = std::max(3, static_cast<int>(std::ceil((2 * pi - prob.a) / 0.5))) * sub;
    std::vector<double> angles;
    for (int i = 0; i <= m_in; ++i) angles.push_back(-prob.a / 2 + prob.a * i / m_in);
    for (int i = 1; i < m_out; ++i)
        angles.push_back(prob.a / 2 + (2 * pi - prob.a) * i / m_out);
    const int na = static_cast<int>(angles.size());

    m.center = 0;
    m.nodes.push_back({0.0, 0.0});
    auto node_id = [&](int ir, int ia) { return 1 + ir * na + (ia % na); };
    for (std::size_t ir = 0; ir < radii.size(); ++ir)
        for (int ia = 0; ia < na; ++ia)
            m.nodes.push_back(
                {radii[ir] * std::cos(angles[ia]), radii[ir] * std::sin(angles[ia])});

    auto add_triangle = [&](int i, int j, int l, bool fan) {
        double cx = (m.nodes[i][0] + m.nodes[j][0] + m.nodes[l][0]) / 3.0;
        double cy = (m.nodes[i][1] + m.nodes[j][1] + m.nodes[l][1]) / 3.0;
        double cr = std::hypot(cx, cy);
        double ct = std::atan2(cy, cx);
        m.triangles.push_back({i, j, l});
        m.in_inclusion.push_back(cr < prob.R_in && std::abs(ct) < prob.a / 2 ? 1 : 0);
        if (!fan)
            m.min_annulus_angle = std::min(
                m.min_annulus_angle,
                detail::triangle_min_angle(m.nodes[i], m.nodes[j], m.nodes[l]));
    };

    for (int ia = 0; ia < na; ++ia) add_triangle(0, node_id(0, ia), node_id(0, ia + 1), true);
    for (std::size_t ir = 0; ir + 1 < radii.size(); ++ir)
        for (int ia = 0; ia < na; ++ia) {
            int n00 = node_id(static_cast<int>(ir), ia), n01 = node_id(static_cast<int>(ir), ia + 1);
            int n10 = node_id(static_cast<int>(ir) + 1, ia), n11 = node_id(static_cast<int>(ir) + 1, ia + 1);
            add_triangle(n00, n10, n11, false);
            add_triangle(n00, n11, n01, false);
        }

    if (m.min_annulus_angle < 20.0 * pi / 180.0)
        throw geometry_error("mesh angle bound violated on annulus elements");

    int last_ring = static_cast<int>(radii.size()) - 1;
    for (int ia = 0; ia < na; ++ia) m.boundary.push_back(node_id(last_ring, ia));
    // theta = 0 ray: angle index of 0 is m_in / 2
    m.ray_theta0.push_back(m.center);
    for (std::size_t ir = 0; ir < radii.size(); ++ir)
        m.ray_theta0.push_back(node_id(static_cast<int>(ir), m_in / 2));
    return m;
}

struct solution2d {
    sector_problem problem;
    mesh2d mesh;
    Eigen::VectorXd u;
    Eigen::SparseMatrix<double> stiffness;  // full matrix, kept for flux checks
    double solve_residual = 0.0;
};

inline solution2d solve(const sector_problem& prob) {
    solution2d sol;
    sol.problem = prob;
    sol.mesh = build_mesh(prob);
    const auto& m = sol.mesh;
    int n = static_cast<int>(m.nodes.size());

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(m.triangles.size() * 9);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        double x0 = m.nodes[tr[0]][0], y0 = m.nodes[tr[0]][1];
        double x1 = m.nodes[tr[1]][0], y1 = m.nodes[tr[1]][1];
        double x2 = m.nodes[tr[2]][0], y2 = m.nodes[tr[2]][1];
        double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
        double area = 0.5 * std::abs(det);
        if (area < 1e-30) throw geometry_error("degenerate mesh triangle");
        double b[3] = {y1 - y2, y2 - y0, y0 - y1};
        double c[3] = {x2 - x1, x0 - x2, x1 - x0};
        double coeff = m.in_inclusion[t] ? prob.k : 1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(tr[i], tr[j],
                                   coeff * (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
    }
    sol.stiffness.resize(n, n);
    sol.stiffness.setFromTriplets(trips.begin(), trips.end());

    std::vector<char> is_bdry(n, 0);
    for (int b : m.boundary) is_bdry[b] = 1;
    std::vector<int> free_of(n, -1);
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i)
        if (!is_bdry[i]) {
            free_of[i] = static_cast<int>(free_nodes.size());
            free_nodes.push_back(i);
        }
    if (free_nodes.empty()) throw numeric_error("solve: no interior unknowns");

    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int b : m.boundary) g(b) = prob.dirichlet(std::atan2(m.nodes[b][1], m.nodes[b][0]));

    int nf = static_cast<int>(free_nodes.size());
    std::vector<Eigen::Triplet<double>> tf;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (int outer = 0; outer < sol.stiffness.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sol.stiffness, outer); it; ++it) {
            int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
            if (free_of[i] < 0) continue;
            if (free_of[j] >= 0)
                tf.emplace_back(free_of[i], free_of[j], it.value());
            else
                rhs(free_of[i]) -= it.value() * g(j);
        }
    Eigen::SparseMatrix<double> aff(nf, nf);
    aff.setFromTriplets(tf.begin(), tf.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(aff);
    if (ldlt.info() != Eigen::Success) throw numeric_error("solve: factorization failed");
    Eigen::VectorXd uf = ldlt.solve(rhs);
    sol.solve_residual = (aff * uf - rhs).norm() / std::max(1e-300, rhs.norm());
    if (sol.solve_residual > 1e-12)
        throw numeric_error("solve: linear system residual above 1e-12");

    sol.u = g;
    for (int i = 0; i < nf; ++i) sol.u(free_nodes[i]) = uf(i);
    return sol;
}

inline double energy(const solution2d& sol) { return sol.u.dot(sol.stiffness * sol.u); }

// total conormal flux through the outer circle: sum of Dirichlet-node
// residuals of the full stiffness relation; zero for a conservative solve
inline double boundary_flux_imbalance(const solution2d& sol) {
    Eigen::VectorXd res = sol.stiffness * sol.u;
    double total = 0.0, absolute = 0.0;
    for (int b : sol.mesh.boundary) {
        total += res(b);
        absolute += std::abs(res(b));
    }
    return std::abs(total) / std::max(absolute, 1e-300);
}

// discrete maximum principle check; P1 needs angle conditions, so failure
// is reported, not thrown
inline bool max_principle_holds(const solution2d& sol) {
    double lo = 1e300, hi = -1e300;
    for (int b : sol.mesh.boundary) {
        lo = std::min(lo, sol.u(b));
        hi = std::max(hi, sol.u(b));
    }
    double tol = 1e-12 * (std::abs(lo) + std::abs(hi) + 1.0);
    return sol.u.minCoeff() >= lo - tol && sol.u.maxCoeff() <= hi + tol;
}

struct exponent_fit {
    double mu_ls = 0.0;        // least-squares slope of ln|u - u(0)| vs ln r
    double mu_quotient = 0.0;  // mean log2 quotient over (r, r/2) pairs
    double u0 = 0.0;           // corner value
    int points = 0;
};

// fits the leading exponent on the theta = 0 ray within [r_lo, r_hi]
inline exponent_fit extract_exponent(const solution2d& sol, double r_lo, double r_hi) {
    exponent_fit fit;
    fit.u0 = sol.u(sol.mesh.center);
    std::vector<double> lr, lv, rs, vs;
    for (int id : sol.mesh.ray_theta0) {
        double r = std::hypot(sol.mesh.nodes[id][0], sol.mesh.nodes[id][1]);
        if (r < r_lo || r > r_hi) continue;
        double dv = std::abs(sol.u(id) - fit.u0);
        if (dv < 1e-13) continue;
        rs.push_back(r);
        vs.push_back(dv);
        lr.push_back(std::log(r));
        lv.push_back(std::log(dv));
    }
    fit.points = static_cast<int>(lr.size());
    if (fit.points < 4)
        throw validation_error("extract_exponent: degenerate data in the fit window");
    double n = fit.points, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < fit.points; ++i) {
        sx += lr[i];
        sy += lv[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * lv[i];
    }
    fit.mu_ls = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    // quotient estimator over (r, r/2) pairs present in the data
    int pairs = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < rs.size(); ++j)
            if (std::abs(rs[j] / rs[i] - 0.5) < 1e-9) {
                acc += std::log2(vs[i] / vs[j]);
                ++pairs;
            }
    fit.mu_quotient = pairs ? acc / pairs : fit.mu_ls;
    return fit;
}

// ASCII mesh dump: "n x y" per node, "t i j k tag" per triangle
inline void write_mesh(std::ostream& out, const mesh2d& m) {
    char buf[96];
    for (const auto& n : m.nodes) {
        std::snprintf(buf, sizeof(buf), "n %.17g %.17g\n", n[0], n[1]);
        out << buf;
    }
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        out << "t " << tr[0] << " " << tr[1] << " " << tr[2] << " "
            << static_cast<int>(m.in_inclusion[t]) << "\n";
    }
}

// solution as CSV rows (x, y, u)
inline void write_solution_csv(std::ostream& out, const solution2d& sol) {
    out << "x,y,u\n";
    char buf[128];
    for (std::size_t i = 0; i < sol.mesh.nodes.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", sol.mesh.nodes[i][0],
                      sol.mesh.nodes[i][1], sol.u(static_cast<int>(i)));
        out << buf;
    }
}

// Aitken extrapolation of the exponent across three mesh levels
inline double richardson_exponent(const sector_problem& base, double r_lo, double r_hi,
                                  std::array<int, 3> levels = {1, 2, 3}) {
    double mu[3];
    for (int i = 0; i < 3; ++i) {
        sector_problem p = base;
        p.level = levels[i];
        mu[i] = extract_exponent(solve(p), r_lo, r_hi).mu_ls;
    }
    double d1 = mu[1] - mu[0], d2 = mu[2] - mu[1];
    if (std::abs(d2 - d1) < 1e-14) return mu[2];
    return mu[2] + d2 * d2 / (d1 - d2);
}

}  // namespace wedgelab::fem2d
