#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "wedgelab/common.hpp"

// Edge singular exponents (roots of a transcendental equation) and vertex
// singular exponents (eigenvalues of a piecewise-coefficient
// Laplace-Beltrami operator on the unit sphere), plus the regularity
// parameters s0 and s derived from them.

namespace wedgelab::exponents {

// sin(mu (pi - a)) - ((k+1)/(k-1)) sin(mu pi)
inline double edge_exponent_residual(double mu, double k, double a) {
    return std::sin(mu * (pi - a)) - ((k + 1.0) / (k - 1.0)) * std::sin(mu * pi);
}

struct edge_root {
    double mu = 0.0;
    bool log_resonance = false;  // within 1e-8 of an integer
};

struct edge_exponent_result {
    std::vector<edge_root> all_roots;  // every bracketed root, in order
    std::vector<double> mu;            // non-resonant roots, the usable list
};

// First `count` positive non-resonant roots; scan step 1e-4 on
// (0, count+2), bisection to |residual| < 1e-12.
inline edge_exponent_result solve_edge_exponents_full(double k, double a, int count) {
    if (!(k > 1.0)) throw domain_error("solve_edge_exponents: contrast k must exceed 1");
    if (!(a > 0.0 && a < pi)) throw domain_error("solve_edge_exponents: opening outside (0,pi)");
    if (count < 1) throw domain_error("solve_edge_exponents: count must be >= 1");

    edge_exponent_result res;
    const double step = 1e-4;
    const double hi = count + 2.0;
    double x0 = step;
    double f0 = edge_exponent_residual(x0, k, a);
    for (double x1 = 2 * step; x1 <= hi && static_cast<int>(res.mu.size()) < count;
         x1 += step) {
        double f1 = edge_exponent_residual(x1, k, a);
        if ((f0 < 0.0) != (f1 < 0.0)) {
            double lo = x0, up = x1, flo = f0;
            for (int it = 0; it < 200; ++it) {
                double mid = 0.5 * (lo + up);
                double fm = edge_exponent_residual(mid, k, a);
                if (std::abs(fm) < 1e-12 && (up - lo) < 1e-10) break;
                if ((flo < 0.0) != (fm < 0.0)) {
                    up = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            edge_root root;
            root.mu = 0.5 * (lo + up);
            // Newton polish to machine precision
            for (int it = 0; it < 6; ++it) {
                double f = edge_exponent_residual(root.mu, k, a);
                double df = (pi - a) * std::cos(root.mu * (pi - a)) -
                            ((k + 1.0) / (k - 1.0)) * pi * std::cos(root.mu * pi);
                if (df == 0.0) break;
                double next = root.mu - f / df;
                if (!(next > x0 && next < x1)) break;
                root.mu = next;
            }
            root.log_resonance = std::abs(root.mu - std::round(root.mu)) < 1e-8;
            res.all_roots.push_back(root);
            if (!root.log_resonance) res.mu.push_back(root.mu);
        }
        x0 = x1;
        f0 = f1;
    }
    if (static_cast<int>(res.mu.size()) < count)
        throw numeric_error("solve_edge_exponents: failed to bracket enough roots in (0, count+2)");
    if (!(res.mu[0] > 0.5 && res.mu[0] < 1.0))
        throw numeric_error("solve_edge_exponents: mu1 outside (1/2, 1)");
    return res;
}

inline std::vector<double> solve_edge_exponents(double k, double a, int count) {
    return solve_edge_exponents_full(k, a, count).mu;
}

// ---------------------------------------------------------------------------
// Spherical eigenproblem
// ---------------------------------------------------------------------------

// A cone at a vertex: intersection of half-spaces n_i . x >= 0 through the
// origin. An empty normal list means the whole sphere is tagged off.
struct vertex_cone {
    std::vector<vec3> normals;

    bool contains(const vec3& p) const {
        for (const auto& n : normals)
            if (dot(n, p) < 0.0) return false;
        return !normals.empty();
    }

    static vertex_cone octant() { return {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }
    static vertex_cone quarter_sphere() { return {{{1, 0, 0}, {0, 1, 0}}}; }
};

struct triangulated_sphere {
    std::vector<vec3> nodes;                    // unit vectors
    std::vector<std::array<int, 3>> triangles;  // CCW from outside
    std::vector<char> inside_cone;              // per-triangle tag

    int euler_characteristic() const {
        std::map<std::pair<int, int>, int> edges;
        for (const auto& t : triangles)
            for (int i = 0; i < 3; ++i) {
                int a = t[i], b = t[(i + 1) % 3];
                edges[{std::min(a, b), std::max(a, b)}]++;
            }
        for (const auto& [e, c] : edges)
            if (c != 2) return -9999;  // not a closed surface
        return static_cast<int>(nodes.size()) - static_cast<int>(edges.size()) +
               static_cast<int>(triangles.size());
    }
};

// Icosahedral refinement with vertices projected to the sphere. While
// subdividing, edge midpoints that straddle a cone face plane are moved to
// the intersection of the edge arc with the plane, so the finest mesh
// follows the coefficient interface.
inline triangulated_sphere icosphere(int level, const vertex_cone& cone = {}) {
    triangulated_sphere s;
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<vec3> v = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& p : v) s.nodes.push_back(normalized(p));
    s.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int lev = 0; lev < level; ++lev) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int i, int j) {
            auto key = std::make_pair(std::min(i, j), std::max(i, j));
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            vec3 a = s.nodes[i], b = s.nodes[j];
            vec3 m = normalized(a + b);
            // snap to a cone boundary arc the edge crosses
            for (const auto& n : cone.normals) {
                double da = dot(n, a), db = dot(n, b);
                // strict sign change; endpoints already on the plane stay put
                if (da * db < -1e-24) {
                    double w = da / (da - db);
                    vec3 c = normalized(a + w * (b - a));
                    bool near_cone = true;
                    for (const auto& m2 : cone.normals)
                        if (dot(m2, c) < -0.3) near_cone = false;
                    if (near_cone) {
                        m = c;
                        break;
                    }
                }
            }
            int idx = static_cast<int>(s.nodes.size());
            s.nodes.push_back(m);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(s.triangles.size() * 4);
        for (const auto& tr : s.triangles) {
            int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
            next.push_back({tr[0], ab, ca});
            next.push_back({tr[1], bc, ab});
            next.push_back({tr[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.triangles = std::move(next);
    }

    s.inside_cone.resize(s.triangles.size());
    for (std::size_t i = 0; i < s.triangles.size(); ++i) {
        const auto& tr = s.triangles[i];
        vec3 c = (s.nodes[tr[0]] + s.nodes[tr[1]] + s.nodes[tr[2]]) / 3.0;
        s.inside_cone[i] = cone.contains(c) ? 1 : 0;
    }
    return s;
}

struct spherical_operator {
    Eigen::SparseMatrix<double> stiffness;  // A, PSD with kernel = constants
    Eigen::SparseMatrix<double> mass;       // M, SPD
};

// P1 FEM on the flat-triangle approximation, coefficient 1 + (k-1) on
// tagged triangles.
inline spherical_operator assemble_spherical_operator(const triangulated_sphere& mesh,
                                                      double k) {
    int n = static_cast<int>(mesh.nodes.size());
    std::vector<Eigen::Triplet<double>> ta, tm;
    ta.reserve(mesh.triangles.size() * 9);
    tm.reserve(mesh.triangles.size() * 9);
    for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
        const auto& tr = mesh.triangles[ti];
        vec3 p0 = mesh.nodes[tr[0]], p1 = mesh.nodes[tr[1]], p2 = mesh.nodes[tr[2]];
        vec3 e1 = p1 - p0, e2 = p2 - p0;
        vec3 nrm = cross(e1, e2);
        double area2 = norm(nrm);
        if (area2 < 2e-14) throw geometry_error("degenerate triangle in sphere mesh");
        double area = 0.5 * area2;
        // P1 shape gradients (in the triangle plane)
        vec3 un = nrm / area2;
        std::array<vec3, 3> grad;
        grad[0] = cross(un, p2 - p1) / (2.0 * area);
        grad[1] = cross(un, p0 - p2) / (2.0 * area);
        grad[2] = cross(un, p1 - p0) / (2.0 * area);
        double coeff = mesh.inside_cone[ti] ? k : 1.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                ta.emplace_back(tr[i], tr[j], coeff * dot(grad[i], grad[j]) * area);
                tm.emplace_back(tr[i], tr[j], area / 12.0 * (i == j ? 2.0 : 1.0));
            }
    }
    spherical_operator op;
    op.stiffness.resize(n, n);
    op.mass.resize(n, n);
    op.stiffness.setFromTriplets(ta.begin(), ta.end());
    op.mass.setFromTriplets(tm.begin(), tm.end());
    return op;
}

// Smallest eigenvalue of A x = v M x on the M-orthogonal complement of
// constants. Dense solve up to 5000 nodes, shifted inverse iteration with
// constant deflation beyond.
inline double first_vertex_eigenvalue(const spherical_operator& op) {
    int n = static_cast<int>(op.stiffness.rows());
    if (n <= 5000) {
        Eigen::MatrixXd A = Eigen::MatrixXd(op.stiffness);
        Eigen::MatrixXd M = Eigen::MatrixXd(op.mass);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, M);
        if (solver.info() != Eigen::Success)
            throw numeric_error("first_vertex_eigenvalue: dense solver failed");
        return solver.eigenvalues()(1);  // (0) is the constant mode, ~0
    }
    // K = A + M is SPD; inverse iteration on K^{-1} M with deflation
    Eigen::SparseMatrix<double> K = op.stiffness + op.mass;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw numeric_error("first_vertex_eigenvalue: factorization failed");
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    double m11 = ones.dot(op.mass * ones);
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    x -= ones * (ones.dot(op.mass * x) / m11);
    x /= std::sqrt(x.dot(op.mass * x));
    double prev = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Eigen::VectorXd y = ldlt.solve(op.mass * x);
        y -= ones * (ones.dot(op.mass * y) / m11);
        y /= std::sqrt(y.dot(op.mass * y));
        double val = y.dot(op.stiffness * y);
        if (it > 3 && std::abs(val - prev) < 1e-12 * std::abs(val)) return val;
        prev = val;
        x = y;
    }
    throw numeric_error("first_vertex_eigenvalue: inverse iteration did not converge");
}

inline double first_vertex_eigenvalue(const triangulated_sphere& mesh, double k) {
    return first_vertex_eigenvalue(assemble_spherical_operator(mesh, k));
}

// lambda = -1/2 + sqrt(1/4 + upsilon), the positive branch
inline double vertex_exponent(double upsilon) {
    if (upsilon < 0.0) throw domain_error("vertex_exponent: upsilon must be >= 0");
    return -0.5 + std::sqrt(0.25 + upsilon);
}

struct s_choice {
    double s0;
    double s;
    double eps_reg;
};

// s0 = mu1 and s the midpoint of (3/2, mu1+1)
inline s_choice choose_s(double mu1) {
    if (!(mu1 > 0.5 && mu1 < 1.0))
        throw validation_error("choose_s: mu1 outside (1/2, 1)");
    s_choice c;
    c.s0 = mu1;
    c.s = 0.5 * (1.5 + (mu1 + 1.0));
    c.eps_reg = c.s - 1.5;
    return c;
}

struct exponent_set {
    double k = 0.0;
    double a = 0.0;
    std::vector<double> mu;      // ordered edge exponents
    std::vector<double> lambda;  // ordered vertex exponents (lambda1 only in v1)
    double s0 = 0.0;
    double s = 0.0;
    double a_tilde = 0.0;        // cos(a/2)
    double b_tilde = 0.0;        // cos((pi+a)/4)
    bool lambda_range_ok = true; // lambda1 in (1, sqrt(2k)); empirical, warn-only

    static exponent_set make(double k, double a, std::vector<double> mu,
                             std::vector<double> lambda) {
        exponent_set e;
        e.k = k;
        e.a = a;
        e.mu = std::move(mu);
        e.lambda = std::move(lambda);
        if (e.mu.size() < 2 || !(e.mu[0] > 0.5 && e.mu[0] < 1.0 && e.mu[1] > 1.0))
            throw validation_error("exponent_set: need 1/2 < mu1 < 1 < mu2");
        if (e.lambda.empty() || !(e.lambda[0] > 1.0))
            throw validation_error("exponent_set: need lambda1 > 1");
        e.lambda_range_ok = e.lambda[0] < std::sqrt(2.0 * k);
        e.s0 = std::min(e.lambda[0] + 0.5, e.mu[0]);
        e.s = choose_s(e.mu[0]).s;
        e.a_tilde = std::cos(a / 2.0);
        e.b_tilde = std::cos((pi + a) / 4.0);
        return e;
    }

    // mu2 capped by the regularity parameter: mu2 if s - mu2 >= 1/2,
    // otherwise s - 1/2
    double mu2_tilde() const {
        return (s - mu[1] >= 0.5) ? mu[1] : s - 0.5;
    }
};

}  // namespace wedgelab::exponents
