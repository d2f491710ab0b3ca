#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "wedgelab/common.hpp"

// Three-sphere inequality checks on harmonic test functions, the empirical
// exponent estimate for radius ratios 1:2:4, chained propagation exponents,
// and the Hoelder-to-log-log bound calculators.

namespace wedgelab::propagation {

struct propagation_config {
    double alpha_tilde = 0.5;  // three-sphere exponent for ratios 1:2:4
    double alpha0 = 0.5;       // Hoelder exponent of u - u'
    double alpha1 = 0.5;       // Hoelder exponent of dist * grad(u - u')
    double T = 1.0;            // Hoelder norm bound
    double eps_m = 1e-4;       // admissibility threshold
    double C = 1.0;            // propagation constant
    double curve_length = 1.0; // L
    double radius = 0.1;       // r

    double alpha() const { return std::min(alpha0, alpha1); }

    void validate() const {
        if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0))
            throw validation_error("propagation_config: alpha_tilde outside (0,1)");
        if (!(radius > 0.0 && radius < curve_length))
            throw validation_error("propagation_config: need 0 < r < L");
        if (!(T > 0.0)) throw validation_error("propagation_config: T must be positive");
    }

    void apply_kv(const std::map<std::string, std::string>& kv) {
        for (const auto& [key, val] : kv) {
            double x = std::stod(val);
            if (key == "alpha_tilde") alpha_tilde = x;
            else if (key == "alpha0") alpha0 = x;
            else if (key == "alpha1") alpha1 = x;
            else if (key == "T") T = x;
            else if (key == "eps_m") eps_m = x;
            else if (key == "C") C = x;
            else if (key == "L") curve_length = x;
            else if (key == "r") radius = x;
            else throw validation_error("unknown propagation config key: " + key);
        }
        validate();
    }

    // alpha1 must not exceed the regularity exponents it is built from
    void validate_against(double eps_reg, double lambda1, double mu1) const {
        if (alpha1 > std::min({eps_reg, lambda1, mu1}) + 1e-12)
            throw validation_error("propagation_config: alpha1 exceeds min(eps, lambda1, mu1)");
    }
};

// r_m = min{h, delta_0} / 3, the safety radius of the curve construction
inline double r_m_rule(double h, double delta0) { return std::min(h, delta0) / 3.0; }

// deterministic Fibonacci sphere lattice
inline std::vector<vec3> sphere_lattice(int n) {
    std::vector<vec3> dirs;
    dirs.reserve(n);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - (2.0 * i + 1.0) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = 2.0 * pi * std::fmod(i / golden, 1.0);
        dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return dirs;
}

using scalar_field = std::function<double(const vec3&)>;

// sup |f| on the sphere of given radius; the maximum principle puts the
// ball sup there for harmonic f
inline double sphere_sup(const scalar_field& f, const vec3& center, double radius,
                         const std::vector<vec3>& dirs) {
    double m = 0.0;
    for (const auto& d : dirs) m = std::max(m, std::abs(f(center + radius * d)));
    return m;
}

inline void validate_harmonic(const scalar_field& f, const vec3& center, double scale) {
    for (int i = 0; i < 8; ++i) {
        vec3 p = center + scale * vec3{0.31 * std::cos(1.7 * i), 0.27 * std::sin(2.3 * i + 1),
                                       0.23 * std::cos(0.9 * i + 2)};
        double h = 1e-4 * scale;
        double c = f(p);
        double lap = (f({p.x + h, p.y, p.z}) + f({p.x - h, p.y, p.z}) +
                      f({p.x, p.y + h, p.z}) + f({p.x, p.y - h, p.z}) +
                      f({p.x, p.y, p.z + h}) + f({p.x, p.y, p.z - h}) - 6.0 * c) /
                     (h * h);
        double grad = std::abs(f({p.x + h, p.y, p.z}) - f({p.x - h, p.y, p.z})) / (2 * h);
        double ref = std::abs(c) / (scale * scale) + grad / scale + 1e-12;
        if (std::abs(lap) > 2e-4 * ref)
            throw validation_error("three_sphere_check: test function is not harmonic");
    }
}

struct three_sphere_result {
    double m1 = 0, m2 = 0, m3 = 0;
    double alpha = 0;
    bool pass = false;
};

// checks sup_{r2} |w| <= sup_{r1}|w|^alpha sup_{r3}|w|^{1-alpha}
inline three_sphere_result three_sphere_check(const scalar_field& f, const vec3& center,
                                              double r1, double r2, double r3, double alpha,
                                              int n = 100000, bool validate = true) {
    if (std::abs(r2 / r1 - 2.0) > 1e-12 || std::abs(r3 / r2 - 2.0) > 1e-12)
        throw domain_error("three_sphere_check: radii must have ratios 1:2:4");
    if (validate) validate_harmonic(f, center, r3);
    auto dirs = sphere_lattice(n);
    three_sphere_result res;
    res.alpha = alpha;
    res.m1 = sphere_sup(f, center, r1, dirs);
    res.m2 = sphere_sup(f, center, r2, dirs);
    res.m3 = sphere_sup(f, center, r3, dirs);
    res.pass = res.m2 <= std::pow(res.m1, alpha) * std::pow(res.m3, 1.0 - alpha) *
                             (1.0 + 1e-9);
    return res;
}

// per-member exponent (ln M3 - ln M2) / (ln M3 - ln M1)
inline double member_exponent(double m1, double m2, double m3) {
    return (std::log(m3) - std::log(m2)) / (std::log(m3) - std::log(m1));
}

// infimum of member exponents over a family, clamped to (0,1); members with
// M3 == M1 (constants) are uninformative and excluded
inline double estimate_alpha_tilde(const std::vector<scalar_field>& family,
                                   const vec3& center, double r1, int n = 100000) {
    auto dirs = sphere_lattice(n);
    double inf = 1.0;
    bool informative = false;
    for (const auto& f : family) {
        double m1 = sphere_sup(f, center, r1, dirs);
        double m2 = sphere_sup(f, center, 2 * r1, dirs);
        double m3 = sphere_sup(f, center, 4 * r1, dirs);
        if (!(m3 > m1 * (1.0 + 1e-13)) || m1 == 0.0) continue;
        informative = true;
        inf = std::min(inf, member_exponent(m1, m2, m3));
    }
    if (!informative)
        throw validation_error("estimate_alpha_tilde: no informative family member");
    return std::clamp(inf, 1e-12, 1.0 - 1e-12);
}

// alpha~^{L/r + 1}
inline double chain_exponent(double alpha_tilde, double length, double radius) {
    if (!(alpha_tilde > 0.0 && alpha_tilde < 1.0))
        throw domain_error("chain_exponent: alpha_tilde outside (0,1)");
    if (!(length > 0.0) || !(radius > 0.0))
        throw domain_error("chain_exponent: need positive L and r");
    return std::pow(alpha_tilde, length / radius + 1.0);
}

// C T eps^{alpha~^{L/r+1}}
inline double boundary_to_interior_bound(double T, double eps, double alpha_tilde,
                                         double length, double radius, double C = 1.0) {
    if (!(eps > 0.0 && eps < 1.0))
        throw domain_error("boundary_to_interior_bound: eps must lie in (0,1)");
    return C * T * std::pow(eps, chain_exponent(alpha_tilde, length, radius));
}

struct loglog_result {
    double zeta = 0.0;            // (ln |ln eps|)^{-alpha}
    double value_bound = 0.0;     // T zeta
    double gradient_bound = 0.0;  // T zeta / dist
};

inline loglog_result loglog_bounds(double T, double alpha, double eps,
                                   double dist_to_boundary, double eps_m = 1e-4) {
    if (!(eps > 0.0 && eps < eps_m))
        throw admissibility_error("loglog_bounds: eps outside (0, eps_m)");
    if (!(dist_to_boundary > 0.0))
        throw domain_error("loglog_bounds: distance must be positive");
    double inner = std::log(std::abs(std::log(eps)));
    if (!(inner > 1.0))
        throw domain_error("loglog_bounds: ln|ln eps| must exceed 1");
    loglog_result res;
    res.zeta = std::pow(inner, -alpha);
    res.value_bound = T * res.zeta;
    res.gradient_bound = T * res.zeta / dist_to_boundary;
    return res;
}

// -------------------------------------------------------------------------
// Harmonic test families
// -------------------------------------------------------------------------

// real solid harmonic r^d P_d^m(cos theta) {cos,sin}(m phi)
inline double solid_harmonic(int d, int m, bool sine, const vec3& x) {
    double r = norm(x);
    if (r == 0.0) return d == 0 ? 1.0 : 0.0;
    double ct = x.z / r;
    double phi = std::atan2(x.y, x.x);
    double leg = std::assoc_legendre(d, std::abs(m), ct);
    double ang = sine ? std::sin(std::abs(m) * phi) : std::cos(std::abs(m) * phi);
    return std::pow(r, d) * leg * ang;
}

// basis of solid harmonics up to max_degree, flattened (d, m, parity)
struct harmonic_basis_index {
    int d;
    int m;
    bool sine;
};

inline std::vector<harmonic_basis_index> harmonic_basis(int max_degree) {
    std::vector<harmonic_basis_index> idx;
    for (int d = 0; d <= max_degree; ++d) {
        idx.push_back({d, 0, false});
        for (int m = 1; m <= d; ++m) {
            idx.push_back({d, m, false});
            idx.push_back({d, m, true});
        }
    }
    return idx;
}

struct harmonic_polynomial {
    std::vector<harmonic_basis_index> basis;
    std::vector<double> coeffs;

    double operator()(const vec3& x) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (coeffs[i] != 0.0)
                acc += coeffs[i] * solid_harmonic(basis[i].d, basis[i].m, basis[i].sine, x);
        return acc;
    }
};

// Fast three-sphere data for polynomial families centered at the origin:
// the basis values on the direction lattice are computed once, and
// M(r) = max over the lattice of |sum_i c_i r^{d_i} B_i(dir)|.
struct poly_family_report {
    std::vector<double> member_alpha;
    double alpha_tilde = 1.0;
};

inline poly_family_report poly_family_alpha(const std::vector<harmonic_polynomial>& family,
                                            double r1, int n = 100000, int threads = 1) {
    if (family.empty())
        throw validation_error("poly_family_alpha: empty family");
    const auto& basis = family.front().basis;
    auto dirs = sphere_lattice(n);
    std::vector<double> table(dirs.size() * basis.size());
    for (std::size_t p = 0; p < dirs.size(); ++p)
        for (std::size_t i = 0; i < basis.size(); ++i)
            table[p * basis.size() + i] =
                solid_harmonic(basis[i].d, basis[i].m, basis[i].sine, dirs[p]);

    // members are independent; results land in-place by index, so the
    // outcome does not depend on the thread count
    std::vector<double> member_alpha(family.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        std::vector<double> rpow(basis.size());
        for (std::size_t f = begin; f < end; ++f) {
            const auto& poly = family[f];
            double m[3] = {0, 0, 0};
            double radii[3] = {r1, 2 * r1, 4 * r1};
            for (int s = 0; s < 3; ++s) {
                for (std::size_t i = 0; i < basis.size(); ++i)
                    rpow[i] = std::pow(radii[s], basis[i].d);
                for (std::size_t p = 0; p < dirs.size(); ++p) {
                    double acc = 0.0;
                    const double* row = &table[p * basis.size()];
                    for (std::size_t i = 0; i < basis.size(); ++i)
                        acc += poly.coeffs[i] * rpow[i] * row[i];
                    m[s] = std::max(m[s], std::abs(acc));
                }
            }
            member_alpha[f] = (!(m[2] > m[0] * (1.0 + 1e-13)) || m[0] == 0.0)
                                  ? std::numeric_limits<double>::quiet_NaN()
                                  : member_exponent(m[0], m[1], m[2]);
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1 || family.size() < 2) {
        work(0, family.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (family.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            std::size_t b = t * chunk, e = std::min(family.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }

    poly_family_report rep;
    bool informative = false;
    for (double a : member_alpha) {
        rep.member_alpha.push_back(a);
        if (!std::isnan(a)) {
            informative = true;
            rep.alpha_tilde = std::min(rep.alpha_tilde, a);
        }
    }
    if (!informative)
        throw validation_error("poly_family_alpha: no informative family member");
    rep.alpha_tilde = std::clamp(rep.alpha_tilde, 1e-12, 1.0 - 1e-12);
    return rep;
}

}  // namespace wedgelab::propagation
