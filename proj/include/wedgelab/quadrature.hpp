#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "wedgelab/common.hpp"

namespace wedgelab::quadrature {

struct node {
    double x;
    double w;
};

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on P_n.
inline const std::vector<node>& gauss_legendre(int n) {
    static std::map<int, std::vector<node>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<node> rule(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule[i] = {-x, 2.0 / ((1.0 - x * x) * dp * dp)};
        rule[n - 1 - i] = {x, rule[i].w};
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

using rule1d = std::vector<node>;

inline rule1d map_to_interval(int n, double a, double b) {
    const auto& gl = gauss_legendre(n);
    rule1d out;
    out.reserve(gl.size());
    for (const auto& [x, w] : gl)
        out.push_back({0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w});
    return out;
}

// Panels on [0, length], geometrically graded toward 0 with the given ratio.
// Depth chosen so the finest panel ends at <= min_cell * length.
inline std::vector<std::pair<double, double>>
graded_panels(double length, double ratio = 0.5, double min_cell = 1e-6) {
    std::vector<std::pair<double, double>> panels;
    double hi = length;
    while (hi > min_cell * length) {
        double lo = hi * ratio;
        panels.emplace_back(lo, hi);
        hi = lo;
    }
    panels.emplace_back(0.0, hi);
    return panels;
}

// Composite rule on [0,length], graded toward 0; n points per panel.
inline rule1d graded_rule(double length, int n, double ratio = 0.5, double min_cell = 1e-6) {
    rule1d out;
    for (auto [lo, hi] : graded_panels(length, ratio, min_cell)) {
        auto panel = map_to_interval(n, lo, hi);
        out.insert(out.end(), panel.begin(), panel.end());
    }
    return out;
}

inline rule1d uniform_rule(double a, double b, int panels, int n) {
    rule1d out;
    double h = (b - a) / panels;
    for (int i = 0; i < panels; ++i) {
        auto panel = map_to_interval(n, a + i * h, a + (i + 1) * h);
        out.insert(out.end(), panel.begin(), panel.end());
    }
    return out;
}

template <typename F>
double integrate(const rule1d& rule, F&& f) {
    double s = 0;
    for (const auto& [x, w] : rule) s += w * f(x);
    return s;
}

template <typename F>
complexd integrate_complex(const rule1d& rule, F&& f) {
    complexd s = 0;
    for (const auto& [x, w] : rule) s += w * f(x);
    return s;
}

// Adaptive Simpson on [a,b]; used for the kernel convolutions where the
// integrand width varies with the smoothing radius.
namespace detail {
template <typename F>
double adaptive_simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace wedgelab::quadrature
