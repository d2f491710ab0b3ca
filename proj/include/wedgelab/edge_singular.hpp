#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wedgelab/common.hpp"
#include "wedgelab/quadrature.hpp"

// Kondratiev weighted norms on an edge, the smoothing operator K (kernel
// convolution in the stretched edge variable), angular transmission
// profiles, and edge singular functions  u = eta(r~) K[gamma](r~,z) r~^mu phi(theta).

namespace wedgelab::edges {

struct smoothing_kernel {
    std::string name;
    std::function<double(double)> phi;     // kernel
    std::function<double(double)> dphi;    // phi'
    std::function<double(double)> tphi_d;  // (t phi)'
    double support = 12.0;                 // integration window in kernel units
    double mass = 1.0;
    double c_prime = 0.0;                  // sup |x^2 phi(x)|
    bool even = true;

    // kernel selection by name; gaussian is the only kernel in v1
    static smoothing_kernel by_name(const std::string& name) {
        if (name == "gaussian") return gaussian();
        throw validation_error("unknown smoothing kernel: " + name);
    }

    static smoothing_kernel gaussian() {
        smoothing_kernel k;
        k.name = "gaussian";
        const double c = 1.0 / std::sqrt(2.0 * pi);
        k.phi = [c](double x) { return c * std::exp(-0.5 * x * x); };
        k.dphi = [c](double x) { return -x * c * std::exp(-0.5 * x * x); };
        k.tphi_d = [c](double x) { return (1.0 - x * x) * c * std::exp(-0.5 * x * x); };
        k.support = 12.0;  // mass beyond 12 sigma < 1e-31
        k.mass = 1.0;
        k.c_prime = 2.0 * std::exp(-1.0) * c;  // max of x^2 phi at x = sqrt(2)
        k.even = true;
        return k;
    }
};

// Coefficient gamma on an edge (z_lo, z_hi) with weight delta(z) and the
// stretched variable z~ = int_{z0}^z ds/delta(s). Either sample-backed or
// function-backed; the stretch table is always precomputed.
class edge_coefficient {
public:
    static edge_coefficient from_function(double z_lo, double z_hi,
                                          std::function<double(double)> gamma,
                                          std::function<double(double)> delta,
                                          std::function<double(double)> ddelta,
                                          double z0, int samples = 1024) {
        edge_coefficient c;
        c.z_lo_ = z_lo;
        c.z_hi_ = z_hi;
        c.gamma_exact_ = std::move(gamma);
        c.delta_ = std::move(delta);
        c.ddelta_ = std::move(ddelta);
        c.z0_ = z0;
        c.zs_.resize(samples);
        c.gs_.resize(samples);
        for (int i = 0; i < samples; ++i) {
            c.zs_[i] = z_lo + (z_hi - z_lo) * i / (samples - 1.0);
            c.gs_[i] = c.gamma_exact_(c.zs_[i]);
        }
        c.finalize();
        return c;
    }

    static edge_coefficient from_samples(std::vector<double> z, std::vector<double> gamma,
                                         std::function<double(double)> delta,
                                         std::function<double(double)> ddelta, double z0) {
        if (z.size() != gamma.size() || z.size() < 2)
            throw validation_error("edge_coefficient: bad sample arrays");
        edge_coefficient c;
        c.z_lo_ = z.front();
        c.z_hi_ = z.back();
        c.zs_ = std::move(z);
        c.gs_ = std::move(gamma);
        c.delta_ = std::move(delta);
        c.ddelta_ = std::move(ddelta);
        c.z0_ = z0;
        c.finalize();
        return c;
    }

    double z_lo() const { return z_lo_; }
    double z_hi() const { return z_hi_; }
    double z0() const { return z0_; }
    std::size_t sample_count() const { return zs_.size(); }
    const std::vector<double>& sample_z() const { return zs_; }
    const std::vector<double>& sample_gamma() const { return gs_; }

    double delta(double z) const { return delta_(z); }
    double ddelta(double z) const { return ddelta_(z); }

    double gamma(double z) const {
        if (gamma_exact_) return gamma_exact_(z);
        // linear interpolation on the sample grid
        if (z <= zs_.front()) return gs_.front();
        if (z >= zs_.back()) return gs_.back();
        auto it = std::upper_bound(zs_.begin(), zs_.end(), z);
        std::size_t i = static_cast<std::size_t>(it - zs_.begin()) - 1;
        double t = (z - zs_[i]) / (zs_[i + 1] - zs_[i]);
        return gs_[i] * (1.0 - t) + gs_[i + 1] * t;
    }

    // stretched coordinate z~(z); monotone increasing. Cubic Hermite on the
    // precomputed table, using z~'(z) = 1/delta(z) at the nodes.
    double ztilde(double z) const {
        if (z < z_lo_ - 1e-12 || z > z_hi_ + 1e-12)
            throw domain_error("ztilde: z outside edge");
        z = std::clamp(z, z_lo_, z_hi_);
        std::size_t i = cell_of(z);
        double hcell = grid_[i + 1] - grid_[i];
        double t = (z - grid_[i]) / hcell;
        return hermite(t, zt_table_[i], zt_table_[i + 1], hcell / delta_(grid_[i]),
                       hcell / delta_(grid_[i + 1]));
    }

    double zt_min() const { return zt_table_.front(); }
    double zt_max() const { return zt_table_.back(); }

    // inverse of the stretch via the inverse table, z'(z~) = delta(z)
    double z_of_ztilde(double zt) const {
        if (zt <= zt_table_.front()) return z_lo_;
        if (zt >= zt_table_.back()) return z_hi_;
        double pos = (zt - zt_table_.front()) / (zt_table_.back() - zt_table_.front()) *
                     (zinv_.size() - 1);
        std::size_t i = std::min(static_cast<std::size_t>(pos), zinv_.size() - 2);
        double hcell = (zt_table_.back() - zt_table_.front()) / (zinv_.size() - 1);
        double t = pos - static_cast<double>(i);
        return hermite(t, zinv_[i], zinv_[i + 1], hcell * delta_(zinv_[i]),
                       hcell * delta_(zinv_[i + 1]));
    }

    // gamma~(z~) with zero extension beyond the stretched range
    double gamma_tilde(double zt) const {
        if (zt < zt_table_.front() || zt > zt_table_.back()) return 0.0;
        return gamma(z_of_ztilde(zt));
    }

private:
    void finalize() {
        if (!(z_hi_ > z_lo_)) throw validation_error("edge_coefficient: empty edge");
        if (!(z0_ >= z_lo_ && z0_ <= z_hi_))
            throw validation_error("edge_coefficient: z0 outside edge");
        for (double z : {z_lo_, 0.5 * (z_lo_ + z_hi_), z_hi_})
            if (!(delta_(z) > 0.0))
                throw validation_error("edge_coefficient: delta must be positive on the edge");
        // stretch table on a dense uniform grid
        const int n = 4096;
        grid_.resize(n + 1);
        zt_table_.resize(n + 1);
        for (int i = 0; i <= n; ++i) grid_[i] = z_lo_ + (z_hi_ - z_lo_) * i / n;
        // accumulate from z0 so that ztilde(z0) = 0
        std::vector<double> inc(n);
        for (int i = 0; i < n; ++i) inc[i] = segment_integral(grid_[i], grid_[i + 1]);
        std::size_t i0 = cell_of(z0_);
        zt_table_[i0] = -segment_integral(grid_[i0], z0_);
        for (std::size_t i = i0 + 1; i <= static_cast<std::size_t>(n); ++i)
            zt_table_[i] = zt_table_[i - 1] + inc[i - 1];
        for (std::size_t i = i0; i-- > 0;) zt_table_[i] = zt_table_[i + 1] - inc[i];
        for (int i = 0; i < n; ++i)
            if (!(zt_table_[i + 1] > zt_table_[i]))
                throw validation_error("edge_coefficient: stretch not monotone");
        // inverse table on a uniform z~-grid, built once by Newton
        zinv_.resize(n + 1);
        double lo = zt_table_.front(), hi = zt_table_.back();
        zinv_[0] = z_lo_;
        zinv_[n] = z_hi_;
        std::size_t cell = 0;
        for (int i = 1; i < n; ++i) {
            double target = lo + (hi - lo) * i / n;
            while (cell + 2 < zt_table_.size() && zt_table_[cell + 1] < target) ++cell;
            double z = grid_[cell];
            for (int iter = 0; iter < 80; ++iter) {
                double f = zt_table_[cell] + segment_integral(grid_[cell], z) - target;
                double step = -f * delta_(z);
                z = std::clamp(z + step, grid_[cell], grid_[cell + 1]);
                if (std::abs(step) < 1e-17 * (1.0 + std::abs(z))) break;
            }
            zinv_[i] = z;
        }
    }

    static double hermite(double t, double y0, double y1, double m0, double m1) {
        double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
               (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    }

    std::size_t cell_of(double z) const {
        double t = (z - z_lo_) / (z_hi_ - z_lo_) * (grid_.size() - 1);
        auto i = static_cast<std::ptrdiff_t>(t);
        i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(grid_.size()) - 2);
        return static_cast<std::size_t>(i);
    }

    // int_a^b 1/delta by 8-point Gauss (cells are smooth and tiny)
    double segment_integral(double a, double b) const {
        if (a == b) return 0.0;
        const auto& gl = quadrature::gauss_legendre(8);
        double s = 0;
        for (const auto& [x, w] : gl) {
            double z = 0.5 * (a + b) + 0.5 * (b - a) * x;
            s += w / delta_(z);
        }
        return 0.5 * (b - a) * s;
    }

    double z_lo_ = 0, z_hi_ = 1, z0_ = 0;
    std::function<double(double)> gamma_exact_;
    std::function<double(double)> delta_, ddelta_;
    std::vector<double> zs_, gs_;
    std::vector<double> grid_, zt_table_, zinv_;
};

// Discrete V_eta^m(E) norm: sum over j <= m of || delta^{eta+j} d^j gamma ||_L2,
// finite differences on the sample grid; non-integer m by geometric
// interpolation between the neighbouring integer orders.
inline double weighted_norm(const edge_coefficient& c, double eta, double m) {
    if (m < 0.0) throw domain_error("weighted_norm: m must be >= 0");
    const auto& z = c.sample_z();
    if (z.size() < 16) throw resolution_error("weighted_norm: need at least 16 samples");

    auto integer_norm = [&](int order) {
        std::vector<double> d(c.sample_gamma());
        double total = 0.0;
        for (int j = 0; j <= order; ++j) {
            // L2 of delta^{eta+j} * d on the grid (trapezoid)
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < z.size(); ++i) {
                auto f = [&](std::size_t idx) {
                    double w = std::pow(c.delta(z[idx]), eta + j);
                    return w * d[idx] * w * d[idx];
                };
                acc += 0.5 * (z[i + 1] - z[i]) * (f(i) + f(i + 1));
            }
            total += std::sqrt(acc);
            if (j == order) break;
            // centered finite differences for the next derivative
            std::vector<double> nd(d.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (i == 0)
                    nd[i] = (d[1] - d[0]) / (z[1] - z[0]);
                else if (i + 1 == d.size())
                    nd[i] = (d[i] - d[i - 1]) / (z[i] - z[i - 1]);
                else
                    nd[i] = (d[i + 1] - d[i - 1]) / (z[i + 1] - z[i - 1]);
            }
            d = std::move(nd);
        }
        return total;
    };

    double fl = std::floor(m);
    if (m == fl) return integer_norm(static_cast<int>(fl));
    double lo = integer_norm(static_cast<int>(fl));
    double hi = integer_norm(static_cast<int>(fl) + 1);
    double theta = m - fl;
    return std::pow(lo, 1.0 - theta) * std::pow(hi, theta);
}

struct smooth_result {
    double value = 0.0;
    bool extension_affected = false;  // kernel mass outside the sampled window > 1e-10
};

namespace detail {

// integral of weight(u) * gamma~(z~ - r~ u); the zero extension is handled
// exactly by clipping the u-range to the sampled window, so the integrand
// stays smooth on every panel
template <typename W>
double convolve(const edge_coefficient& c, double support, double rtil, double zt,
                W&& weight) {
    double ulo = std::max(-support, (zt - c.zt_max()) / rtil);
    double uhi = std::min(support, (zt - c.zt_min()) / rtil);
    if (!(uhi > ulo)) return 0.0;
    auto f = [&](double u) { return weight(u) * c.gamma_tilde(zt - rtil * u); };
    int panels = std::max(4, static_cast<int>(std::ceil(uhi - ulo)));
    double width = (uhi - ulo) / panels;
    double val = 0.0;
    for (int i = 0; i < panels; ++i)
        val += quadrature::adaptive_simpson(f, ulo + i * width, ulo + (i + 1) * width,
                                            1e-14, 24);
    return val;
}

}  // namespace detail

// K[gamma](r~, z) = int (1/r~) phi(t/r~) gamma~(z~ - t) dt
inline smooth_result smooth_info(const edge_coefficient& c, const smoothing_kernel& ker,
                                 double rtil, double z) {
    if (!(rtil > 0.0)) throw domain_error("smooth: requires r~ > 0");
    double zt = c.ztilde(z);
    smooth_result res;
    res.value = detail::convolve(c, ker.support, rtil, zt, ker.phi);
    // kernel mass falling outside the sampled window
    double u_hi = (zt - c.zt_min()) / rtil;
    double u_lo = (zt - c.zt_max()) / rtil;
    if (u_hi < ker.support || u_lo > -ker.support) {
        double outside = 0.0;
        if (u_hi < ker.support)
            outside += quadrature::adaptive_simpson([&](double u) { return ker.phi(u); },
                                                    u_hi, ker.support, 1e-16, 24);
        if (u_lo > -ker.support)
            outside += quadrature::adaptive_simpson([&](double u) { return ker.phi(u); },
                                                    -ker.support, u_lo, 1e-16, 24);
        res.extension_affected = outside > 1e-10;
    }
    return res;
}

inline double smooth(const edge_coefficient& c, const smoothing_kernel& ker, double rtil,
                     double z) {
    return smooth_info(c, ker, rtil, z).value;
}

// partial derivatives of K in the stretched variables; differentiation
// passes under the integral since only the kernel depends on (r~, z~)
inline double smooth_dzt(const edge_coefficient& c, const smoothing_kernel& ker, double rtil,
                         double z) {
    if (!(rtil > 0.0)) throw domain_error("smooth_dzt: requires r~ > 0");
    double zt = c.ztilde(z);
    return detail::convolve(c, ker.support, rtil, zt, ker.dphi) / rtil;
}

inline double smooth_drt(const edge_coefficient& c, const smoothing_kernel& ker, double rtil,
                         double z) {
    if (!(rtil > 0.0)) throw domain_error("smooth_drt: requires r~ > 0");
    double zt = c.ztilde(z);
    return -detail::convolve(c, ker.support, rtil, zt, ker.tphi_d) / rtil;
}

struct approximation_report {
    double error = 0.0;        // |K[gamma](r~,z) - gamma(z)|
    double bound = 0.0;        // C' r~^{s-mu-1/2} ||gamma||
};

inline approximation_report approximation_error(const edge_coefficient& c,
                                                const smoothing_kernel& ker, double rtil,
                                                double z, double s = 0.0, double mu = 0.0,
                                                double c_prime = 0.0, double norm = 0.0) {
    approximation_report rep;
    rep.error = std::abs(smooth(c, ker, rtil, z) - c.gamma(z));
    if (c_prime > 0.0) rep.bound = c_prime * std::pow(rtil, s - mu - 0.5) * norm;
    return rep;
}

// Piecewise-cosine angular profile cos(mu theta + phase) matched across the
// interfaces theta = +-a/2: continuity and  k phi'_in = phi'_out.
struct angular_profile {
    double mu = 0, k = 1, a = 0;
    bool symmetric = true;
    double amp_in = 1, amp_out = 1;

    double operator()(double theta) const {
        double t = wrap(theta);
        if (std::abs(t) <= a / 2.0)
            return symmetric ? amp_in * std::cos(mu * t) : amp_in * std::sin(mu * t);
        double arg = mu * (std::abs(t) - pi);
        double v = symmetric ? amp_out * std::cos(arg) : amp_out * std::sin(arg);
        return (!symmetric && t < 0.0) ? -v : v;
    }

    double derivative(double theta) const {
        double t = wrap(theta);
        if (std::abs(t) <= a / 2.0)
            return symmetric ? -amp_in * mu * std::sin(mu * t) : amp_in * mu * std::cos(mu * t);
        double sgn = t >= 0.0 ? 1.0 : -1.0;
        double arg = mu * (std::abs(t) - pi);
        if (symmetric) return -sgn * amp_out * mu * std::sin(arg);
        double dv = amp_out * mu * std::cos(arg) * sgn;
        return (t < 0.0) ? -dv : dv;
    }

    // Solves the 2x2 continuity/flux system at theta = a/2 for the class
    // whose dispersion relation mu satisfies; normalizes max |phi| = 1.
    static angular_profile match(double mu, double k, double a) {
        auto det_even = [&] {
            return std::cos(mu * a / 2) * std::sin(mu * (pi - a / 2)) +
                   k * std::sin(mu * a / 2) * std::cos(mu * (pi - a / 2));
        }();
        auto det_odd = [&] {
            return std::sin(mu * a / 2) * std::cos(mu * (pi - a / 2)) +
                   k * std::cos(mu * a / 2) * std::sin(mu * (pi - a / 2));
        }();
        angular_profile p;
        p.mu = mu;
        p.k = k;
        p.a = a;
        p.symmetric = std::abs(det_even) <= std::abs(det_odd);
        if (p.symmetric) {
            // A cos(mu a/2) = B cos(mu(pi - a/2)); -k A mu sin(mu a/2) = B mu sin(mu(pi-a/2))
            p.amp_in = 1.0;
            double s = std::sin(mu * (pi - a / 2));
            if (std::abs(s) > 1e-8)
                p.amp_out = -k * std::sin(mu * a / 2) / s;
            else
                p.amp_out = std::cos(mu * a / 2) / std::cos(mu * (pi - a / 2));
        } else {
            p.amp_in = 1.0;
            double cs = std::cos(mu * (pi - a / 2));
            if (std::abs(cs) > 1e-8)
                p.amp_out = k * std::cos(mu * a / 2) / cs;
            else
                p.amp_out = -std::sin(mu * a / 2) / std::sin(mu * (pi - a / 2));
        }
        // verify the transmission conditions actually hold
        double c_in = p(a / 2 - 1e-12), c_out = p(a / 2 + 1e-12);
        double f_in = k * p.derivative(a / 2 - 1e-12), f_out = p.derivative(a / 2 + 1e-12);
        double scale = std::max({1.0, std::abs(c_in), std::abs(f_in)});
        if (std::abs(c_in - c_out) > 1e-9 * scale || std::abs(f_in - f_out) > 1e-9 * scale)
            throw numeric_error("angular_profile: mu does not satisfy the dispersion relation");
        // normalize max |phi| = 1
        double mx = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            double th = -pi + 2 * pi * i / 2000.0;
            mx = std::max(mx, std::abs(p(th)));
        }
        p.amp_in /= mx;
        p.amp_out /= mx;
        return p;
    }

private:
    static double wrap(double t) {
        while (t > pi) t -= 2 * pi;
        while (t <= -pi) t += 2 * pi;
        return t;
    }
};

// Smooth cutoff: 1 on [0, l], 0 on [2l, inf)
struct cutoff {
    double ell = 0.5;

    double operator()(double x) const {
        if (x <= ell) return 1.0;
        if (x >= 2.0 * ell) return 0.0;
        double u = (2.0 * ell - x) / ell, v = (x - ell) / ell;
        return bump(u) / (bump(u) + bump(v));
    }

    double derivative(double x) const {
        if (x <= ell || x >= 2.0 * ell) return 0.0;
        double u = (2.0 * ell - x) / ell, v = (x - ell) / ell;
        double fu = bump(u), fv = bump(v);
        double dfu = dbump(u), dfv = dbump(v);
        double denom = (fu + fv) * (fu + fv);
        return (-1.0 / ell) * (dfu * fv + fu * dfv) / denom;
    }

private:
    static double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
    static double dbump(double t) { return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0; }
};

// gamma(z) = a (rho0 + z)^lambda, the coefficient model realizing the
// vertex-edge interaction asymptotics; delta(z) = rho0 + z.
inline edge_coefficient model_coefficient(double a_vl, double lambda, double rho0,
                                          double z_hi, double a_inf) {
    if (std::abs(a_vl) < a_inf)
        throw assumption_error("model_coefficient: |a| below a_inf");
    if (!(rho0 > 0.0) || !(z_hi > 0.0))
        throw domain_error("model_coefficient: need rho0 > 0 and z_hi > 0");
    return edge_coefficient::from_function(
        0.0, z_hi, [a_vl, lambda, rho0](double z) { return a_vl * std::pow(rho0 + z, lambda); },
        [rho0](double z) { return rho0 + z; }, [](double) { return 1.0; }, 0.0);
}

struct edge_singular_function {
    double mu = 0.0;
    edge_coefficient coeff;
    smoothing_kernel kernel;
    angular_profile profile;
    cutoff eta;
};

inline double eval_singular(const edge_singular_function& u, double r, double theta,
                            double z) {
    double d = u.coeff.delta(z);
    double rtil = r / d;
    if (rtil >= 2.0 * u.eta.ell) return 0.0;
    if (!(rtil > 0.0)) {
        // K extends continuously to r~ = 0 with value gamma(z); the factor
        // r~^mu vanishes there (mu > 0)
        return 0.0;
    }
    return u.eta(rtil) * smooth(u.coeff, u.kernel, rtil, z) * std::pow(rtil, u.mu) *
           u.profile(theta);
}

struct cylindrical_gradient {
    double d_r = 0.0;
    double d_theta_over_r = 0.0;  // (1/r) d/dtheta
    double d_z = 0.0;

    double modulus() const {
        return std::sqrt(d_r * d_r + d_theta_over_r * d_theta_over_r + d_z * d_z);
    }
};

// Chain-rule gradient in cylindrical components; r = 0 is the singular axis.
inline cylindrical_gradient eval_singular_gradient(const edge_singular_function& u, double r,
                                                   double theta, double z) {
    if (!(r > 0.0)) throw domain_error("eval_singular_gradient: singular point r = 0");
    double d = u.coeff.delta(z);
    double dd = u.coeff.ddelta(z);
    double rtil = r / d;
    cylindrical_gradient g;
    if (rtil >= 2.0 * u.eta.ell) return g;

    double K = smooth(u.coeff, u.kernel, rtil, z);
    double Kz = smooth_dzt(u.coeff, u.kernel, rtil, z);
    double Kr = smooth_drt(u.coeff, u.kernel, rtil, z);
    double eta = u.eta(rtil);
    double etap = u.eta.derivative(rtil);
    double ph = u.profile(theta);
    double dph = u.profile.derivative(theta);
    double rmu = std::pow(rtil, u.mu);

    // d/dr = (1/delta) d/dr~
    g.d_r = (1.0 / d) * (etap * K * rmu + eta * Kr * rmu + eta * u.mu * K * rmu / rtil) * ph;
    // (1/r) d/dtheta
    g.d_theta_over_r = (1.0 / d) * eta * K * rmu / rtil * dph;
    // d/dz = (1/delta) dK/dz~ ... - (delta'/delta) r~ d/dr~(...)
    double radial_part = etap * K * rtil + eta * Kr * rtil + u.mu * eta * K;
    g.d_z = (1.0 / d) * eta * Kz * rmu * ph - (dd / d) * rmu * radial_part * ph;
    return g;
}

}  // namespace wedgelab::edges
