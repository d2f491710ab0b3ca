#pragma once

#include <cmath>
#include <complex>

#include "wedgelab/common.hpp"
#include "wedgelab/geometry.hpp"

// Complex geometrical optics field u0(x) = exp(zeta . (x - x_O)) with
// zeta = tau(-x^ + i y^), an isotropic complex vector. In the edge frame
// |u0| = exp(-tau r cos theta): decaying into the wedge, bounded by e on
// the offset region.

namespace wedgelab::cgo {

struct cgo_field {
    double tau = 0.0;
    geometry::edge_frame frame;
    cvec3 zeta;

    static cgo_field make(double tau, const geometry::edge_frame& fr) {
        if (!(tau > 0.0)) throw domain_error("cgo_field: tau must be positive");
        cgo_field f;
        f.tau = tau;
        f.frame = fr;
        f.zeta = {complexd(-tau * fr.xhat.x, tau * fr.yhat.x),
                  complexd(-tau * fr.xhat.y, tau * fr.yhat.y),
                  complexd(-tau * fr.xhat.z, tau * fr.yhat.z)};
        return f;
    }

    // modulus and phase separated in the edge frame: no cancellation
    complexd eval_local(double r, double theta) const {
        double re = -tau * r * std::cos(theta);
        if (re > 700.0) throw numeric_error("cgo_field: exponent overflow");
        return std::exp(re) * complexd(std::cos(tau * r * std::sin(theta)),
                                       std::sin(tau * r * std::sin(theta)));
    }

    complexd eval(const vec3& x) const {
        double r, th, z;
        frame.to_local(x, r, th, z);
        if (tau * r > 700.0) throw numeric_error("cgo_field: exponent overflow");
        return eval_local(r, th);
    }

    cvec3 gradient(const vec3& x) const {
        complexd u = eval(x);
        return {zeta.x * u, zeta.y * u, zeta.z * u};
    }

    complexd gradient_local(double r, double theta, const vec3& direction) const {
        return dot(zeta, direction) * eval_local(r, theta);
    }
};

struct wedge_bounds_report {
    double sup_omega = 0.0;      // empirical sup over the Omega~ cloud
    double sup_d = 0.0;          // empirical sup over the D~ cloud
    double sup_d_face = 0.0;     // sup over the r = h face of D~
    double bound_omega = 0.0;    // e
    double bound_d_face = 0.0;   // e^{-tau a~ h}
    bool pointwise_ok = true;    // |u0| <= e^{-tau a~ r} everywhere on D~
};

namespace detail {
inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}
}  // namespace detail

// Empirical sup bounds on deterministic sample clouds. The interior decay
// bound e^{-tau a~ h} is attained on the r = h face; in the volume the
// valid pointwise bound is e^{-tau a~ r}, which is checked as well.
inline wedge_bounds_report wedge_bounds(const cgo_field& field,
                                        const geometry::wedge_geometry& w,
                                        int n_samples = 100000, bool enforce = true) {
    if (norm(field.frame.origin - w.frame.origin) > 1e-14 ||
        norm(field.frame.xhat - w.frame.xhat) > 1e-14)
        throw validation_error("wedge_bounds: field frame differs from wedge frame");
    wedge_bounds_report rep;
    double a = w.opening();
    double atil = w.a_tilde();
    rep.bound_omega = std::exp(1.0);
    rep.bound_d_face = std::exp(-field.tau * atil * w.h);

    // D~ cloud: polar sampling of the sector
    for (int i = 1; i <= n_samples; ++i) {
        double r = w.h * std::sqrt(detail::halton(i, 2));
        double th = a * (detail::halton(i, 3) - 0.5);
        double v = std::abs(field.eval_local(r, th));
        rep.sup_d = std::max(rep.sup_d, v);
        if (v > std::exp(-field.tau * atil * r) * (1.0 + 1e-12)) rep.pointwise_ok = false;
        // face samples at r = h
        double vf = std::abs(field.eval_local(w.h, th));
        rep.sup_d_face = std::max(rep.sup_d_face, vf);
    }

    // Omega~ cloud: rejection sampling of the cross-section disk
    int accepted = 0;
    for (int i = 1; accepted < n_samples && i < 50 * n_samples; ++i) {
        double r = w.h * std::sqrt(detail::halton(i, 2));
        double th = 2.0 * pi * (detail::halton(i, 3) - 0.5);
        double z = w.hz * detail::halton(i, 5);
        vec3 p = w.frame.to_global(r, th, z);
        if (w.classify(p) == geometry::region::outside) continue;
        ++accepted;
        rep.sup_omega = std::max(rep.sup_omega, std::abs(field.eval_local(r, th)));
    }

    if (enforce) {
        if (rep.sup_omega > rep.bound_omega * (1.0 + 1e-12))
            throw validation_error("wedge_bounds: |u0| exceeds e on Omega~");
        if (rep.sup_d_face > rep.bound_d_face * (1.0 + 1e-12))
            throw validation_error("wedge_bounds: |u0| exceeds e^{-tau a~ h} on the r=h face");
        if (!rep.pointwise_ok)
            throw validation_error("wedge_bounds: pointwise decay bound violated on D~");
    }
    return rep;
}

// |u0| <= e^{-tau b~ h} on every S^i quadrature node, valid once tau >= tau0
inline bool si_bound_holds(const cgo_field& field, const geometry::wedge_geometry& w,
                           double* worst_margin = nullptr) {
    double bound = std::exp(-field.tau * w.b_tilde() * w.h);
    double worst = 0.0;
    bool ok = true;
    for (const auto& node : w.get_patch(geometry::patch_id::s_i).nodes) {
        double v = std::abs(field.eval_local(node.r, node.theta));
        worst = std::max(worst, v);
        if (v > bound * (1.0 + 1e-12)) ok = false;
    }
    if (worst_margin) *worst_margin = worst / bound;
    return ok;
}

}  // namespace wedgelab::cgo
