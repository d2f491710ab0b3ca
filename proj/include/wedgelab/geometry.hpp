#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wedgelab/common.hpp"
#include "wedgelab/quadrature.hpp"

namespace wedgelab::geometry {

// Optional a-priori bounds a polyhedron is validated against.
struct apriori_bounds {
    double l0 = 0.0;           // minimal edge length
    double a_min = 0.0;        // dihedral opening range (radians)
    double a_max = pi;
    double theta_min = 0.0;    // vertex opening datum range
    double theta_max = 2 * pi;
};

struct face {
    std::vector<int> indices;  // CCW when viewed from outside
    vec3 normal;               // outward unit normal, recomputed
    double offset = 0.0;       // n . x = offset on the face plane
};

struct edge {
    int v0 = 0, v1 = 0;
    int face_a = 0, face_b = 0;
    double opening = 0.0;      // dihedral angle measured inside the body
    double length = 0.0;
};

class convex_polyhedron {
public:
    // Face normals are recomputed from the winding and oriented outward;
    // input normals are never trusted.
    static convex_polyhedron make(std::vector<vec3> vertices,
                                  std::vector<std::vector<int>> face_indices,
                                  std::optional<apriori_bounds> bounds = std::nullopt,
                                  std::vector<double> vertex_openings = {}) {
        convex_polyhedron p;
        p.vertices_ = std::move(vertices);
        if (p.vertices_.size() < 4) throw geometry_error("polyhedron needs >= 4 vertices");

        vec3 lo = p.vertices_[0], hi = p.vertices_[0];
        vec3 centroid{};
        for (const auto& v : p.vertices_) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
            centroid += v;
        }
        centroid = centroid / static_cast<double>(p.vertices_.size());
        p.scale_ = std::max(norm(hi - lo), 1e-30);

        for (auto& idx : face_indices) {
            if (idx.size() < 3) throw geometry_error("face needs >= 3 vertices");
            face f;
            f.indices = idx;
            f.normal = newell_normal(p.vertices_, idx);
            vec3 fc{};
            for (int i : idx) fc += p.vertices_[i];
            fc = fc / static_cast<double>(idx.size());
            if (dot(f.normal, fc - centroid) < 0.0) {
                std::reverse(f.indices.begin(), f.indices.end());
                f.normal = -f.normal;
            }
            f.offset = dot(f.normal, fc);
            p.faces_.push_back(std::move(f));
        }

        // convexity: every vertex inside every face half-space
        const double tol = 1e-12 * p.scale_;
        for (const auto& f : p.faces_)
            for (const auto& v : p.vertices_)
                if (dot(f.normal, v) - f.offset > tol)
                    throw geometry_error("polyhedron is not convex within tolerance");

        // edges from face adjacency
        std::map<std::pair<int, int>, std::vector<int>> around;
        for (std::size_t fi = 0; fi < p.faces_.size(); ++fi) {
            const auto& idx = p.faces_[fi].indices;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                int a = idx[i], b = idx[(i + 1) % idx.size()];
                around[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(fi));
            }
        }
        for (const auto& [key, fs] : around) {
            if (fs.size() != 2) throw geometry_error("edge not shared by exactly two faces");
            edge e;
            e.v0 = key.first;
            e.v1 = key.second;
            e.face_a = fs[0];
            e.face_b = fs[1];
            e.length = norm(p.vertices_[e.v1] - p.vertices_[e.v0]);
            if (e.length < 1e-14 * p.scale_)
                throw geometry_error("degenerate zero-length edge");
            double c = dot(p.faces_[fs[0]].normal, p.faces_[fs[1]].normal);
            c = std::clamp(c, -1.0, 1.0);
            e.opening = pi - std::acos(c);
            if (!(e.opening > 0.0 && e.opening < pi))
                throw geometry_error("edge opening outside (0, pi)");
            p.edges_.push_back(e);
        }

        p.vertex_openings_ = std::move(vertex_openings);
        if (!p.vertex_openings_.empty() && p.vertex_openings_.size() != p.vertices_.size())
            throw validation_error("vertex opening data size mismatch");

        if (bounds) {
            for (const auto& e : p.edges_) {
                if (e.length < bounds->l0 - tol)
                    throw validation_error("edge shorter than a-priori l0");
                if (e.opening < bounds->a_min - 1e-12 || e.opening > bounds->a_max + 1e-12)
                    throw validation_error("edge opening outside a-priori range");
            }
            for (double th : p.vertex_openings_)
                if (th < bounds->theta_min - 1e-12 || th > bounds->theta_max + 1e-12)
                    throw validation_error("vertex opening outside a-priori range");
        }
        return p;
    }

    const std::vector<vec3>& vertices() const { return vertices_; }
    const std::vector<face>& faces() const { return faces_; }
    const std::vector<edge>& edges() const { return edges_; }
    double scale() const { return scale_; }

    double min_edge_length() const {
        double l = edges_[0].length;
        for (const auto& e : edges_) l = std::min(l, e.length);
        return l;
    }

    bool contains(const vec3& p, double tol = 0.0) const {
        for (const auto& f : faces_)
            if (dot(f.normal, p) - f.offset > tol) return false;
        return true;
    }

private:
    static vec3 newell_normal(const std::vector<vec3>& verts, const std::vector<int>& idx) {
        vec3 n{};
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const vec3& a = verts[idx[i]];
            const vec3& b = verts[idx[(i + 1) % idx.size()]];
            n.x += (a.y - b.y) * (a.z + b.z);
            n.y += (a.z - b.z) * (a.x + b.x);
            n.z += (a.x - b.x) * (a.y + b.y);
        }
        return normalized(n);
    }

    std::vector<vec3> vertices_;
    std::vector<face> faces_;
    std::vector<edge> edges_;
    std::vector<double> vertex_openings_;
    double scale_ = 1.0;
};

inline double dist_point_segment(const vec3& p, const vec3& a, const vec3& b) {
    vec3 d = b - a;
    double t = dot(p - a, d) / dot(d, d);
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * d));
}

// Exact projection distance via face / edge / vertex case analysis.
inline double dist_point_polyhedron(const vec3& p, const convex_polyhedron& poly) {
    if (poly.contains(p, 1e-14 * poly.scale())) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : poly.faces()) {
        const auto& idx = f.indices;
        double signed_d = dot(f.normal, p) - f.offset;
        vec3 q = p - signed_d * f.normal;
        bool inside = true;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const vec3& a = poly.vertices()[idx[i]];
            const vec3& b = poly.vertices()[idx[(i + 1) % idx.size()]];
            vec3 left = cross(f.normal, b - a);
            if (dot(q - a, left) < -1e-14 * poly.scale()) {
                inside = false;
                break;
            }
        }
        if (inside) {
            best = std::min(best, std::abs(signed_d));
        } else {
            for (std::size_t i = 0; i < idx.size(); ++i) {
                const vec3& a = poly.vertices()[idx[i]];
                const vec3& b = poly.vertices()[idx[(i + 1) % idx.size()]];
                best = std::min(best, dist_point_segment(p, a, b));
            }
        }
    }
    return best;
}

// Hausdorff distance between convex polyhedra; the sup is attained at a
// vertex, so scanning vertices is exact.
inline double hausdorff(const convex_polyhedron& p, const convex_polyhedron& q) {
    double d = 0.0;
    for (const auto& v : p.vertices()) d = std::max(d, dist_point_polyhedron(v, q));
    for (const auto& v : q.vertices()) d = std::max(d, dist_point_polyhedron(v, p));
    return d;
}

// l = min over edges/vertices of {1/2, l0/5, tan(Theta/2)}, Theta the angle
// between adjacent edges at a shared vertex.
inline double make_cutoff_radius(const convex_polyhedron& poly) {
    double l0 = poly.min_edge_length();
    if (l0 <= 0.0) throw geometry_error("degenerate polyhedron");
    double best = std::min(0.5, l0 / 5.0);
    // collect edge directions per vertex
    std::map<int, std::vector<vec3>> dirs;
    for (const auto& e : poly.edges()) {
        vec3 d = normalized(poly.vertices()[e.v1] - poly.vertices()[e.v0]);
        dirs[e.v0].push_back(d);
        dirs[e.v1].push_back(-d);
    }
    for (const auto& [v, ds] : dirs)
        for (std::size_t i = 0; i < ds.size(); ++i)
            for (std::size_t j = i + 1; j < ds.size(); ++j) {
                double c = std::clamp(dot(ds[i], ds[j]), -1.0, 1.0);
                double theta = std::acos(c);
                best = std::min(best, std::tan(0.5 * theta));
            }
    return best;
}

// Local orthonormal frame on an edge: origin at distance rho from the
// chosen vertex, z along the edge, x the interior bisector so the two
// faces sit at theta = +-a/2.
struct edge_frame {
    vec3 origin;
    vec3 xhat, yhat, zhat;
    double opening = 0.0;
    double rho = 0.0;

    static edge_frame make(const vec3& vertex, const vec3& edge_dir, const vec3& bisector,
                           double opening, double rho) {
        edge_frame f;
        f.zhat = normalized(edge_dir);
        vec3 b = bisector - dot(bisector, f.zhat) * f.zhat;
        f.xhat = normalized(b);
        f.yhat = cross(f.zhat, f.xhat);
        f.opening = opening;
        f.rho = rho;
        f.origin = vertex + rho * f.zhat;
        check_orthonormal(f);
        return f;
    }

    static edge_frame from_polyhedron(const convex_polyhedron& poly, int edge_index,
                                      int from_vertex, double rho) {
        const auto& e = poly.edges().at(edge_index);
        if (from_vertex != e.v0 && from_vertex != e.v1)
            throw geometry_error("from_vertex not on edge");
        int other = (from_vertex == e.v0) ? e.v1 : e.v0;
        vec3 vert = poly.vertices()[from_vertex];
        vec3 dir = normalized(poly.vertices()[other] - vert);
        vec3 mid = 0.5 * (poly.vertices()[e.v0] + poly.vertices()[e.v1]);
        // in-face directions perpendicular to the edge, pointing into each face
        auto tangent = [&](int fi) {
            const auto& f = poly.faces()[fi];
            vec3 t = cross(f.normal, dir);
            vec3 fc{};
            for (int i : f.indices) fc += poly.vertices()[i];
            fc = fc / static_cast<double>(f.indices.size());
            if (dot(t, fc - mid) < 0.0) t = -t;
            return normalized(t);
        };
        vec3 t1 = tangent(e.face_a), t2 = tangent(e.face_b);
        return make(vert, dir, t1 + t2, e.opening, rho);
    }

    vec3 to_global(double r, double theta, double z) const {
        return origin + (r * std::cos(theta)) * xhat + (r * std::sin(theta)) * yhat + z * zhat;
    }

    // cylindrical coordinates (r, theta, z) of a global point
    void to_local(const vec3& p, double& r, double& theta, double& z) const {
        vec3 d = p - origin;
        double px = dot(d, xhat), py = dot(d, yhat);
        z = dot(d, zhat);
        r = std::hypot(px, py);
        theta = std::atan2(py, px);
    }

private:
    static void check_orthonormal(const edge_frame& f) {
        double e = std::abs(dot(f.xhat, f.yhat)) + std::abs(dot(f.yhat, f.zhat)) +
                   std::abs(dot(f.zhat, f.xhat)) + std::abs(norm(f.xhat) - 1.0) +
                   std::abs(norm(f.yhat) - 1.0) + std::abs(norm(f.zhat) - 1.0);
        if (e > 1e-14) throw geometry_error("edge frame axes not orthonormal");
    }
};

enum class region { interior_d, exterior_a, outside };

enum class patch_id { f_plus, f_minus, s_i, s_e, a_plus_i, a_minus_i, a_plus_e, a_minus_e };

struct quad_node {
    vec3 point;
    vec3 normal;
    double weight;
    // local cylindrical coordinates, kept for integrand evaluation
    double r, theta, z;
};

struct patch {
    patch_id id;
    std::vector<quad_node> nodes;

    double area() const {
        double s = 0;
        for (const auto& n : nodes) s += n.weight;
        return s;
    }
};

// Quadrature resolution; refine > 1 doubles point counts and deepens the
// grading (used for convergence checks).
struct quad_params {
    int pts_radial = 8;      // per graded panel
    int pts_angular = 24;
    int pts_z = 8;
    int pts_along = 48;      // along S^e strips
    double min_cell = 1e-10; // grading floor relative to h; r^{mu-1} mass
                             // below the floor is O(floor^mu)
    int refine = 1;

    int nr() const { return pts_radial * refine; }
    int na() const { return pts_angular * refine; }
    int nz() const { return pts_z * refine; }
    int ns() const { return pts_along * refine; }
    double floor_cell() const {
        double f = min_cell;
        for (int i = 1; i < refine; ++i) f *= 1e-2;
        return f;
    }
};

// The local region Omega~ of the analysis: faces F+-, offset surface S^e at
// distance 1/tau from the faces, arc surface S^i at radius h, caps A+-.
class wedge_geometry {
public:
    edge_frame frame;
    double h = 0, hz = 0, tau = 0, ell = 0;

    static double tau0_for(double a, double h) { return 1.0 / (h * std::sin((pi - a) / 4.0)); }

    static wedge_geometry build(const edge_frame& fr, double h, double hz, double tau,
                                double ell, quad_params qp = {}) {
        if (!(h > 0) || !(hz > 0) || !(tau > 0) || !(ell > 0))
            throw config_error("wedge parameters must be positive");
        double a = fr.opening;
        double t0 = tau0_for(a, h);
        if (tau < t0) throw config_error("tau below tau0 = 1/(h sin((pi-a)/4))");
        if (fr.rho + h + hz > ell * (1 + 1e-12))
            throw config_error("constraint rho + h + hz <= ell violated");
        if (h / fr.rho > ell * (1 + 1e-12))
            throw config_error("constraint h/rho <= ell violated");
        wedge_geometry w;
        w.frame = fr;
        w.h = h;
        w.hz = hz;
        w.tau = tau;
        w.ell = ell;
        w.qp_ = qp;
        return w;
    }

    double opening() const { return frame.opening; }
    double tau0() const { return tau0_for(frame.opening, h); }
    double a_tilde() const { return std::cos(frame.opening / 2.0); }
    double b_tilde() const { return std::cos((pi + frame.opening) / 4.0); }
    // angular overshoot of S^i beyond the faces
    double theta_ext() const { return std::asin(1.0 / (tau * h)); }
    double strip_length() const { return std::sqrt(h * h - 1.0 / (tau * tau)); }

    const quad_params& params() const { return qp_; }
    void set_params(quad_params qp) { qp_ = qp; cache_.clear(); }

    region classify(const vec3& p) const {
        double r, th, z;
        frame.to_local(p, r, th, z);
        if (z < 0.0 || z > hz) return region::outside;
        double a = frame.opening;
        if (std::abs(th) <= a / 2.0)
            return r < h ? region::interior_d : region::outside;
        if (r >= h) return region::outside;
        if (planar_dist_to_faces(r, th) <= 1.0 / tau) return region::exterior_a;
        return region::outside;
    }

    // distance from an in-plane point to the union of the two face traces
    double planar_dist_to_faces(double r, double theta) const {
        double a = frame.opening;
        auto dist_to_ray = [&](double phi) {
            // segment from O of length h in direction phi
            double along = r * std::cos(theta - phi);
            double perp = std::abs(r * std::sin(theta - phi));
            if (along <= 0.0) return r;                      // nearest point is O
            if (along >= h) return std::hypot(along - h, perp);
            return perp;
        };
        return std::min(dist_to_ray(a / 2.0), dist_to_ray(-a / 2.0));
    }

    const patch& get_patch(patch_id id) const {
        auto it = cache_.find(id);
        if (it != cache_.end()) return it->second;
        patch p = build_patch(id);
        return cache_.emplace(id, std::move(p)).first->second;
    }

    // points on the contour dS^e (in the plane z = 0), for invariants
    std::vector<vec3> sample_partial_se(int n) const {
        std::vector<vec3> out;
        double a = frame.opening;
        double smax = strip_length();
        double arc0 = pi / 2 + a / 2, arc1 = 3 * pi / 2 - a / 2;
        for (int i = 0; i < n; ++i) {
            double u = (i + 0.5) / n;
            // strip+
            out.push_back(strip_point(+1, u * smax, 1.0 / tau, 0.0));
            // strip-
            out.push_back(strip_point(-1, u * smax, 1.0 / tau, 0.0));
            // back arc
            double phi = arc0 + u * (arc1 - arc0);
            out.push_back(frame.to_global(1.0 / tau, wrap_angle(phi), 0.0));
        }
        return out;
    }

    static double wrap_angle(double t) {
        while (t > pi) t -= 2 * pi;
        while (t <= -pi) t += 2 * pi;
        return t;
    }

private:
    quad_params qp_;
    mutable std::map<patch_id, patch> cache_;

    // point on the exterior offset strip of face +-: s along the face
    // direction, t the exterior normal offset
    vec3 strip_point(int side, double s, double t, double z) const {
        double a = frame.opening;
        double phi = side * a / 2.0;
        double gx = std::cos(phi), gy = std::sin(phi);
        // exterior normal: theta-hat at +a/2 on face +, minus theta-hat at -a/2
        double nx = side * -std::sin(phi);
        double ny = side * std::cos(phi);
        double px = s * gx + t * nx, py = s * gy + t * ny;
        return frame.origin + px * frame.xhat + py * frame.yhat + z * frame.zhat;
    }

    patch build_patch(patch_id id) const {
        namespace q = wedgelab::quadrature;
        patch p;
        p.id = id;
        double a = frame.opening;
        auto rule_r = q::graded_rule(h, qp_.nr(), 0.5, qp_.floor_cell());
        auto rule_z = q::uniform_rule(0.0, hz, 2, qp_.nz());

        switch (id) {
        case patch_id::f_plus:
        case patch_id::f_minus: {
            int side = (id == patch_id::f_plus) ? +1 : -1;
            double th = side * a / 2.0;
            // outward from D~: theta-hat at +a/2, minus theta-hat at -a/2
            vec3 nrm = side * (-std::sin(th) * frame.xhat + std::cos(th) * frame.yhat);
            for (const auto& [r, wr] : rule_r)
                for (const auto& [z, wz] : rule_z)
                    p.nodes.push_back({frame.to_global(r, th, z), nrm, wr * wz, r, th, z});
            break;
        }
        case patch_id::s_i: {
            // panel boundaries at +-a/2, where solution profiles may kink
            double text = theta_ext();
            q::rule1d rule_t = q::uniform_rule(-a / 2, a / 2, 2, qp_.na());
            for (auto seg : {q::map_to_interval(qp_.na(), -a / 2 - text, -a / 2),
                             q::map_to_interval(qp_.na(), a / 2, a / 2 + text)})
                rule_t.insert(rule_t.end(), seg.begin(), seg.end());
            for (const auto& [th, wt] : rule_t)
                for (const auto& [z, wz] : rule_z) {
                    vec3 nrm = std::cos(th) * frame.xhat + std::sin(th) * frame.yhat;
                    p.nodes.push_back({frame.to_global(h, th, z), nrm, h * wt * wz, h, th, z});
                }
            break;
        }
        case patch_id::s_e: {
            double smax = strip_length();
            auto rule_s = q::graded_rule(smax, qp_.ns() / 4, 0.5, 1e-4);
            for (int side : {+1, -1}) {
                double phi = side * a / 2.0;
                vec3 nrm = side * (-std::sin(phi) * frame.xhat + std::cos(phi) * frame.yhat);
                for (const auto& [s, ws] : rule_s)
                    for (const auto& [z, wz] : rule_z) {
                        vec3 pt = strip_point(side, s, 1.0 / tau, z);
                        double r, th, zz;
                        frame.to_local(pt, r, th, zz);
                        p.nodes.push_back({pt, nrm, ws * wz, r, th, zz});
                    }
            }
            double arc0 = pi / 2 + a / 2, arc1 = 3 * pi / 2 - a / 2;
            auto rule_phi = q::uniform_rule(arc0, arc1, 2, qp_.na());
            for (const auto& [phi, wp] : rule_phi)
                for (const auto& [z, wz] : rule_z) {
                    double th = wrap_angle(phi);
                    vec3 nrm = std::cos(th) * frame.xhat + std::sin(th) * frame.yhat;
                    p.nodes.push_back({frame.to_global(1.0 / tau, th, z), nrm,
                                       (1.0 / tau) * wp * wz, 1.0 / tau, th, z});
                }
            break;
        }
        case patch_id::a_plus_i:
        case patch_id::a_minus_i: {
            int zs = (id == patch_id::a_plus_i) ? +1 : -1;
            double z = (zs > 0) ? hz : 0.0;
            vec3 nrm = static_cast<double>(zs) * frame.zhat;
            auto rule_t = q::uniform_rule(-a / 2, a / 2, 2, qp_.na());
            for (const auto& [r, wr] : rule_r)
                for (const auto& [th, wt] : rule_t)
                    p.nodes.push_back({frame.to_global(r, th, z), nrm, r * wr * wt, r, th, z});
            break;
        }
        case patch_id::a_plus_e:
        case patch_id::a_minus_e: {
            int zs = (id == patch_id::a_plus_e) ? +1 : -1;
            double z = (zs > 0) ? hz : 0.0;
            vec3 nrm = static_cast<double>(zs) * frame.zhat;
            // two strips (orthogonal s-t coordinates, unit jacobian)
            auto rule_t = q::graded_rule(1.0 / tau, std::max(4, qp_.nr() / 2), 0.5, 1e-4);
            for (int side : {+1, -1})
                for (const auto& [t, wt] : rule_t) {
                    double smax = std::sqrt(h * h - t * t);
                    auto rule_s = q::graded_rule(smax, qp_.ns() / 4, 0.5, 1e-6);
                    for (const auto& [s, ws] : rule_s) {
                        vec3 pt = strip_point(side, s, t, z);
                        double r, th, zz;
                        frame.to_local(pt, r, th, zz);
                        p.nodes.push_back({pt, nrm, wt * ws, r, th, zz});
                    }
                }
            // back sector around O, radius 1/tau
            double arc0 = pi / 2 + a / 2, arc1 = 3 * pi / 2 - a / 2;
            auto rule_phi = q::uniform_rule(arc0, arc1, 2, qp_.na());
            auto rule_rb = q::graded_rule(1.0 / tau, std::max(4, qp_.nr() / 2), 0.5, 1e-6);
            for (const auto& [r, wr] : rule_rb)
                for (const auto& [phi, wp] : rule_phi) {
                    double th = wrap_angle(phi);
                    p.nodes.push_back(
                        {frame.to_global(r, th, z), nrm, r * wr * wp, r, th, z});
                }
            break;
        }
        }
        return p;
    }
};

}  // namespace wedgelab::geometry
