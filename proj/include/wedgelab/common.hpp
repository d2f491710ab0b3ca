#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace wedgelab {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Error taxonomy. Every precondition violation named by a module contract
// maps onto one of these, so callers (and the CLI exit-code logic) can
// branch on the failure class.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct geometry_error : error { using error::error; };          // degenerate or non-convex input
struct config_error : error { using error::error; };            // parameters violate a construction constraint
struct domain_error : error { using error::error; };            // argument outside mathematical domain
struct numeric_error : error { using error::error; };           // solver failure, overflow, underflow
struct resolution_error : error { using error::error; };        // sampling too coarse
struct admissibility_error : error { using error::error; };     // epsilon outside admissible range
struct assumption_error : error { using error::error; };        // a-priori assumption violated
struct validation_error : error { using error::error; };        // supplied field fails its invariant

struct vec3 {
    double x = 0, y = 0, z = 0;

    vec3 operator+(const vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    vec3 operator-(const vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    vec3 operator-() const { return {-x, -y, -z}; }
    vec3& operator+=(const vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    vec3& operator-=(const vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
};

inline vec3 operator*(double s, const vec3& v) { return v * s; }
inline double dot(const vec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline vec3 cross(const vec3& a, const vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const vec3& v) { return std::sqrt(dot(v, v)); }
inline vec3 normalized(const vec3& v) {
    double n = norm(v);
    if (n == 0.0) throw geometry_error("cannot normalize zero vector");
    return v / n;
}

// Complex 3-vector; enough for CGO fields (zeta and gradients).
struct cvec3 {
    complexd x{0, 0}, y{0, 0}, z{0, 0};
};

inline complexd dot(const cvec3& a, const cvec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline complexd dot(const cvec3& a, const vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double cnorm(const cvec3& a) {
    return std::sqrt(std::norm(a.x) + std::norm(a.y) + std::norm(a.z));
}

inline bool nearly_equal(double a, double b, double rel, double abs_floor = 0.0) {
    return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace wedgelab
