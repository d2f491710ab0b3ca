#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wedgelab/common.hpp"
#include "wedgelab/edge_singular.hpp"
#include "wedgelab/exponents.hpp"
#include "wedgelab/geometry.hpp"

// File formats: the ASCII polyhedron/mesh format ("v x y z" and
// "f i j k ..." lines, 0-based indices), plain-text key=value configs, and
// deterministic CSV emission.

namespace wedgelab::io {

struct ascii_mesh {
    std::vector<vec3> vertices;
    std::vector<std::vector<int>> faces;
};

inline ascii_mesh read_ascii_mesh(std::istream& in) {
    ascii_mesh m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            vec3 p;
            if (!(ss >> p.x >> p.y >> p.z))
                throw validation_error("mesh line " + std::to_string(lineno) + ": bad vertex");
            m.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            int i;
            while (ss >> i) idx.push_back(i);
            if (idx.size() < 3)
                throw validation_error("mesh line " + std::to_string(lineno) + ": bad face");
            for (int j : idx)
                if (j < 0 || j >= static_cast<int>(m.vertices.size()))
                    throw validation_error("mesh line " + std::to_string(lineno) +
                                           ": face index out of range");
            m.faces.push_back(std::move(idx));
        } else {
            throw validation_error("mesh line " + std::to_string(lineno) + ": unknown tag '" +
                                   tag + "'");
        }
    }
    return m;
}

inline ascii_mesh read_ascii_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open mesh file: " + path);
    return read_ascii_mesh(in);
}

// deterministic float formatting
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_ascii_mesh(std::ostream& out, const ascii_mesh& m) {
    for (const auto& v : m.vertices)
        out << "v " << fmt(v.x) << " " << fmt(v.y) << " " << fmt(v.z) << "\n";
    for (const auto& f : m.faces) {
        out << "f";
        for (int i : f) out << " " << i;
        out << "\n";
    }
}

inline geometry::convex_polyhedron read_polyhedron(const std::string& path) {
    auto m = read_ascii_mesh_file(path);
    return geometry::convex_polyhedron::make(m.vertices, m.faces);
}

inline exponents::triangulated_sphere read_sphere_mesh(const std::string& path,
                                                       const exponents::vertex_cone& cone) {
    auto m = read_ascii_mesh_file(path);
    exponents::triangulated_sphere s;
    for (const auto& v : m.vertices) {
        if (std::abs(norm(v) - 1.0) > 1e-10)
            throw validation_error("sphere mesh vertex not on the unit sphere");
        s.nodes.push_back(normalized(v));
    }
    for (const auto& f : m.faces) {
        if (f.size() != 3) throw validation_error("sphere mesh face is not a triangle");
        s.triangles.push_back({f[0], f[1], f[2]});
    }
    s.inside_cone.resize(s.triangles.size());
    for (std::size_t i = 0; i < s.triangles.size(); ++i) {
        const auto& t = s.triangles[i];
        vec3 c = (s.nodes[t[0]] + s.nodes[t[1]] + s.nodes[t[2]]) / 3.0;
        s.inside_cone[i] = cone.contains(c) ? 1 : 0;
    }
    return s;
}

inline void write_sphere_mesh(std::ostream& out, const exponents::triangulated_sphere& s) {
    ascii_mesh m;
    m.vertices = s.nodes;
    for (const auto& t : s.triangles) m.faces.push_back({t[0], t[1], t[2]});
    write_ascii_mesh(out, m);
}

// two-column CSV (z, gamma) of coefficient samples; optional header line
inline edges::edge_coefficient read_coefficient_csv(const std::string& path,
                                                    std::function<double(double)> delta,
                                                    std::function<double(double)> ddelta,
                                                    double z0) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open coefficient file: " + path);
    std::vector<double> zs, gs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ss(line);
        double z, g;
        if (!(ss >> z >> g)) {
            if (lineno == 1) continue;  // header
            throw validation_error("coefficient line " + std::to_string(lineno) +
                                   ": expected 'z,gamma'");
        }
        zs.push_back(z);
        gs.push_back(g);
    }
    return edges::edge_coefficient::from_samples(std::move(zs), std::move(gs),
                                                 std::move(delta), std::move(ddelta), z0);
}

// plain-text key=value file; '#' starts a comment
inline std::map<std::string, std::string> read_kv(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty()) continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos || eq == 0)
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": expected key=value");
        kv[trimmed.substr(0, eq)] = trimmed.substr(eq + 1);
    }
    return kv;
}

inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file: " + path);
    return read_kv(in);
}

// simple CSV table with deterministic formatting
class csv_writer {
public:
    explicit csv_writer(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void row(const std::vector<double>& values) {
        if (values.size() != columns_.size())
            throw validation_error("csv row width mismatch");
        rows_.push_back(values);
    }

    void write(std::ostream& out) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            out << columns_[i] << (i + 1 < columns_.size() ? "," : "\n");
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << fmt(r[i]) << (i + 1 < r.size() ? "," : "\n");
        }
    }

    void write_file(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw validation_error("cannot open output file: " + path);
        write(out);
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace wedgelab::io
