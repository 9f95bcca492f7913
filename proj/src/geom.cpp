#include "thetaconf/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace thetaconf {

namespace {

constexpr double kAreaTol = 1e-14;
constexpr double kOrientTol = 1e-12;

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

double longest_sq(cplx a, cplx b, cplx c) {
    return std::max({std::norm(b - a), std::norm(c - b), std::norm(a - c)});
}

std::string tri_str(const Tri& t) {
    return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")";
}

} // namespace

double signed_area(cplx a, cplx b, cplx c) { return 0.5 * cross(b - a, c - a); }

bool is_degenerate(cplx a, cplx b, cplx c) {
    return signed_area(a, b, c) <= kAreaTol * longest_sq(a, b, c);
}

int TriMesh::edge_id(int u, int v) const {
    auto it = edge_lookup_.find({std::min(u, v), std::max(u, v)});
    return it == edge_lookup_.end() ? -1 : it->second;
}

std::vector<int> TriMesh::interior_vertices() const {
    std::vector<int> out;
    for (int v = 0; v < vertex_count; ++v)
        if (!boundary_vertex[v]) out.push_back(v);
    return out;
}

int TriMesh::apex(int t, int e) const {
    const Edge& ed = edges[e];
    for (int v : triangles[t])
        if (v != ed.a && v != ed.b) return v;
    return -1;
}

int TriMesh::slot(int t, int v) const {
    for (int m = 0; m < 3; ++m)
        if (triangles[t][m] == v) return m;
    return -1;
}

TriMesh build_mesh(const std::vector<Tri>& triangles, const std::vector<cplx>& positions, bool check_area) {
    if (triangles.empty()) throw Error(ErrorKind::InvalidInput, "triangle list is empty");
    TriMesh m;
    m.vertex_count = static_cast<int>(positions.size());
    m.triangles = triangles;
    m.positions = positions;
    m.tri_edges.resize(triangles.size());

    for (size_t t = 0; t < triangles.size(); ++t) {
        const Tri& tri = triangles[t];
        for (int v : tri)
            if (v < 0 || v >= m.vertex_count)
                throw Error(ErrorKind::InvalidInput, "triangle " + tri_str(tri) + " has an invalid index");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw Error(ErrorKind::DegenerateTriangle, "triangle " + tri_str(tri) + " repeats a vertex");
        if (check_area && is_degenerate(positions[tri[0]], positions[tri[1]], positions[tri[2]])) {
            Error e(ErrorKind::DegenerateTriangle, "triangle " + tri_str(tri) + " has non-positive area");
            e.where = static_cast<int>(t);
            throw e;
        }
        for (int s = 0; s < 3; ++s) {
            int u = tri[s], v = tri[(s + 1) % 3];
            auto key = std::make_pair(std::min(u, v), std::max(u, v));
            auto [it, fresh] = m.edge_lookup_.try_emplace(key, static_cast<int>(m.edges.size()));
            if (fresh) {
                Edge e;
                e.a = key.first;
                e.b = key.second;
                m.edges.push_back(e);
            }
            Edge& e = m.edges[it->second];
            int& side = (u == e.a) ? e.left : e.right;
            if (side >= 0) {
                bool third = e.left >= 0 && e.right >= 0;
                throw Error(third ? ErrorKind::NonManifoldEdge : ErrorKind::OrientationMismatch,
                            "edge [" + std::to_string(e.a) + "," + std::to_string(e.b) + "]");
            }
            side = static_cast<int>(t);
            m.tri_edges[t][s] = it->second;
        }
    }

    m.boundary_vertex.assign(m.vertex_count, 0);
    for (size_t e = 0; e < m.edges.size(); ++e) {
        if (m.edges[e].interior()) {
            m.interior_edges.push_back(static_cast<int>(e));
        } else {
            m.boundary_vertex[m.edges[e].a] = 1;
            m.boundary_vertex[m.edges[e].b] = 1;
        }
    }

    // Each vertex neighborhood must be one fan (closed for interior vertices).
    std::vector<std::vector<std::pair<int, int>>> fans(m.vertex_count);
    for (const Tri& tri : triangles)
        for (int s = 0; s < 3; ++s) fans[tri[s]].push_back({tri[(s + 1) % 3], tri[(s + 2) % 3]});
    for (int v = 0; v < m.vertex_count; ++v) {
        const auto& f = fans[v];
        if (f.empty()) continue;
        std::map<int, int> next;
        std::map<int, int> indeg;
        for (auto [a, b] : f) {
            if (!next.emplace(a, b).second)
                throw Error(ErrorKind::NonManifoldEdge, "vertex " + std::to_string(v) + " is not a manifold vertex");
            ++indeg[b];
        }
        int start = f.front().first;
        for (auto [a, b] : f)
            if (!indeg.count(a)) start = a;
        size_t visited = 0;
        int cur = start;
        while (visited < f.size()) {
            auto it = next.find(cur);
            if (it == next.end()) break;
            cur = it->second;
            ++visited;
            if (cur == start) break;
        }
        if (visited != f.size())
            throw Error(ErrorKind::NonManifoldEdge, "vertex " + std::to_string(v) + " has more than one fan");
    }
    return m;
}

FlowerView flower(const TriMesh& mesh, int v) {
    if (v < 0 || v >= mesh.vertex_count) throw Error(ErrorKind::InvalidInput, "vertex out of range");
    if (mesh.boundary_vertex[v]) {
        Error e(ErrorKind::BoundaryVertex, "vertex " + std::to_string(v) + " lies on the boundary");
        e.where = v;
        throw e;
    }
    std::map<int, std::pair<int, int>> next;  // ring vertex -> (next ring vertex, petal)
    int first = -1;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Tri& tri = mesh.triangles[t];
        int s = mesh.slot(static_cast<int>(t), v);
        if (s < 0) continue;
        int a = tri[(s + 1) % 3], b = tri[(s + 2) % 3];
        next[a] = {b, static_cast<int>(t)};
        if (first < 0) first = a;
    }
    FlowerView fv;
    fv.center = v;
    int cur = first;
    do {
        auto it = next.find(cur);
        if (it == next.end() || fv.ring.size() > next.size()) {
            Error e(ErrorKind::BrokenFan, "fan around vertex " + std::to_string(v) + " does not close");
            e.where = v;
            throw e;
        }
        fv.ring.push_back(cur);
        fv.spokes.push_back(mesh.edge_id(v, cur));
        fv.petals.push_back(it->second.second);
        cur = it->second.first;
    } while (cur != first);
    if (fv.ring.size() != next.size() || fv.ring.size() < 3) {
        Error e(ErrorKind::BrokenFan, "fan around vertex " + std::to_string(v) + " is not a single cycle");
        e.where = v;
        throw e;
    }
    return fv;
}

namespace {

// Orientation sign with a relative dead zone.
int orient(cplx a, cplx b, cplx c, double scale2) {
    double o = cross(b - a, c - a);
    if (o > kOrientTol * scale2) return 1;
    if (o < -kOrientTol * scale2) return -1;
    return 0;
}

bool in_closed_triangle(cplx p, const std::array<cplx, 3>& t, double scale2) {
    for (int s = 0; s < 3; ++s)
        if (orient(t[s], t[(s + 1) % 3], p, scale2) < 0) return false;
    return true;
}

bool on_segment(cplx a, cplx b, cplx p) {
    return std::min(a.real(), b.real()) <= p.real() + 1e-15 && p.real() <= std::max(a.real(), b.real()) + 1e-15 &&
           std::min(a.imag(), b.imag()) <= p.imag() + 1e-15 && p.imag() <= std::max(a.imag(), b.imag()) + 1e-15;
}

bool segments_meet(cplx a, cplx b, cplx c, cplx d, double scale2) {
    int o1 = orient(a, b, c, scale2), o2 = orient(a, b, d, scale2);
    int o3 = orient(c, d, a, scale2), o4 = orient(c, d, b, scale2);
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return o1 * o2 < 0 && o3 * o4 < 0;
}

} // namespace

bool petals_compatible(const std::array<cplx, 3>& p, const std::array<int, 3>& pi,
                       const std::array<cplx, 3>& q, const std::array<int, 3>& qi) {
    double scale2 = std::max(longest_sq(p[0], p[1], p[2]), longest_sq(q[0], q[1], q[2]));
    auto shared_in = [](int v, const std::array<int, 3>& idx) {
        return std::find(idx.begin(), idx.end(), v) != idx.end();
    };
    for (int s = 0; s < 3; ++s) {
        if (!shared_in(pi[s], qi) && in_closed_triangle(p[s], q, scale2)) return false;
        if (!shared_in(qi[s], pi) && in_closed_triangle(q[s], p, scale2)) return false;
    }
    for (int s = 0; s < 3; ++s) {
        int a = pi[s], b = pi[(s + 1) % 3];
        for (int r = 0; r < 3; ++r) {
            int c = qi[r], d = qi[(r + 1) % 3];
            if (a == c || a == d || b == c || b == d) continue;
            if (segments_meet(p[s], p[(s + 1) % 3], q[r], q[(r + 1) % 3], scale2)) return false;
        }
    }
    return true;
}

std::vector<FlowerEmbedding> is_discrete_immersion(const TriMesh& mesh, const std::vector<cplx>& positions) {
    std::vector<FlowerEmbedding> out;
    for (int v : mesh.interior_vertices()) {
        FlowerEmbedding rep;
        rep.center = v;
        FlowerView fv = flower(mesh, v);
        std::vector<std::array<cplx, 3>> pts;
        for (int t : fv.petals) {
            const Tri& tri = mesh.triangles[t];
            std::array<cplx, 3> p{positions[tri[0]], positions[tri[1]], positions[tri[2]]};
            if (is_degenerate(p[0], p[1], p[2])) {
                rep.degenerate_petal = true;
                rep.embedded = false;
            }
            int s = mesh.slot(t, v);
            cplx c = p[s], a = p[(s + 1) % 3], b = p[(s + 2) % 3];
            rep.angle_sum += std::arg((b - c) / (a - c));
            pts.push_back(p);
        }
        for (size_t x = 0; x < fv.petals.size() && rep.embedded; ++x)
            for (size_t y = x + 1; y < fv.petals.size(); ++y)
                if (!petals_compatible(pts[x], mesh.triangles[fv.petals[x]], pts[y], mesh.triangles[fv.petals[y]])) {
                    rep.embedded = false;
                    break;
                }
        out.push_back(rep);
    }
    return out;
}

bool all_embedded(const std::vector<FlowerEmbedding>& r) {
    return std::all_of(r.begin(), r.end(), [](const FlowerEmbedding& f) { return f.embedded; });
}

} // namespace thetaconf
