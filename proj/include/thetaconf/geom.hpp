#pragma once

#include <array>
#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "thetaconf/error.hpp"

namespace thetaconf {

using cplx = std::complex<double>;
using Tri = std::array<int, 3>;

// Undirected edge a < b. `left` is the triangle that traverses a -> b,
// `right` the one traversing b -> a; -1 marks the boundary side.
struct Edge {
    int a = -1, b = -1;
    int left = -1, right = -1;
    bool interior() const { return left >= 0 && right >= 0; }
};

class TriMesh {
public:
    int vertex_count = 0;
    std::vector<Tri> triangles;
    std::vector<cplx> positions;
    std::vector<Edge> edges;
    // tri_edges[t][m] is the edge between triangles[t][m] and triangles[t][(m+1)%3]
    std::vector<std::array<int, 3>> tri_edges;
    std::vector<int> interior_edges;
    std::vector<char> boundary_vertex;

    int edge_id(int u, int v) const;  // -1 if absent
    bool is_interior_vertex(int v) const { return !boundary_vertex[v]; }
    std::vector<int> interior_vertices() const;
    int interior_edge_count() const { return static_cast<int>(interior_edges.size()); }
    int boundary_edge_count() const { return static_cast<int>(edges.size() - interior_edges.size()); }

    // The vertex of triangle t opposite to edge e.
    int apex(int t, int e) const;
    // Local slot (0..2) of vertex v in triangle t.
    int slot(int t, int v) const;

private:
    friend TriMesh build_mesh(const std::vector<Tri>&, const std::vector<cplx>&, bool);
    std::map<std::pair<int, int>, int> edge_lookup_;
};

// Validates indices, manifoldness, orientation and (when check_area) positive area.
TriMesh build_mesh(const std::vector<Tri>& triangles, const std::vector<cplx>& positions,
                   bool check_area = true);

double signed_area(cplx a, cplx b, cplx c);
bool is_degenerate(cplx a, cplx b, cplx c);

struct FlowerView {
    int center = -1;
    std::vector<int> ring;    // CCW
    std::vector<int> spokes;  // spokes[k] = edge center-ring[k]
    std::vector<int> petals;  // petals[k] = triangle (center, ring[k], ring[k+1])
};

FlowerView flower(const TriMesh& mesh, int v);

struct FlowerEmbedding {
    int center = -1;
    bool embedded = true;
    bool degenerate_petal = false;
    double angle_sum = 0.0;  // total petal angle at the center
};

// One entry per interior vertex.
std::vector<FlowerEmbedding> is_discrete_immersion(const TriMesh& mesh, const std::vector<cplx>& positions);
bool all_embedded(const std::vector<FlowerEmbedding>& r);

// Closed-triangle overlap test for two triangles that may share vertices
// (given by index). True if they meet only in their common vertex/edge.
bool petals_compatible(const std::array<cplx, 3>& p, const std::array<int, 3>& pi,
                       const std::array<cplx, 3>& q, const std::array<int, 3>& qi);

} // namespace thetaconf
