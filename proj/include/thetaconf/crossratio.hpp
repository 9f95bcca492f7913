#pragma once

#include <optional>
#include <vector>

#include "thetaconf/geom.hpp"

namespace thetaconf {

// (z1-z2)/(z2-z3) * (z3-z4)/(z4-z1)
cplx cross_ratio(cplx z1, cplx z2, cplx z3, cplx z4);

// Labels of an interior edge [i,j]: (i,j,k) is the left triangle, (i,l,j) the right one.
struct EdgeQuad {
    int i, j, k, l;
};
EdgeQuad edge_quad(const TriMesh& mesh, int e);

// q = cr(z_i, z_l, z_j, z_k). Swapping i and j swaps k and l and leaves q unchanged.
cplx edge_cross_ratio(const TriMesh& mesh, const std::vector<cplx>& z, int e);

// Sum of two half-plane logs; imaginary part in (0, 2pi).
cplx log_cross_ratio(cplx zi, cplx zl, cplx zj, cplx zk);
cplx edge_log_cross_ratio(const TriMesh& mesh, const std::vector<cplx>& z, int e);

// Re[e^{-i theta}(log q - log Q)]
double theta_residual(cplx logQ, cplx logq, double theta);

struct CrossRatioEntry {
    int edge;
    cplx q, logq;
};
// Indexed like mesh.interior_edges.
std::vector<CrossRatioEntry> cross_ratio_field(const TriMesh& mesh, const std::vector<cplx>& z);

struct ClosingReport {
    int valence = 0;
    double arg_sum = 0.0;         // should be (valence - 2) pi
    double product_defect = 0.0;  // |prod(-q) - 1|
    double alternating_defect = 0.0;  // |sum_k e_k| / max|e_k|, polygon with center at infinity
    double polygon_defect = 0.0;      // same closure measured on the rebuilt polygon incl. last edge
    double max_defect() const;
};

// q-values on the spokes of one flower in CCW order.
ClosingReport check_flower_closing(const std::vector<cplx>& q);

// Lays out a flower from its spoke cross-ratios: center at 0, ring CCW.
// Only meaningful when the closing defects are small.
std::vector<cplx> flower_from_q(const std::vector<cplx>& q);

struct ThetaConformalReport {
    std::vector<double> residuals;  // indexed like mesh.interior_edges
    double max_residual = 0.0;
    bool src_immersed = true;
    bool img_immersed = true;
    bool conformal = false;
};

ThetaConformalReport check_theta_conformal(const TriMesh& mesh, const std::vector<cplx>& src,
                                           const std::vector<cplx>& img, double theta, double tol);

struct QuadDiffReport {
    std::vector<int> vertices;
    std::vector<cplx> vertex_sum;           // sum_j q_ij
    std::vector<cplx> vertex_weighted_sum;  // sum_j q_ij / (v_i - v_j)
    std::vector<int> faces;                 // triangles whose three edges are interior
    std::vector<cplx> face_sum;
    double max_vertex_defect = 0.0;
    double max_weighted_defect = 0.0;
    double max_face_defect = 0.0;
    double max_direction_defect = 0.0;  // |Im(q / (i e^{i theta}))|, only with theta
};

// qdot is indexed by edge id; boundary entries are ignored.
QuadDiffReport check_quadratic_differential(const TriMesh& mesh, const std::vector<cplx>& qdot,
                                            std::optional<double> theta = std::nullopt);

} // namespace thetaconf
