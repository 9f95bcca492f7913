#include "thetaconf/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thetaconf {

using std::numbers::pi;

cplx cross_ratio(cplx z1, cplx z2, cplx z3, cplx z4) {
    const cplx z[4] = {z1, z2, z3, z4};
    double diam = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) diam = std::max(diam, std::abs(z[a] - z[b]));
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            if (!(std::abs(z[a] - z[b]) > 1e-12 * diam)) throw Error(ErrorKind::CoincidentPoints, "points coincide");
    return (z1 - z2) / (z2 - z3) * ((z3 - z4) / (z4 - z1));
}

EdgeQuad edge_quad(const TriMesh& mesh, int e) {
    const Edge& ed = mesh.edges.at(e);
    if (!ed.interior()) {
        Error err(ErrorKind::BoundaryEdge, "edge [" + std::to_string(ed.a) + "," + std::to_string(ed.b) + "]");
        err.where = e;
        throw err;
    }
    return {ed.a, ed.b, mesh.apex(ed.left, e), mesh.apex(ed.right, e)};
}

cplx edge_cross_ratio(const TriMesh& mesh, const std::vector<cplx>& z, int e) {
    EdgeQuad h = edge_quad(mesh, e);
    return cross_ratio(z[h.i], z[h.l], z[h.j], z[h.k]);
}

cplx log_cross_ratio(cplx zi, cplx zl, cplx zj, cplx zk) {
    cplx r1 = (zi - zl) / (zj - zl);
    cplx r2 = (zj - zk) / (zi - zk);
    if (!(r1.imag() > 0.0) || !(r2.imag() > 0.0))
        throw Error(ErrorKind::DegenerateTriangle, "incident triangle is degenerate or clockwise");
    return std::log(r1) + std::log(r2);
}

cplx edge_log_cross_ratio(const TriMesh& mesh, const std::vector<cplx>& z, int e) {
    EdgeQuad h = edge_quad(mesh, e);
    try {
        return log_cross_ratio(z[h.i], z[h.l], z[h.j], z[h.k]);
    } catch (Error& err) {
        err.where = e;
        throw;
    }
}

double theta_residual(cplx logQ, cplx logq, double theta) {
    return (std::polar(1.0, -theta) * (logq - logQ)).real();
}

std::vector<CrossRatioEntry> cross_ratio_field(const TriMesh& mesh, const std::vector<cplx>& z) {
    std::vector<CrossRatioEntry> out;
    out.reserve(mesh.interior_edges.size());
    for (int e : mesh.interior_edges) {
        cplx lq = edge_log_cross_ratio(mesh, z, e);
        out.push_back({e, std::exp(lq), lq});
    }
    return out;
}

double ClosingReport::max_defect() const {
    return std::max({product_defect, alternating_defect, polygon_defect});
}

ClosingReport check_flower_closing(const std::vector<cplx>& q) {
    ClosingReport r;
    r.valence = static_cast<int>(q.size());
    for (cplx v : q) r.arg_sum += std::arg(v) < 0 ? std::arg(v) + 2 * pi : std::arg(v);

    if (r.valence == 6) {
        // 1 - q1 + q1q2 - ... - q1..q5, and the plain product
        cplx prod = 1.0, alt = 1.0;
        double scale = 1.0;
        for (int k = 0; k < 6; ++k) {
            prod *= q[k];
            if (k < 5) {
                alt += (k % 2 == 0 ? -1.0 : 1.0) * prod;
                scale = std::max(scale, std::abs(prod));
            }
        }
        r.product_defect = std::abs(prod - 1.0);
        r.alternating_defect = std::abs(alt) / scale;
    }

    // e_k = -q_k e_{k-1}; the polygon closes when sum e_k = 0 and e_N = e_0.
    cplx e = 1.0, sum = 0.0;
    double scale = 0.0;
    for (cplx v : q) {
        sum += e;
        scale = std::max(scale, std::abs(e));
        e *= -v;
    }
    if (r.valence != 6) r.product_defect = std::abs(e - 1.0);
    r.polygon_defect = std::abs(sum) / scale;
    return r;
}

std::vector<cplx> flower_from_q(const std::vector<cplx>& q) {
    const size_t n = q.size();
    // Ring polygon with the center sent to infinity; edge[m] = w[m+1] - w[m]
    // and q[m] = -edge[m] / edge[m-1].
    std::vector<cplx> w(n);
    std::vector<cplx> edge(n);
    edge[0] = 1.0;
    for (size_t k = 1; k < n; ++k) edge[k] = -q[k] * edge[k - 1];
    w[0] = 0.0;
    for (size_t k = 1; k < n; ++k) w[k] = w[k - 1] + edge[k - 1];
    cplx centroid = 0.0;
    for (cplx p : w) centroid += p;
    centroid /= static_cast<double>(n);
    std::vector<cplx> out(n + 1);
    out[0] = 0.0;
    for (size_t k = 0; k < n; ++k) out[k + 1] = 1.0 / (w[k] - centroid);
    return out;
}

ThetaConformalReport check_theta_conformal(const TriMesh& mesh, const std::vector<cplx>& src,
                                           const std::vector<cplx>& img, double theta, double tol) {
    ThetaConformalReport r;
    r.src_immersed = all_embedded(is_discrete_immersion(mesh, src));
    r.img_immersed = all_embedded(is_discrete_immersion(mesh, img));
    r.residuals.reserve(mesh.interior_edges.size());
    for (int e : mesh.interior_edges) {
        double res = theta_residual(edge_log_cross_ratio(mesh, src, e), edge_log_cross_ratio(mesh, img, e), theta);
        r.residuals.push_back(res);
        r.max_residual = std::max(r.max_residual, std::abs(res));
    }
    r.conformal = r.src_immersed && r.img_immersed && r.max_residual <= tol;
    return r;
}

QuadDiffReport check_quadratic_differential(const TriMesh& mesh, const std::vector<cplx>& qdot,
                                            std::optional<double> theta) {
    QuadDiffReport r;
    const auto& z = mesh.positions;
    for (int v : mesh.interior_vertices()) {
        FlowerView fv = flower(mesh, v);
        cplx s = 0.0, sw = 0.0;
        for (size_t k = 0; k < fv.ring.size(); ++k) {
            cplx qv = qdot[fv.spokes[k]];
            s += qv;
            sw += qv / (z[v] - z[fv.ring[k]]);
        }
        r.vertices.push_back(v);
        r.vertex_sum.push_back(s);
        r.vertex_weighted_sum.push_back(sw);
        r.max_vertex_defect = std::max(r.max_vertex_defect, std::abs(s));
        r.max_weighted_defect = std::max(r.max_weighted_defect, std::abs(sw));
    }
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& te = mesh.tri_edges[t];
        if (!mesh.edges[te[0]].interior() || !mesh.edges[te[1]].interior() || !mesh.edges[te[2]].interior())
            continue;
        cplx s = qdot[te[0]] + qdot[te[1]] + qdot[te[2]];
        r.faces.push_back(static_cast<int>(t));
        r.face_sum.push_back(s);
        r.max_face_defect = std::max(r.max_face_defect, std::abs(s));
    }
    if (theta) {
        cplx dir = cplx(0.0, 1.0) * std::polar(1.0, *theta);
        for (int e : mesh.interior_edges)
            r.max_direction_defect = std::max(r.max_direction_defect, std::abs((qdot[e] / dir).imag()));
    }
    return r;
}

} // namespace thetaconf
