#include "thetaconf/layout.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <deque>

#include "thetaconf/varprin.hpp"

namespace thetaconf {

namespace {

double diameter(const std::vector<cplx>& z) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cplx p : z) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

Vec3 gauged(const Vec3& nu, double c) { return {nu[0] + c, nu[1] + c, nu[2] + c}; }

} // namespace

LayoutResult reconstruct(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                         const std::vector<double>& omega, double theta, const Anchor& anchor, GlueOrder order,
                         const std::vector<NuSolution>* nu_in) {
    const int T = static_cast<int>(mesh.triangles.size());
    if (anchor.triangle < 0 || anchor.triangle >= T) throw Error(ErrorKind::InvalidInput, "anchor triangle out of range");
    if (anchor.placement && !(std::abs(anchor.placement->first - anchor.placement->second) > 0.0))
        throw Error(ErrorKind::AnchorDegenerate, "anchor vertices coincide");

    std::vector<NuSolution> nu;
    if (nu_in) {
        nu = *nu_in;
    } else {
        try {
            nu = solve_triangles(mesh, frames, omega, theta);
        } catch (const Error& e) {
            Error err(ErrorKind::InfeasibleTriangle, e.what());
            err.where = e.where;
            throw err;
        }
    }

    auto local_omega = [&](int t) {
        const auto& te = mesh.tri_edges[t];
        return Vec3{omega[te[0]], omega[te[1]], omega[te[2]]};
    };

    std::vector<double> gauge(T, 0.0);
    std::vector<char> placed_tri(T, 0), placed_v(mesh.vertex_count, 0);
    std::vector<cplx> z(mesh.vertex_count, 0.0);

    const int t0 = anchor.triangle;
    const Tri& a = mesh.triangles[t0];
    {
        auto ze = image_edges(frames[t0], local_omega(t0), nu[t0].nu, theta);
        z[a[0]] = mesh.positions[a[0]];
        z[a[1]] = z[a[0]] + ze[0];
        z[a[2]] = z[a[1]] + ze[1];
        for (int v : a) placed_v[v] = 1;
        placed_tri[t0] = 1;
    }

    std::deque<int> work{t0};
    while (!work.empty()) {
        int p;
        if (order == GlueOrder::BreadthFirst) {
            p = work.front();
            work.pop_front();
        } else {
            p = work.back();
            work.pop_back();
        }
        for (int mp = 0; mp < 3; ++mp) {
            int e = mesh.tri_edges[p][mp];
            const Edge& ed = mesh.edges[e];
            int t = ed.left == p ? ed.right : ed.left;
            if (t < 0 || placed_tri[t]) continue;
            int m = 0;
            while (mesh.tri_edges[t][m] != e) ++m;
            gauge[t] = nu[p].nu[mp] + gauge[p] - nu[t].nu[m];
            auto ze = image_edges(frames[t], local_omega(t), gauged(nu[t].nu, gauge[t]), theta);
            const Tri& tri = mesh.triangles[t];
            int apex = tri[(m + 2) % 3];
            if (!placed_v[apex]) {
                z[apex] = z[tri[(m + 1) % 3]] + ze[(m + 1) % 3];
                placed_v[apex] = 1;
            }
            placed_tri[t] = 1;
            work.push_back(t);
        }
    }
    for (int t = 0; t < T; ++t)
        if (!placed_tri[t]) throw Error(ErrorKind::InvalidInput, "mesh is not connected");

    // Normalization by one similarity.
    if (!anchor.raw) {
        cplx p0 = anchor.placement ? anchor.placement->first : mesh.positions[a[0]];
        cplx p1 = anchor.placement ? anchor.placement->second : mesh.positions[a[1]];
        cplx s = (p1 - p0) / (z[a[1]] - z[a[0]]);
        cplx base = z[a[0]];
        for (cplx& q : z) q = p0 + s * (q - base);
    }

    LayoutResult r;
    r.anchor = anchor;
    r.positions = z;
    const double diam = std::max(diameter(z), 1e-300);
    r.per_edge_mismatch.assign(mesh.edges.size(), 0.0);
    // Compare every triangle's own edge vectors, up to the one global similarity.
    cplx scale = 1.0;
    {
        auto ze = image_edges(frames[t0], local_omega(t0), nu[t0].nu, theta);
        scale = (z[a[1]] - z[a[0]]) / ze[0];
    }
    for (int t = 0; t < T; ++t) {
        auto ze = image_edges(frames[t], local_omega(t), gauged(nu[t].nu, gauge[t]), theta);
        const Tri& tri = mesh.triangles[t];
        for (int m = 0; m < 3; ++m) {
            cplx actual = z[tri[(m + 1) % 3]] - z[tri[m]];
            double mis = std::abs(actual - scale * ze[m]) / diam;
            int e = mesh.tri_edges[t][m];
            r.per_edge_mismatch[e] = std::max(r.per_edge_mismatch[e], mis);
            r.max_mismatch = std::max(r.max_mismatch, mis);
        }
    }

    for (int v : mesh.interior_vertices()) {
        FlowerView fv = flower(mesh, v);
        // Walk the petals; crossing spoke k+1 from petal k to petal k+1.
        double c = 0.0;
        const size_t n = fv.petals.size();
        for (size_t k = 0; k < n; ++k) {
            int P = fv.petals[k], Q = fv.petals[(k + 1) % n];
            int e = fv.spokes[(k + 1) % n];
            int mp = 0, mq = 0;
            while (mesh.tri_edges[P][mp] != e) ++mp;
            while (mesh.tri_edges[Q][mq] != e) ++mq;
            c += nu[P].nu[mp] - nu[Q].nu[mq];
        }
        r.flower_consistency_defects.push_back(std::abs(c));
    }

    r.per_edge_theta_residuals.reserve(mesh.interior_edges.size());
    for (int e : mesh.interior_edges) {
        try {
            r.per_edge_theta_residuals.push_back(
                theta_residual(edge_log_cross_ratio(mesh, mesh.positions, e), edge_log_cross_ratio(mesh, z, e), theta));
        } catch (const Error&) {
            r.per_edge_theta_residuals.push_back(std::nan(""));
        }
    }
    r.embedded = is_discrete_immersion(mesh, z);
    return r;
}

VerifyReport verify_layout(const TriMesh& mesh, const std::vector<cplx>& src, const std::vector<cplx>& img,
                           double theta, const std::vector<double>& targets) {
    VerifyReport r;
    for (int e : mesh.interior_edges) {
        double res;
        try {
            res = theta_residual(edge_log_cross_ratio(mesh, src, e), edge_log_cross_ratio(mesh, img, e), theta);
        } catch (const Error&) {
            res = std::numeric_limits<double>::infinity();
        }
        if (!targets.empty()) res -= targets[e];
        r.residuals.push_back(res);
        r.max_residual = std::max(r.max_residual, std::abs(res));
    }
    for (int v : mesh.interior_vertices()) {
        FlowerView fv = flower(mesh, v);
        std::vector<cplx> q;
        for (int e : fv.spokes) q.push_back(edge_cross_ratio(mesh, img, e));
        ClosingReport c = check_flower_closing(q);
        r.max_closing_defect = std::max(r.max_closing_defect, c.max_defect());
        r.closing.push_back(c);
    }
    r.embedded = is_discrete_immersion(mesh, img);
    r.all_embedded = all_embedded(r.embedded);
    return r;
}

SimilarityFit fit_similarity(const std::vector<cplx>& from, const std::vector<cplx>& to) {
    const size_t n = from.size();
    cplx mf = 0.0, mt = 0.0;
    for (size_t k = 0; k < n; ++k) {
        mf += from[k];
        mt += to[k];
    }
    mf /= static_cast<double>(n);
    mt /= static_cast<double>(n);
    cplx num = 0.0;
    double den = 0.0;
    for (size_t k = 0; k < n; ++k) {
        num += std::conj(from[k] - mf) * (to[k] - mt);
        den += std::norm(from[k] - mf);
    }
    cplx a = num / den, b = mt - a * mf;
    double res = 0.0;
    for (size_t k = 0; k < n; ++k) res = std::max(res, std::abs(a * from[k] + b - to[k]));
    return {a, b, res};
}

} // namespace thetaconf
