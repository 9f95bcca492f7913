#include "thetaconf/varprin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>

#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <omp.h>

#include "thetaconf/lobachevsky.hpp"
#include "thetaconf/parallel.hpp"

namespace thetaconf {

using std::numbers::pi;

namespace {
int g_thread_limit = 0;
}

void set_thread_limit(int n) {
    g_thread_limit = n > 0 ? n : 0;
    omp_set_num_threads(g_thread_limit > 0 ? g_thread_limit : omp_get_num_procs());
}

int thread_limit() { return g_thread_limit > 0 ? g_thread_limit : omp_get_max_threads(); }

void apply_thread_env() {
    if (const char* s = std::getenv("THETACONF_THREADS")) set_thread_limit(std::atoi(s));
}

OmegaField OmegaField::zeros(const TriMesh& mesh, bool fix_boundary) {
    OmegaField f;
    const size_t n = mesh.edges.size();
    f.value.assign(n, 0.0);
    f.target.assign(n, 0.0);
    f.fixed.assign(n, 0);
    if (fix_boundary) {
        for (size_t e = 0; e < n; ++e) f.fixed[e] = !mesh.edges[e].interior();
    }
    f.gauge_mean = !fix_boundary || mesh.boundary_edge_count() == 0;
    return f;
}

std::vector<double> target_vertex_sums(const TriMesh& mesh, const std::vector<double>& target) {
    std::vector<double> out;
    for (int v : mesh.interior_vertices()) {
        double s = 0.0;
        for (int e : flower(mesh, v).spokes) s += target[e];
        out.push_back(s);
    }
    return out;
}

std::vector<double> project_targets(const TriMesh& mesh, const std::vector<double>& target) {
    const std::vector<int> iv = mesh.interior_vertices();
    std::vector<int> row(mesh.vertex_count, -1);
    for (size_t k = 0; k < iv.size(); ++k) row[iv[k]] = static_cast<int>(k);
    std::vector<double> out(target.size(), 0.0);
    for (int e : mesh.interior_edges) out[e] = target[e];
    if (iv.empty()) return out;
    // B maps edge values to vertex sums; solve (B B^T) y = B t and subtract B^T y.
    std::vector<Eigen::Triplet<double>> trip;
    for (int e : mesh.interior_edges)
        for (int v : {mesh.edges[e].a, mesh.edges[e].b})
            for (int w : {mesh.edges[e].a, mesh.edges[e].b})
                if (row[v] >= 0 && row[w] >= 0) trip.emplace_back(row[v], row[w], 1.0);
    Eigen::SparseMatrix<double> BBt(static_cast<int>(iv.size()), static_cast<int>(iv.size()));
    BBt.setFromTriplets(trip.begin(), trip.end());
    std::vector<double> sums = target_vertex_sums(mesh, out);
    Eigen::VectorXd b = Eigen::Map<Eigen::VectorXd>(sums.data(), static_cast<int>(sums.size()));
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(BBt);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::NearDegenerate, "vertex-sum system is singular");
    Eigen::VectorXd y = ldlt.solve(b);
    for (int e : mesh.interior_edges)
        for (int v : {mesh.edges[e].a, mesh.edges[e].b})
            if (row[v] >= 0) out[e] -= y[row[v]];
    return out;
}

std::vector<int> OmegaField::free_edges() const {
    std::vector<int> out;
    for (size_t e = 0; e < fixed.size(); ++e)
        if (!fixed[e]) out.push_back(static_cast<int>(e));
    return out;
}

namespace {

Vec3 local_omega(const TriMesh& mesh, int t, const std::vector<double>& omega) {
    const auto& te = mesh.tri_edges[t];
    return {omega[te[0]], omega[te[1]], omega[te[2]]};
}

struct Failure {
    int triangle = -1;
    ErrorKind kind = ErrorKind::Infeasible;
    std::string what;
};

NuSolution solve_one(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const std::vector<double>& omega,
                     double theta, const std::vector<NuSolution>* warm, int t) {
    std::optional<NuSolution> init;
    if (warm && static_cast<int>(warm->size()) > t) init = (*warm)[t];
    try {
        return solve_nu(frames[t], local_omega(mesh, t, omega), theta, init);
    } catch (const Error&) {
        if (!init) throw;
        // Warm start may sit in another basin; retry from the reference.
        return solve_nu(frames[t], local_omega(mesh, t, omega), theta);
    }
}

[[noreturn]] void rethrow(const Failure& f) {
    Error e(ErrorKind::InfeasibleTriangle,
            "triangle " + std::to_string(f.triangle) + " (" + kind_name(f.kind) + "): " + f.what);
    e.where = f.triangle;
    throw e;
}

std::vector<int> free_index(const OmegaField& field, const std::vector<int>& free) {
    std::vector<int> idx(field.value.size(), -1);
    for (size_t r = 0; r < free.size(); ++r) idx[free[r]] = static_cast<int>(r);
    return idx;
}

Eigen::SparseMatrix<double> build_hessian(const TriMesh& mesh, const std::vector<Mat3>& blocks,
                                          const std::vector<int>& idx, int n) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(blocks.size() * 9);
    for (size_t t = 0; t < blocks.size(); ++t) {
        const auto& te = mesh.tri_edges[t];
        for (int m = 0; m < 3; ++m) {
            int r = idx[te[m]];
            if (r < 0) continue;
            for (int k = 0; k < 3; ++k) {
                int c = idx[te[k]];
                if (c >= 0) trip.emplace_back(r, c, blocks[t][m][k]);
            }
        }
    }
    Eigen::SparseMatrix<double> H(n, n);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

} // namespace

std::vector<NuSolution> solve_triangles(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                        const std::vector<double>& omega, double theta,
                                        const std::vector<NuSolution>* warm) {
    const int T = static_cast<int>(mesh.triangles.size());
    std::vector<NuSolution> nu(T);
    std::vector<Failure> fail(T);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        try {
            nu[t] = solve_one(mesh, frames, omega, theta, warm, t);
        } catch (const Error& e) {
            fail[t] = {t, e.kind(), e.what()};
        }
    }
    for (const Failure& f : fail)
        if (f.triangle >= 0) rethrow(f);
    return nu;
}

std::vector<double> edge_form(const TriMesh& mesh, const std::vector<NuSolution>& nu) {
    std::vector<double> g(mesh.edges.size(), 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        Vec3 lg = local_gradient(nu[t].nu);
        for (int m = 0; m < 3; ++m) g[mesh.tri_edges[t][m]] += lg[m];
    }
    return g;
}

Assembly assemble(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                  double theta, const std::vector<NuSolution>* warm, bool with_hessian) {
    const int T = static_cast<int>(mesh.triangles.size());
    const int E = static_cast<int>(mesh.edges.size());
    Assembly a;
    a.nu.resize(T);
    std::vector<Vec3> lg(T);
    std::vector<Mat3> blocks(with_hessian ? T : 0);
    std::vector<Failure> fail(T);

#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        try {
            a.nu[t] = solve_one(mesh, frames, field.value, theta, warm, t);
            lg[t] = local_gradient(a.nu[t].nu);
            if (with_hessian) blocks[t] = local_hessian(a.nu[t].angles);
        } catch (const Error& e) {
            fail[t] = {t, e.kind(), e.what()};
        }
    }
    for (const Failure& f : fail)
        if (f.triangle >= 0) rethrow(f);

    a.g.assign(E, 0.0);
#pragma omp parallel for schedule(static)
    for (int e = 0; e < E; ++e) {
        const Edge& ed = mesh.edges[e];
        double s = 0.0;
        for (int t : {ed.left, ed.right}) {
            if (t < 0) continue;
            for (int m = 0; m < 3; ++m)
                if (mesh.tri_edges[t][m] == e) s += lg[t][m];
        }
        a.g[e] = s - field.target[e];
    }

    a.free = field.free_edges();
    if (with_hessian)
        a.H = build_hessian(mesh, blocks, free_index(field, a.free), static_cast<int>(a.free.size()));
    return a;
}

namespace serial {

Assembly assemble(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                  double theta, const std::vector<NuSolution>* warm, bool with_hessian) {
    const int T = static_cast<int>(mesh.triangles.size());
    Assembly a;
    a.nu.resize(T);
    a.g.assign(mesh.edges.size(), 0.0);
    std::vector<Mat3> blocks;
    for (int t = 0; t < T; ++t) {
        try {
            a.nu[t] = solve_one(mesh, frames, field.value, theta, warm, t);
        } catch (const Error& e) {
            rethrow({t, e.kind(), e.what()});
        }
        Vec3 lg = local_gradient(a.nu[t].nu);
        for (int m = 0; m < 3; ++m) a.g[mesh.tri_edges[t][m]] += lg[m];
        if (with_hessian) blocks.push_back(local_hessian(a.nu[t].angles));
    }
    for (size_t e = 0; e < a.g.size(); ++e) a.g[e] -= field.target[e];
    a.free = field.free_edges();
    if (with_hessian)
        a.H = build_hessian(mesh, blocks, free_index(field, a.free), static_cast<int>(a.free.size()));
    return a;
}

} // namespace serial

std::vector<double> gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                             double theta) {
    Assembly a = assemble(mesh, frames, field, theta, nullptr, false);
    std::vector<double> out;
    out.reserve(mesh.interior_edges.size());
    for (int e : mesh.interior_edges) out.push_back(a.g[e]);
    return out;
}

Hessian hessian(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field, double theta) {
    Assembly a = assemble(mesh, frames, field, theta, nullptr, true);
    for (const NuSolution& s : a.nu)
        for (double ang : s.angles)
            if (ang < 1e-8 || ang > pi - 1e-8) throw Error(ErrorKind::NearDegenerate, "image angle near 0 or pi");
    return {a.H, a.free};
}

namespace {

double max_abs_free(const std::vector<double>& g, const std::vector<int>& free) {
    double m = 0.0;
    for (int e : free) m = std::max(m, std::abs(g[e]));
    return m;
}

double norm_free(const std::vector<double>& g, const std::vector<int>& free) {
    double s = 0.0;
    for (int e : free) s += g[e] * g[e];
    return std::sqrt(s);
}

// Solves (-H) x = g, i.e. H x = -g, with a diagonal shift fallback.
// When `pin` >= 0 that row/column is dropped and x[pin] = 0.
Eigen::VectorXd newton_direction(const Eigen::SparseMatrix<double>& H, const Eigen::VectorXd& g, int pin) {
    const int n = static_cast<int>(H.rows());
    Eigen::SparseMatrix<double> M = -H;
    std::vector<int> keep;
    for (int r = 0; r < n; ++r)
        if (r != pin) keep.push_back(r);
    Eigen::SparseMatrix<double> A(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
    Eigen::VectorXd b(keep.size());
    {
        std::vector<int> pos(n, -1);
        for (size_t r = 0; r < keep.size(); ++r) pos[keep[r]] = static_cast<int>(r);
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < M.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
                if (pos[it.row()] >= 0 && pos[it.col()] >= 0) trip.emplace_back(pos[it.row()], pos[it.col()], it.value());
        A.setFromTriplets(trip.begin(), trip.end());
        for (size_t r = 0; r < keep.size(); ++r) b[r] = g[keep[r]];
    }
    double hnorm = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) s += std::abs(it.value());
        hnorm = std::max(hnorm, s);
    }
    Eigen::VectorXd x;
    double shift = 0.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::SparseMatrix<double> As = A;
        if (shift > 0.0) {
            for (int r = 0; r < As.rows(); ++r) As.coeffRef(r, r) += shift;
        }
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(As);
        if (ldlt.info() == Eigen::Success) {
            x = ldlt.solve(b);
            bool positive = (ldlt.vectorD().array() > 0.0).all();
            if (ldlt.info() == Eigen::Success && x.allFinite() && positive) break;
        }
        shift = shift == 0.0 ? 1e-12 * std::max(hnorm, 1.0) : 2.0 * shift;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (size_t r = 0; r < keep.size(); ++r) out[keep[r]] = x[r];
    return out;
}

} // namespace

MaximizeResult maximize(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field_in,
                        double theta, const MaximizeOptions& opts) {
    MaximizeResult res;
    res.field = field_in;
    OmegaField& F = res.field;
    SolveReport& rep = res.report;
    const std::vector<int> free = F.free_edges();
    const bool gauge = free.size() == F.value.size();
    if (gauge && !F.gauge_mean)
        throw Error(ErrorKind::InvalidInput, "no edge is fixed and the mean gauge is disabled");
    if (gauge && !free.empty()) {
        double mean = 0.0;
        for (int e : free) mean += F.value[e];
        mean /= static_cast<double>(free.size());
        for (int e : free) F.value[e] -= mean;
    }

    auto run = [&](const OmegaField& f, const std::vector<NuSolution>* warm, bool hess) {
        return opts.parallel ? assemble(mesh, frames, f, theta, warm, hess)
                             : serial::assemble(mesh, frames, f, theta, warm, hess);
    };

    Assembly A = run(F, nullptr, true);
    for (;;) {
        double gmax = max_abs_free(A.g, free);
        rep.gradient_norm_history.push_back(gmax);
        if (gmax <= opts.tol) {
            rep.converged = true;
            break;
        }
        if (rep.iterations >= opts.max_iter || free.empty()) break;

        Eigen::VectorXd g(free.size());
        for (size_t r = 0; r < free.size(); ++r) g[r] = A.g[free[r]];
        Eigen::VectorXd d = newton_direction(A.H, g, gauge ? 0 : -1);
        if (gauge) d.array() -= d.mean();

        const double g0 = norm_free(A.g, free);
        double step = 1.0;
        bool accepted = false, any_feasible = false;
        for (int h = 0; h <= 30; ++h, step *= 0.5) {
            OmegaField trial = F;
            for (size_t r = 0; r < free.size(); ++r) trial.value[free[r]] += step * d[r];
            try {
                Assembly B = run(trial, &A.nu, true);
                any_feasible = true;
                if (norm_free(B.g, free) <= (1.0 - 1e-4 * step) * g0) {
                    F = std::move(trial);
                    A = std::move(B);
                    accepted = true;
                    break;
                }
            } catch (const Error& e) {
                if (rep.failures.size() < 64) rep.failures.push_back({e.where, "InfeasibleTriangle", e.what()});
            }
        }
        ++rep.iterations;
        if (!accepted) {
            if (!any_feasible) {
                Error e(ErrorKind::InfeasibleStep, "line search left the feasible set in every trial");
                throw e;
            }
            break;  // stagnation: reported as not converged
        }
    }
    rep.final_max_residual = max_abs_free(A.g, free);
    rep.per_edge_residuals.assign(F.value.size(), 0.0);
    for (int e : mesh.interior_edges) rep.per_edge_residuals[e] = A.g[e];
    res.nu = std::move(A.nu);
    return res;
}

double functional_line_integral(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                const OmegaField& field, const std::vector<double>& omega0,
                                const std::vector<double>& omega1, double theta) {
    const std::vector<int> free = field.free_edges();
    std::vector<NuSolution> warm;
    auto integrand = [&](double s) {
        OmegaField f = field;
        for (size_t e = 0; e < f.value.size(); ++e) f.value[e] = omega0[e] + s * (omega1[e] - omega0[e]);
        Assembly a = assemble(mesh, frames, f, theta, warm.empty() ? nullptr : &warm, false);
        warm = a.nu;
        double v = 0.0;
        for (int e : free) v += a.g[e] * (omega1[e] - omega0[e]);
        return v;
    };
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, 8, 1e-12);
}

Vec3 angles_from_lengths(double l12, double l23, double l31) {
    // sides opposite vertex 1, 2, 3
    const double s[3] = {l23, l31, l12};
    int order[3] = {0, 1, 2};
    std::sort(order, order + 3, [&](int x, int y) { return s[x] > s[y]; });
    const double a = s[order[0]], b = s[order[1]], c = s[order[2]];
    const double p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    Vec3 ang{};
    if (!(p > 0.0)) {
        ang[order[0]] = pi;
        return ang;
    }
    const double four_area = std::sqrt(p);
    for (int v = 0; v < 3; ++v) {
        double x = s[v], y = s[(v + 1) % 3], z = s[(v + 2) % 3];
        ang[v] = std::atan2(four_area, y * y + z * z - x * x);
    }
    return ang;
}

double vhat(double rho12, double rho23, double rho31) {
    Vec3 a = angles_from_lengths(std::exp(0.5 * rho12), std::exp(0.5 * rho23), std::exp(0.5 * rho31));
    return rho23 * a[0] + rho31 * a[1] + rho12 * a[2] +
           2.0 * (lobachevsky(a[0]) + lobachevsky(a[1]) + lobachevsky(a[2]));
}

std::vector<double> opposite_angle_sums(const TriMesh& mesh, const std::vector<TriangleFrame>& frames) {
    std::vector<double> phi(mesh.edges.size(), 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int m = 0; m < 3; ++m) phi[mesh.tri_edges[t][m]] += frames[t].alpha[(m + 2) % 3];
    return phi;
}

double functional_value_pi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                            const std::vector<double>& omega, const std::vector<double>& Phi) {
    double v = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        Vec3 r;
        for (int m = 0; m < 3; ++m) r[m] = 2.0 * (std::log(std::abs(frames[t].w[m])) - omega[mesh.tri_edges[t][m]]);
        v -= 0.5 * vhat(r[0], r[1], r[2]);
    }
    for (size_t e = 0; e < mesh.edges.size(); ++e) v -= Phi[e] * omega[e];
    return v;
}

std::vector<double> functional_gradient_pi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                            const std::vector<double>& omega, const std::vector<double>& Phi) {
    std::vector<double> g(mesh.edges.size(), 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        Vec3 l;
        for (int m = 0; m < 3; ++m) l[m] = std::abs(frames[t].w[m]) * std::exp(-omega[mesh.tri_edges[t][m]]);
        Vec3 a = angles_from_lengths(l[0], l[1], l[2]);
        for (int m = 0; m < 3; ++m) g[mesh.tri_edges[t][m]] += a[(m + 2) % 3];
    }
    for (size_t e = 0; e < g.size(); ++e) g[e] -= Phi[e];
    return g;
}

namespace {

Vec3 shifted_angles_0(const TriangleFrame& f, const Vec3& om) {
    Vec3 a;
    for (int m = 0; m < 3; ++m) a[m] = f.alpha[m] + om[(m + 2) % 3] - om[m];
    return a;
}

void check_domain(const Vec3& a, int t) {
    for (double x : a)
        if (!(x > 0.0 && x < pi)) {
            Error e(ErrorKind::OutsideDomain, "shifted angle leaves (0, pi) in triangle " + std::to_string(t));
            e.where = t;
            throw e;
        }
}

} // namespace

double functional_value_0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                          const std::vector<double>& omega) {
    double v = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const TriangleFrame& f = frames[t];
        Vec3 om = local_omega(mesh, static_cast<int>(t), omega);
        Vec3 a = shifted_angles_0(f, om);
        check_domain(a, static_cast<int>(t));
        for (int m = 0; m < 3; ++m)
            v += 2.0 * lobachevsky(a[m]) + 2.0 * (om[(m + 2) % 3] - om[m]) * std::log(std::abs(f.w[(m + 1) % 3]));
    }
    return v;
}

std::vector<double> functional_gradient_0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                          const std::vector<double>& omega) {
    std::vector<double> g(mesh.edges.size(), 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const TriangleFrame& f = frames[t];
        const auto& te = mesh.tri_edges[t];
        Vec3 om = local_omega(mesh, static_cast<int>(t), omega);
        Vec3 a = shifted_angles_0(f, om);
        check_domain(a, static_cast<int>(t));
        for (int m = 0; m < 3; ++m) {
            // d/d(angle shift) of 2L(a) + 2 shift log|w_opp|
            double d = -2.0 * std::log(2.0 * std::sin(a[m])) + 2.0 * std::log(std::abs(f.w[(m + 1) % 3]));
            g[te[(m + 2) % 3]] += d;
            g[te[m]] -= d;
        }
    }
    return g;
}

VertexField VertexField::zeros(const TriMesh& mesh, const std::vector<TriangleFrame>& frames) {
    VertexField vf;
    vf.u.assign(mesh.vertex_count, 0.0);
    vf.Theta.assign(mesh.vertex_count, 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int m = 0; m < 3; ++m) vf.Theta[mesh.triangles[t][m]] += frames[t].alpha[m];
    for (int v : mesh.interior_vertices()) vf.Theta[v] = 2 * pi;
    vf.Phi = opposite_angle_sums(mesh, frames);
    return vf;
}

std::vector<double> vertex_gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                    const VertexField& vf, double theta) {
    const int T = static_cast<int>(mesh.triangles.size());
    std::vector<XiSolution> xi(T);
    std::vector<Failure> fail(T);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        const Tri& tri = mesh.triangles[t];
        try {
            xi[t] = solve_xi(frames[t], {vf.u[tri[0]], vf.u[tri[1]], vf.u[tri[2]]}, theta);
        } catch (const Error& e) {
            fail[t] = {t, e.kind(), e.what()};
        }
    }
    for (const Failure& f : fail)
        if (f.triangle >= 0) rethrow(f);
    std::vector<double> res;
    for (int v : mesh.interior_vertices()) {
        double s = 0.0;
        for (int t : flower(mesh, v).petals) {
            int k = mesh.slot(t, v);
            s += xi[t].xi[(k + 2) % 3] - xi[t].xi[(k + 1) % 3];
        }
        res.push_back(s);
    }
    return res;
}

namespace {

Vec3 scaled_rho(const TriangleFrame& f, const Tri& tri, const std::vector<double>& u) {
    Vec3 r;
    for (int m = 0; m < 3; ++m) r[m] = std::log(std::abs(f.w[m])) + 0.5 * (u[tri[m]] + u[tri[(m + 1) % 3]]);
    return r;
}

} // namespace

double energy_E0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const VertexField& vf) {
    double v = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Tri& tri = mesh.triangles[t];
        Vec3 r = scaled_rho(frames[t], tri, vf.u);
        double loglen = 0.0;
        for (int m = 0; m < 3; ++m) loglen += std::log(std::abs(frames[t].w[m]));
        double usum = vf.u[tri[0]] + vf.u[tri[1]] + vf.u[tri[2]];
        v -= 0.5 * vhat(2 * r[0], 2 * r[1], 2 * r[2]) - 0.5 * pi * (loglen + usum);
    }
    for (int i = 0; i < mesh.vertex_count; ++i) v -= 0.5 * vf.Theta[i] * vf.u[i];
    return v;
}

std::vector<double> energy_E0_gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                       const VertexField& vf) {
    std::vector<double> g(mesh.vertex_count, 0.0);
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const Tri& tri = mesh.triangles[t];
        Vec3 r = scaled_rho(frames[t], tri, vf.u);
        Vec3 a = angles_from_lengths(std::exp(r[0]), std::exp(r[1]), std::exp(r[2]));
        for (int m = 0; m < 3; ++m) g[tri[m]] += 0.5 * a[m];
    }
    for (int i = 0; i < mesh.vertex_count; ++i) g[i] -= 0.5 * vf.Theta[i];
    return g;
}

double energy_Epi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const VertexField& vf) {
    double v = 0.0;
    for (int e : mesh.interior_edges) {
        const Edge& ed = mesh.edges[e];
        int i = ed.a, j = ed.b;
        int k = mesh.apex(ed.left, e), l = mesh.apex(ed.right, e);
        double ak = frames[ed.left].alpha[mesh.slot(ed.left, k)] + 0.5 * (vf.u[j] - vf.u[i]);
        double al = frames[ed.right].alpha[mesh.slot(ed.right, l)] + 0.5 * (vf.u[i] - vf.u[j]);
        if (!(ak > 0.0 && ak < pi && al > 0.0 && al < pi)) {
            Error err(ErrorKind::OutsideDomain, "shifted angle leaves (0, pi) at edge " + std::to_string(e));
            err.where = e;
            throw err;
        }
        v += lobachevsky(ak) + lobachevsky(al);
    }
    return v;
}

} // namespace thetaconf
