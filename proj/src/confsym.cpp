#include "thetaconf/confsym.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <deque>
#include <numbers>

#include <Eigen/Dense>

#include "thetaconf/moebius.hpp"

namespace thetaconf {

using std::numbers::pi;

namespace {

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

cplx ipow(cplx a, int k) {
    if (k < 0) return 1.0 / ipow(a, -k);
    cplx r = 1.0;
    while (k) {
        if (k & 1) r *= a;
        a *= a;
        k >>= 1;
    }
    return r;
}

TriMesh grid_mesh(const GridShape& g, const std::vector<cplx>& pos, bool check_area) {
    return build_mesh(grid_triangles(g), pos, check_area);
}

} // namespace

std::vector<Tri> grid_triangles(const GridShape& g) {
    std::vector<Tri> tris;
    for (int m = 0; m + 1 < g.rows; ++m)
        for (int n = 0; n + 1 < g.cols; ++n) {
            int a = g.index(n, m), b = g.index(n + 1, m), c = g.index(n + 1, m + 1), d = g.index(n, m + 1);
            tris.push_back({a, b, c});
            tris.push_back({a, c, d});
        }
    return tris;
}

int grid_edge_class(const TriMesh& mesh, const GridShape& g, int e) {
    const Edge& ed = mesh.edges[e];
    int dn = g.n_of(ed.b) - g.n_of(ed.a), dm = g.m_of(ed.b) - g.m_of(ed.a);
    if (dm == 0) return 2;
    if (dn == 0) return 3;
    return 1;
}

LatticeSpec LatticeSpec::from_angles(double alpha, double beta, int rows, int cols) {
    LatticeSpec s;
    s.alpha = alpha;
    s.beta = beta;
    s.gamma = pi - alpha - beta;
    s.rows = rows;
    s.cols = cols;
    return s;
}

void LatticeSpec::validate() const {
    for (double a : {alpha, beta, gamma})
        if (!(a > 0.0 && a < pi)) throw Error(ErrorKind::InvalidInput, "lattice angles must lie in (0, pi)");
    if (std::abs(alpha + beta + gamma - pi) > 1e-12) throw Error(ErrorKind::InvalidInput, "lattice angles must sum to pi");
    if (rows < 2 || cols < 2) throw Error(ErrorKind::InvalidInput, "lattice needs at least 2 rows and 2 columns");
}

TriMesh gen_lattice(const LatticeSpec& s) {
    s.validate();
    GridShape g{s.cols, s.rows};
    const cplx e1 = std::sin(s.beta);
    const cplx e2 = std::polar(std::sin(s.gamma), s.alpha) - e1;
    std::vector<cplx> pos(static_cast<size_t>(s.cols) * s.rows);
    for (int m = 0; m < s.rows; ++m)
        for (int n = 0; n < s.cols; ++n) pos[g.index(n, m)] = static_cast<double>(n) * e1 + static_cast<double>(m) * e2;
    return grid_mesh(g, pos, true);
}

std::array<cplx, 3> lattice_cross_ratios(const LatticeSpec& s) {
    s.validate();
    const double sa = std::sin(s.alpha), sb = std::sin(s.beta), sg = std::sin(s.gamma);
    return {cplx(2 * std::log(sb / sa), 2 * s.gamma), cplx(2 * std::log(sa / sg), 2 * s.beta),
            cplx(2 * std::log(sg / sb), 2 * s.alpha)};
}

cplx Similarity::power(int k, cplx z) const {
    if (std::abs(a - 1.0) < 1e-15) return z + static_cast<double>(k) * b;
    cplx f = b / (1.0 - a);
    return f + ipow(a, k) * (z - f);
}

std::pair<Similarity, Similarity> doyle_similarities(const DoyleSpec& s) {
    const cplx q[4] = {s.A, s.B, s.C, s.D};
    for (int k = 0; k < 4; ++k) {
        cplx p0 = q[k], p1 = q[(k + 1) % 4], p2 = q[(k + 2) % 4];
        double scale = std::abs(p1 - p0) * std::abs(p2 - p1);
        if (!(cross(p1 - p0, p2 - p1) > 1e-12 * scale))
            throw Error(ErrorKind::NonConvexQuad, "quad A, B, C, D is not strictly convex and counterclockwise");
    }
    Similarity L1{(s.C - s.B) / (s.D - s.A), 0.0};
    L1.b = s.B - L1.a * s.A;
    Similarity L2{(s.C - s.D) / (s.B - s.A), 0.0};
    L2.b = s.D - L2.a * s.A;
    cplx lhs = L1.a * L2.b + L1.b, rhs = L2.a * L1.b + L2.b;
    double scale = std::max({std::abs(s.A), std::abs(s.B), std::abs(s.C), std::abs(s.D), 1.0});
    if (std::abs(lhs - rhs) > 1e-12 * scale)
        throw Error(ErrorKind::NonCommutingSimilarities, "L1 and L2 do not commute");
    return {L1, L2};
}

TriMesh gen_doyle(const DoyleSpec& s) {
    if (s.rows < 2 || s.cols < 2) throw Error(ErrorKind::InvalidInput, "Doyle extent needs at least 2 x 2 vertices");
    auto [L1, L2] = doyle_similarities(s);
    GridShape g{s.cols, s.rows};
    std::vector<cplx> pos(static_cast<size_t>(s.cols) * s.rows);
    for (int m = 0; m < s.rows; ++m)
        for (int n = 0; n < s.cols; ++n) pos[g.index(n, m)] = L1.power(s.n0 + n, L2.power(s.m0 + m, s.A));
    if (s.split_ac) return grid_mesh(g, pos, true);
    std::vector<Tri> tris;
    for (int m = 0; m + 1 < g.rows; ++m)
        for (int n = 0; n + 1 < g.cols; ++n) {
            int a = g.index(n, m), b = g.index(n + 1, m), c = g.index(n + 1, m + 1), d = g.index(n, m + 1);
            tris.push_back({a, b, d});
            tris.push_back({b, c, d});
        }
    return build_mesh(tris, pos, true);
}

std::array<double, 6> doyle_angles(const DoyleSpec& s) {
    auto ang = [](cplx p, cplx q, cplx r) { return std::arg((r - p) / (q - p)); };  // at p in CCW (p,q,r)
    return {ang(s.B, s.C, s.A), ang(s.C, s.A, s.B), ang(s.A, s.B, s.C),
            ang(s.C, s.D, s.A), ang(s.D, s.A, s.C), ang(s.A, s.C, s.D)};
}

DoyleSpec quad_from_angles(const std::array<double, 6>& a) {
    DoyleSpec s;
    s.A = 0.0;
    s.C = 1.0;
    s.B = std::polar(std::sin(a[1]) / std::sin(a[0]), -a[2]);
    s.D = std::polar(std::sin(a[3]) / std::sin(a[4]), a[5]);
    return s;
}

std::array<cplx, 3> doyle_cross_ratios(const std::array<double, 6>& a) {
    for (double x : a)
        if (!(x > 0.0 && x < pi)) throw Error(ErrorKind::ConstraintViolation, "angles must lie in (0, pi)");
    if (std::abs(a[0] + a[1] + a[2] - pi) > 1e-12 || std::abs(a[3] + a[4] + a[5] - pi) > 1e-12)
        throw Error(ErrorKind::ConstraintViolation, "triangle angles must sum to pi");
    if (!(a[2] + a[5] < pi) || !(a[1] + a[3] < pi))
        throw Error(ErrorKind::ConstraintViolation, "quad is not convex");
    auto s = [&](int k) { return std::sin(a[k - 1]); };
    return {cplx(std::log(s(6) / s(4) * (s(2) / s(3))), a[0] + a[4]),
            cplx(std::log(s(3) / s(1) * (s(4) / s(5))), a[1] + a[5]),
            cplx(std::log(s(5) / s(6) * (s(1) / s(2))), a[2] + a[3])};
}

LatticeSpec matched_lattice_pi2(const std::array<double, 6>& a, int rows, int cols) {
    LatticeSpec s;
    s.gamma = 0.5 * (a[0] + a[4]);
    s.beta = 0.5 * (a[1] + a[5]);
    s.alpha = 0.5 * (a[2] + a[3]);
    s.rows = rows;
    s.cols = cols;
    return s;
}

std::array<double, 2> lattice_map_G(double alpha, double beta) {
    return {std::log(std::sin(beta) / std::sin(alpha)), std::log(std::sin(alpha) / std::sin(alpha + beta))};
}

LatticeSpec solve_lattice_for_targets(const std::array<double, 3>& t, double theta, int rows, int cols) {
    const double c = std::cos(theta), s = std::sin(theta);
    if (std::abs(t[0] + t[1] + t[2] - 2 * pi * s) > 1e-9)
        throw Error(ErrorKind::SumConstraintViolated, "targets must sum to 2 pi sin(theta)");
    auto F = [&](double a, double b) {
        double g = pi - a - b;
        return std::array<double, 2>{c * 2 * std::log(std::sin(b) / std::sin(a)) + s * 2 * g - t[0],
                                     c * 2 * std::log(std::sin(a) / std::sin(g)) + s * 2 * b - t[1]};
    };
    auto inside = [](double a, double b) { return a > 0 && b > 0 && a + b < pi; };
    double a = pi / 3, b = pi / 3;
    auto r = F(a, b);
    for (int it = 0; it < 100; ++it) {
        double nr = std::hypot(r[0], r[1]);
        if (nr < 1e-13) break;
        double g = pi - a - b;
        double ca = 1 / std::tan(a), cb = 1 / std::tan(b), cg = 1 / std::tan(g);
        double j00 = -2 * c * ca - 2 * s, j01 = 2 * c * cb - 2 * s;
        double j10 = 2 * c * (ca + cg), j11 = 2 * c * cg + 2 * s;
        double det = j00 * j11 - j01 * j10;
        if (!(std::abs(det) > 1e-14)) throw Error(ErrorKind::Infeasible, "lattice map is singular at the iterate");
        double da = -(r[0] * j11 - j01 * r[1]) / det, db = -(j00 * r[1] - j10 * r[0]) / det;
        double step = 1.0;
        bool ok = false;
        for (int h = 0; h < 40; ++h, step *= 0.5) {
            double na = a + step * da, nb = b + step * db;
            if (!inside(na, nb)) continue;
            auto nr2 = F(na, nb);
            if (std::hypot(nr2[0], nr2[1]) <= (1 - 1e-4 * step) * nr) {
                a = na;
                b = nb;
                r = nr2;
                ok = true;
                break;
            }
        }
        if (!ok) break;
    }
    auto check = [&](double aa, double bb) {
        LatticeSpec sp = LatticeSpec::from_angles(aa, bb, rows, cols);
        auto lq = lattice_cross_ratios(sp);
        for (int k = 0; k < 3; ++k)
            if (std::abs((std::polar(1.0, -theta) * lq[k]).real() - t[k]) >= 1e-10) return false;
        return true;
    };
    if (!inside(a, b) || !check(a, b))
        throw Error(ErrorKind::Infeasible, "targets are outside the image of the lattice map");
    return LatticeSpec::from_angles(a, b, rows, cols);
}

SymmetryReport check_conf_symmetric_flower(const std::array<cplx, 7>& z) {
    SymmetryReport r;
    const cplx z0 = z[0];
    auto ring = [&](int k) { return z[1 + ((k % 6) + 6) % 6]; };
    for (int k = 0; k < 6; ++k) r.q[k] = cross_ratio(z0, ring(k - 1), ring(k), ring(k + 1));
    for (int k = 0; k < 3; ++k)
        r.q_defect = std::max(r.q_defect, std::abs(r.q[k] - r.q[k + 3]) / std::abs(r.q[k]));
    r.is_symmetric = r.q_defect <= 1e-9;

    // Invert at z0: circle C_k through z0, z_k, z_{k+3} becomes the line through w_k, w_{k+3}.
    std::array<cplx, 6> w;
    double scale = 0.0;
    for (int k = 0; k < 6; ++k) {
        w[k] = 1.0 / (ring(k) - z0);
        scale = std::max(scale, std::abs(w[k]));
    }
    cplx d1 = w[3] - w[0], d2 = w[4] - w[1];
    double den = cross(d1, d2);
    if (std::abs(den) <= 1e-14 * std::abs(d1) * std::abs(d2))
        throw Error(ErrorKind::DegenerateCircle, "circles C1 and C2 are tangent at the center");
    double s = cross(w[1] - w[0], d2) / den;
    cplx W = w[0] + s * d1;
    if (std::abs(W) <= 1e-12 * scale) {
        r.x_at_infinity = true;
        r.X = cplx(std::numeric_limits<double>::infinity(), 0.0);
    } else {
        r.X = z0 + 1.0 / W;
    }
    cplx d3 = w[5] - w[2];
    r.circle_defect = std::abs(cross(d3, W - w[2])) / std::abs(d3) / scale;
    for (int k = 0; k < 3; ++k) r.cr_defect = std::max(r.cr_defect, std::abs((w[k + 3] - W) / (w[k] - W) + 1.0));
    r.iii_holds = r.circle_defect <= 1e-8 && r.cr_defect <= 1e-8;
    return r;
}

cplx log_branch(cplx q) {
    cplx l = std::log(q);
    if (l.imag() <= 0.0) l += cplx(0.0, 2 * pi);
    return l;
}

CrossRatioPatch confsym_field(const ConfSymParams& p) {
    for (cplx v : {p.a, p.b, p.c})
        if (v.imag() == 0.0 && v.real() >= 0.0) throw Error(ErrorKind::InvalidInput, "a, b, c must avoid [0, inf)");
    if (p.extent < 3) throw Error(ErrorKind::InvalidInput, "extent must be at least 3");
    CrossRatioPatch out;
    out.grid = GridShape{p.extent, p.extent};
    out.origin = (p.extent - 1) / 2;
    std::vector<cplx> pos(static_cast<size_t>(p.extent) * p.extent);
    const cplx e1 = 1.0, e2 = std::polar(1.0, 2 * pi / 3);
    for (int m = 0; m < p.extent; ++m)
        for (int n = 0; n < p.extent; ++n) pos[out.grid.index(n, m)] = static_cast<double>(n) * e1 + static_cast<double>(m) * e2;
    out.mesh = grid_mesh(out.grid, pos, true);
    const cplx abc = p.a * p.b * p.c;
    const size_t E = out.mesh.edges.size();
    out.q.assign(E, 0.0);
    out.label.assign(E, 0);
    out.family.assign(E, -1);
    for (size_t e = 0; e < E; ++e) {
        const Edge& ed = out.mesh.edges[e];
        int n = out.grid.n_of(ed.a) - out.origin, m = out.grid.m_of(ed.a) - out.origin;
        int cls = grid_edge_class(out.mesh, out.grid, static_cast<int>(e));
        int fam, idx;
        cplx base;
        if (cls == 2) {
            fam = 0, idx = 1 - m, base = p.a;
        } else if (cls == 3) {
            fam = 1, idx = n, base = p.b;
        } else {
            fam = 2, idx = 1 - n + m, base = p.c;
        }
        out.family[e] = fam;
        out.label[e] = idx;
        if (ed.interior()) out.q[e] = base * ipow(abc, idx - 1);
    }
    return out;
}

namespace {

// Minimal complex arithmetic over __float128 for the growth recursion.
struct qcplx {
    __float128 re = 0, im = 0;
    qcplx() = default;
    qcplx(__float128 r, __float128 i) : re(r), im(i) {}
    qcplx(cplx z) : re(z.real()), im(z.imag()) {}
    friend qcplx operator+(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
    friend qcplx operator-(qcplx a, qcplx b) { return {a.re - b.re, a.im - b.im}; }
    friend qcplx operator-(qcplx a) { return {-a.re, -a.im}; }
    friend qcplx operator*(qcplx a, qcplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
    friend qcplx operator/(qcplx a, qcplx b) {
        __float128 d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
};

cplx to_cplx(cplx z) { return z; }
cplx to_cplx(qcplx z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }
double mag(cplx z) { return std::abs(z); }
double mag(qcplx z) { return std::abs(to_cplx(z)); }

qcplx qpow(qcplx a, int k) {
    if (k < 0) return qcplx(1, 0) / qpow(a, -k);
    qcplx r(1, 0);
    while (k) {
        if (k & 1) r = r * a;
        a = a * a;
        k >>= 1;
    }
    return r;
}

// Flower with center 0, ring[0] = 1 and ring[k+3] = -ring[k]; q0, q1 on spokes 0 and 1.
template <class C>
std::vector<C> symmetric_seed(C q0, C q1) {
    const C one(1.0, 0.0);
    C r2 = (one + q0 - q0 * q1) / (one + q0 * q1 - q0);
    C r1 = r2 * (one - q1) / (one - q1 * r2);
    return {C(0.0, 0.0), one, r1, r2, -one, -r1, -r2};
}

bool opposite_equal(const std::vector<cplx>& q) {
    if (q.size() != 6) return false;
    for (int k = 0; k < 3; ++k)
        if (std::abs(q[k] - q[k + 3]) > 1e-12 * std::abs(q[k])) return false;
    return true;
}

template <class C>
GrowResult grow_core(const TriMesh& mesh, const std::vector<C>& q, const FlowerView& fv, const std::vector<C>& seed,
                     double tol) {
    const double nan = std::nan("");
    GrowResult r;
    std::vector<C> z(mesh.vertex_count);
    r.positions.assign(mesh.vertex_count, cplx(nan, nan));
    r.placed.assign(mesh.vertex_count, 0);
    auto place = [&](int v, C p) {
        z[v] = p;
        r.positions[v] = to_cplx(p);
        r.placed[v] = 1;
    };
    place(fv.center, seed[0]);
    for (size_t k = 0; k < fv.ring.size(); ++k) place(fv.ring[k], seed[1 + k]);

    const int T = static_cast<int>(mesh.triangles.size());
    std::vector<char> tri_done(T, 0), flower_done(mesh.vertex_count, 0);
    std::vector<int> petals_left(mesh.vertex_count, 0);
    for (const Tri& t : mesh.triangles)
        for (int v : t) ++petals_left[v];
    std::deque<int> work;
    auto fail = [&](int v, const char* kind, double d) { r.failures.push_back({v, kind, d}); };

    auto check_flowers = [&](int t) {
        for (int v : mesh.triangles[t]) {
            if (--petals_left[v] != 0 || mesh.boundary_vertex[v] || flower_done[v]) continue;
            flower_done[v] = 1;
            FlowerView f = flower(mesh, v);
            for (size_t x = 0; x < f.petals.size(); ++x)
                for (size_t y = x + 1; y < f.petals.size(); ++y) {
                    const Tri& P = mesh.triangles[f.petals[x]];
                    const Tri& Q = mesh.triangles[f.petals[y]];
                    std::array<cplx, 3> pp{r.positions[P[0]], r.positions[P[1]], r.positions[P[2]]};
                    std::array<cplx, 3> qq{r.positions[Q[0]], r.positions[Q[1]], r.positions[Q[2]]};
                    if (!petals_compatible(pp, P, qq, Q)) {
                        fail(v, "non_embedded", 0.0);
                        return;
                    }
                }
        }
    };
    auto accept = [&](int t) {
        tri_done[t] = 1;
        ++r.triangles_placed;
        const Tri& tri = mesh.triangles[t];
        cplx a = r.positions[tri[0]], b = r.positions[tri[1]], c = r.positions[tri[2]];
        if (!(signed_area(a, b, c) > 0.0) || is_degenerate(a, b, c)) {
            fail(tri[0], "degenerate", signed_area(a, b, c));
            return;
        }
        check_flowers(t);
        work.push_back(t);
    };

    for (int t : fv.petals) {
        accept(t);
        if (!r.failures.empty()) return r;
    }
    const C one(1.0, 0.0);
    while (!work.empty() && r.failures.empty()) {
        int p = work.front();
        work.pop_front();
        for (int s = 0; s < 3 && r.failures.empty(); ++s) {
            int e = mesh.tri_edges[p][s];
            const Edge& ed = mesh.edges[e];
            if (!ed.interior()) continue;
            int t = ed.left == p ? ed.right : ed.left;
            if (tri_done[t]) continue;
            const C za = z[ed.a], zb = z[ed.b], known = z[mesh.apex(p, e)];
            C w;
            if (p == ed.left) {
                C R = q[e] * (known - za) / (zb - known);
                w = (za + R * zb) / (one + R);
            } else {
                C S = q[e] * (known - zb) / (za - known);
                w = (zb + S * za) / (one + S);
            }
            const int apex = mesh.apex(t, e);
            const cplx wd = to_cplx(w);
            if (!std::isfinite(wd.real()) || !std::isfinite(wd.imag())) {
                fail(apex, "degenerate", std::numeric_limits<double>::infinity());
                break;
            }
            if (r.placed[apex]) {
                double d = mag(w - z[apex]) / mag(zb - za);
                if (d > tol) {
                    fail(apex, "non_closing", d);
                    break;
                }
            } else {
                place(apex, w);
            }
            accept(t);
        }
    }
    r.complete = r.failures.empty() && r.triangles_placed == T;
    return r;
}

} // namespace

GrowResult grow_from_q(const TriMesh& mesh, const std::vector<cplx>& q, int seed_center, const std::vector<cplx>& seed,
                       double tol) {
    FlowerView fv = flower(mesh, seed_center);
    std::vector<cplx> qs;
    for (int e : fv.spokes) qs.push_back(q[e]);
    if (check_flower_closing(qs).max_defect() > tol)
        throw Error(ErrorKind::SeedInconsistent, "cross-ratios around the seed do not close");
    std::vector<cplx> sp;
    if (!seed.empty()) sp = seed;
    else if (opposite_equal(qs)) sp = symmetric_seed<cplx>(qs[0], qs[1]);
    else sp = flower_from_q(qs);
    const size_t n = fv.ring.size();
    if (sp.size() != n + 1) throw Error(ErrorKind::SeedInconsistent, "seed size does not match the flower");
    for (size_t k = 0; k < n; ++k) {
        cplx qq = cross_ratio(sp[0], sp[1 + (k + n - 1) % n], sp[1 + k], sp[1 + (k + 1) % n]);
        if (std::abs(qq - qs[k]) > 1e-9 * std::abs(qs[k]))
            throw Error(ErrorKind::SeedInconsistent, "seed flower does not match the cross-ratios");
    }
    return grow_core<cplx>(mesh, q, fv, sp, tol);
}

ConfSymGrowth grow_confsym(const ConfSymParams& p, int seed_vertex, double tol) {
    ConfSymGrowth out{confsym_field(p), {}, seed_vertex};
    const GridShape& g = out.patch.grid;
    if (out.seed_vertex < 0) out.seed_vertex = g.index(out.patch.origin, out.patch.origin);
    const TriMesh& mesh = out.patch.mesh;
    if (out.seed_vertex >= mesh.vertex_count || mesh.boundary_vertex[out.seed_vertex])
        throw Error(ErrorKind::InvalidInput, "seed must be an interior vertex of the patch");
    const qcplx abc = qcplx(p.a) * qcplx(p.b) * qcplx(p.c);
    const qcplx base[3] = {qcplx(p.a), qcplx(p.b), qcplx(p.c)};
    std::vector<qcplx> q(mesh.edges.size());
    for (size_t e = 0; e < q.size(); ++e)
        if (mesh.edges[e].interior()) q[e] = base[out.patch.family[e]] * qpow(abc, out.patch.label[e] - 1);
    FlowerView fv = flower(mesh, out.seed_vertex);
    std::vector<qcplx> seed = symmetric_seed<qcplx>(q[fv.spokes[0]], q[fv.spokes[1]]);
    for (size_t k = 0; k < 6; ++k) {
        cplx qq = cross_ratio(to_cplx(seed[0]), to_cplx(seed[1 + (k + 5) % 6]), to_cplx(seed[1 + k]),
                              to_cplx(seed[1 + (k + 1) % 6]));
        if (std::abs(qq - out.patch.q[fv.spokes[k]]) > 1e-9 * std::abs(qq))
            throw Error(ErrorKind::SeedInconsistent, "no embedded symmetric flower for these parameters");
    }
    if (std::abs(p.a * p.b * p.c - 1.0) <= 1e-12) {
        // Doyle case: send the fixed points of the step (n,m) -> (n+1,m) to 0 and infinity,
        // so that the step becomes a similarity.
        auto at = [&](int dn, int dm) {
            int v = g.index(g.n_of(out.seed_vertex) + dn, g.m_of(out.seed_vertex) + dm);
            if (v == fv.center) return to_cplx(seed[0]);
            for (size_t k = 0; k < 6; ++k)
                if (fv.ring[k] == v) return to_cplx(seed[1 + k]);
            throw Error(ErrorKind::InvalidInput, "seed flower is not a grid flower");
        };
        MoebiusMap step = MoebiusMap::from_three_points(at(-1, 0), at(0, 0), at(-1, -1), at(0, 0), at(1, 0), at(0, -1));
        const cplx a = step.a / std::sqrt(step.det()), b = step.b / std::sqrt(step.det()),
                   c = step.c / std::sqrt(step.det()), d = step.d / std::sqrt(step.det());
        const double scale = std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d);
        if (std::abs(c) > 1e-12 * scale) {
            cplx disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
            cplx f1 = (a - d + disc) / (2.0 * c), f2 = (a - d - disc) / (2.0 * c);
            if (std::abs(f1 - f2) > 1e-9 * (std::abs(f1) + std::abs(f2))) {
                const qcplx F1(f1), F2(f2), k = (seed[0] - F2) / (seed[0] - F1);
                for (qcplx& z : seed) z = k * (z - F1) / (z - F2);
            }
        } else if (std::abs(a - d) > 1e-12 * scale) {
            const qcplx F1(b / (d - a));
            for (qcplx& z : seed) z = z - F1;
        }
    }
    out.growth = grow_core<qcplx>(mesh, q, fv, seed, tol);
    return out;
}

std::array<cplx, 3> doyle_family(const std::array<cplx, 3>& logQ, cplx a, cplx b, cplx c, double theta, double t) {
    cplx prod = std::exp(logQ[0] + logQ[1] + logQ[2]);
    if (std::abs(prod - 1.0) > 1e-9) throw Error(ErrorKind::ProductConstraintViolated, "ABC must equal 1");
    for (cplx v : {a, b, c})
        if (v.imag() == 0.0 && v.real() <= 0.0) throw Error(ErrorKind::InvalidInput, "a, b, c must avoid (-inf, 0]");
    const cplx E = std::polar(1.0, theta), Ebar = std::conj(E), I(0.0, 1.0);
    const cplx la[3] = {log_branch(a), log_branch(b), log_branch(c)};
    std::array<cplx, 3> out;
    for (int k = 0; k < 3; ++k) {
        cplx rot = Ebar * logQ[k];
        out[k] = std::exp(rot.real() * E + I * E * (t * (Ebar * la[k]).imag() + (1.0 - t) * rot.imag()));
    }
    return out;
}

ScaleFit fit_log_scale_factors(const TriMesh& mesh, const GridShape& g, const std::vector<cplx>& src,
                               const std::vector<cplx>& img) {
    std::vector<double> u(mesh.vertex_count, 0.0);
    std::vector<int> cnt(mesh.vertex_count, 0);
    for (const Edge& e : mesh.edges) {
        double l = std::log(std::abs(img[e.b] - img[e.a]) / std::abs(src[e.b] - src[e.a]));
        u[e.a] += l;
        u[e.b] += l;
        ++cnt[e.a];
        ++cnt[e.b];
    }
    Eigen::MatrixXd M(mesh.vertex_count, 3);
    Eigen::VectorXd y(mesh.vertex_count);
    for (int v = 0; v < mesh.vertex_count; ++v) {
        M(v, 0) = g.n_of(v);
        M(v, 1) = g.m_of(v);
        M(v, 2) = 1.0;
        y[v] = cnt[v] ? u[v] / cnt[v] : 0.0;
    }
    Eigen::Vector3d x = M.colPivHouseholderQr().solve(y);
    double rms = std::sqrt((M * x - y).squaredNorm() / mesh.vertex_count);
    return {x[0], x[1], x[2], rms};
}

} // namespace thetaconf
