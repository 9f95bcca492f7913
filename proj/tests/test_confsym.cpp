#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thetaconf/confsym.hpp"
#include "thetaconf/crossratio.hpp"
#include "thetaconf/moebius.hpp"

using namespace thetaconf;
using std::numbers::pi;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidInput;
}

const cplx kI(0.0, 1.0);

// Class value spread and mean of q over one parallel class.
struct ClassStats {
    cplx mean = 0.0;
    double spread = 0.0;
};

std::array<ClassStats, 3> class_stats(const TriMesh& m, const GridShape& g) {
    std::array<std::vector<cplx>, 3> v;
    for (int e : m.interior_edges) v[grid_edge_class(m, g, e) - 1].push_back(edge_cross_ratio(m, m.positions, e));
    std::array<ClassStats, 3> out;
    for (int k = 0; k < 3; ++k) {
        REQUIRE_FALSE(v[k].empty());
        out[k].mean = v[k][0];
        for (cplx q : v[k]) out[k].spread = std::max(out[k].spread, std::abs(q - v[k][0]) / std::abs(v[k][0]));
    }
    return out;
}

DoyleSpec doyle_fixture(int extent) {
    DoyleSpec s;
    s.A = 1.0;
    s.B = cplx(2.0, 0.3);
    s.D = std::polar(1.4, 23.0 * pi / 180.0);
    s.C = s.B * s.D;
    s.cols = s.rows = extent;
    s.n0 = s.m0 = -extent / 2;
    return s;
}

std::array<double, 6> random_doyle_angles(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.35, 1.2);
    for (;;) {
        std::array<double, 6> a;
        a[0] = u(rng), a[1] = u(rng), a[2] = pi - a[0] - a[1];
        a[3] = u(rng), a[4] = u(rng), a[5] = pi - a[3] - a[4];
        if (a[2] > 0.2 && a[5] > 0.2 && a[2] + a[5] < pi - 0.2 && a[1] + a[3] < pi - 0.2) return a;
    }
}

// Aligns `got` to `want` with the Moebius map fixed by three vertices.
double moebius_aligned_error(const std::vector<cplx>& want, const std::vector<cplx>& got, int i, int j, int k) {
    auto M = MoebiusMap::from_three_points(got[i], got[j], got[k], want[i], want[j], want[k]);
    double err = 0.0;
    for (size_t v = 0; v < want.size(); ++v) err = std::max(err, std::abs(M(got[v]) - want[v]));
    return err;
}

} // namespace

TEST_CASE("lattice cross ratios match the generated lattice") {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(0.3, 1.4);
    for (int it = 0; it < 20; ++it) {
        double a = u(rng), b = u(rng);
        if (a + b > pi - 0.3) continue;
        LatticeSpec s = LatticeSpec::from_angles(a, b, 5, 6);
        TriMesh m = gen_lattice(s);
        GridShape g{s.cols, s.rows};
        auto lq = lattice_cross_ratios(s);
        CHECK(std::abs(lq[0] + lq[1] + lq[2] - 2 * pi * kI) < 1e-12);
        for (int e : m.interior_edges) {
            cplx meas = edge_log_cross_ratio(m, m.positions, e);
            CHECK(std::abs(meas - lq[grid_edge_class(m, g, e) - 1]) < 1e-10);
        }
    }
}

TEST_CASE("equilateral and right isoceles lattices") {
    auto eq = lattice_cross_ratios(LatticeSpec::from_angles(pi / 3, pi / 3, 3, 3));
    for (cplx l : eq) CHECK(std::abs(l - 2 * pi / 3 * kI) < 1e-14);
    LatticeSpec r = LatticeSpec::from_angles(pi / 2, pi / 4, 3, 3);
    auto lq = lattice_cross_ratios(r);
    CHECK(std::abs(lq[1] - cplx(std::log(2.0), pi / 2)) < 1e-14);
    TriMesh m = gen_lattice(r);
    GridShape g{3, 3};
    for (int e : m.interior_edges)
        if (grid_edge_class(m, g, e) == 2) CHECK(std::abs(edge_log_cross_ratio(m, m.positions, e) - lq[1]) < 1e-12);
    TriMesh two = gen_lattice(LatticeSpec::from_angles(pi / 3, pi / 3, 2, 2));
    CHECK(two.triangles.size() == 2);
    CHECK(two.interior_edge_count() == 1);
    CHECK(kind_of([] { gen_lattice(LatticeSpec::from_angles(2.0, 1.5, 3, 3)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("lattice triangles are congruent") {
    LatticeSpec s = LatticeSpec::from_angles(0.8, 1.3, 4, 4);
    TriMesh m = gen_lattice(s);
    std::vector<double> ref;
    for (const Tri& t : m.triangles) {
        std::vector<double> ang;
        for (int k = 0; k < 3; ++k) {
            cplx p = m.positions[t[k]], q = m.positions[t[(k + 1) % 3]], r = m.positions[t[(k + 2) % 3]];
            ang.push_back(std::arg((r - p) / (q - p)));
        }
        std::sort(ang.begin(), ang.end());
        if (ref.empty()) ref = ang;
        for (int k = 0; k < 3; ++k) CHECK(ang[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
    std::vector<double> want{0.8, 1.3, pi - 2.1};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 3; ++k) CHECK(ref[k] == doctest::Approx(want[k]).epsilon(1e-12));
}

TEST_CASE("unit square quad gives the flat lattice") {
    DoyleSpec s;
    s.A = 0.0, s.B = 1.0, s.C = cplx(1, 1), s.D = kI;
    s.cols = s.rows = 4;
    TriMesh m = gen_doyle(s);
    GridShape g{4, 4};
    auto st = class_stats(m, g);
    auto lq = lattice_cross_ratios(LatticeSpec::from_angles(pi / 4, pi / 4, 3, 3));
    std::array<cplx, 3> want{std::exp(lq[0]), std::exp(lq[1]), std::exp(lq[2])};
    for (int k = 0; k < 3; ++k) CHECK(st[k].spread < 1e-12);
    // Every class value is one of the right isoceles lattice values.
    for (int k = 0; k < 3; ++k) {
        double best = 1e9;
        for (cplx w : want) best = std::min(best, std::abs(st[k].mean - w));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("doyle spiral classes, closing and immersion") {
    DoyleSpec s = doyle_fixture(9);
    auto [L1, L2] = doyle_similarities(s);
    CHECK(std::abs(L1.a - 1.0) > 1e-3);
    CHECK(std::abs(L2.a - 1.0) > 1e-3);
    TriMesh m = gen_doyle(s);
    GridShape g{9, 9};
    auto st = class_stats(m, g);
    for (int k = 0; k < 3; ++k) CHECK(st[k].spread < 1e-10);
    CHECK(std::abs(st[0].mean * st[1].mean * st[2].mean - 1.0) < 1e-10);
    for (int v : m.interior_vertices()) {
        FlowerView f = flower(m, v);
        std::vector<cplx> q;
        for (int e : f.spokes) q.push_back(edge_cross_ratio(m, m.positions, e));
        CHECK(check_flower_closing(q).max_defect() < 1e-10);
    }
    CHECK(all_embedded(is_discrete_immersion(m, m.positions)));
}

TEST_CASE("doyle errors") {
    DoyleSpec s;
    s.A = 0.0, s.B = 1.0, s.C = cplx(0.2, 0.2), s.D = kI;
    CHECK(kind_of([&] { gen_doyle(s); }) == ErrorKind::NonConvexQuad);
    s.C = cplx(1, 1), s.D = cplx(0, -1);
    CHECK(kind_of([&] { gen_doyle(s); }) == ErrorKind::NonConvexQuad);
}

TEST_CASE("doyle cross ratios round trip through the generated spiral") {
    auto eq = doyle_cross_ratios({pi / 3, pi / 3, pi / 3, pi / 3, pi / 3, pi / 3});
    for (cplx l : eq) CHECK(std::abs(l - 2 * pi / 3 * kI) < 1e-14);
    std::mt19937 rng(8);
    for (int it = 0; it < 25; ++it) {
        auto a = random_doyle_angles(rng);
        auto lq = doyle_cross_ratios(a);
        CHECK(std::abs(lq[0] + lq[1] + lq[2] - 2 * pi * kI) < 1e-12);
        DoyleSpec s = quad_from_angles(a);
        auto back = doyle_angles(s);
        for (int k = 0; k < 6; ++k) CHECK(back[k] == doctest::Approx(a[k]).epsilon(1e-12));
        s.cols = s.rows = 4;
        s.n0 = s.m0 = -1;
        TriMesh m = gen_doyle(s);
        GridShape g{4, 4};
        for (int e : m.interior_edges) {
            cplx q = edge_cross_ratio(m, m.positions, e);
            cplx want = std::exp(lq[grid_edge_class(m, g, e) - 1]);
            CHECK(std::abs(q - want) < 1e-10 * std::abs(want));
        }
    }
}

TEST_CASE("doyle cross ratio constraints") {
    CHECK(kind_of([] { doyle_cross_ratios({1.0, 1.0, 1.0, pi / 3, pi / 3, pi / 3}); }) == ErrorKind::ConstraintViolation);
    CHECK(kind_of([] { doyle_cross_ratios({0.3, 0.3, pi - 0.6, 0.3, 0.3, pi - 0.6}); }) ==
          ErrorKind::ConstraintViolation);
}

TEST_CASE("lattice target solve") {
    SUBCASE("equilateral fixed point") {
        LatticeSpec s = solve_lattice_for_targets({2 * pi / 3, 2 * pi / 3, 2 * pi / 3}, pi / 2);
        CHECK(s.alpha == doctest::Approx(pi / 3));
        CHECK(s.beta == doctest::Approx(pi / 3));
        CHECK(s.gamma == doctest::Approx(pi / 3));
    }
    SUBCASE("recovers random lattices") {
        std::mt19937 rng(4);
        std::uniform_real_distribution<double> u(0.5, 1.3);
        for (double th : {0.0, 0.4, 1.0, pi / 2})
            for (int it = 0; it < 8; ++it) {
                double a = u(rng), b = u(rng);
                if (a + b > pi - 0.5) continue;
                auto lq = lattice_cross_ratios(LatticeSpec::from_angles(a, b, 2, 2));
                std::array<double, 3> t;
                for (int k = 0; k < 3; ++k) t[k] = (std::polar(1.0, -th) * lq[k]).real();
                LatticeSpec s = solve_lattice_for_targets(t, th);
                auto got = lattice_cross_ratios(s);
                for (int k = 0; k < 3; ++k) CHECK(std::abs((std::polar(1.0, -th) * got[k]).real() - t[k]) < 1e-10);
            }
    }
    SUBCASE("matched lattice of a near equilateral doyle quad") {
        std::array<double, 6> a{1.0, 1.1, pi - 2.1, 1.05, 1.02, pi - 2.07};
        auto lq = doyle_cross_ratios(a);
        std::array<double, 3> t{lq[0].imag(), lq[1].imag(), lq[2].imag()};
        LatticeSpec s = solve_lattice_for_targets(t, pi / 2);
        LatticeSpec want = matched_lattice_pi2(a, 2, 2);
        CHECK(s.alpha == doctest::Approx(want.alpha).epsilon(1e-10));
        CHECK(s.beta == doctest::Approx(want.beta).epsilon(1e-10));
        CHECK(s.gamma == doctest::Approx(want.gamma).epsilon(1e-10));
        CHECK(s.gamma == doctest::Approx((a[0] + a[4]) / 2));
    }
    SUBCASE("sum constraint") {
        CHECK(kind_of([] { solve_lattice_for_targets({1.0, 1.0, 1.0}, 0.0); }) == ErrorKind::SumConstraintViolated);
    }
    SUBCASE("target outside the image") {
        // Rasterize the image of the simplex at theta = 0 and keep a point far from it.
        std::array<double, 3> t{6.0, 6.0, -12.0};
        double nearest = 1e9;
        const int N = 400;
        for (int i = 1; i < N; ++i)
            for (int j = 1; i + j < N; ++j) {
                auto lq = lattice_cross_ratios(LatticeSpec::from_angles(pi * i / N, pi * j / N, 2, 2));
                nearest = std::min(nearest, std::hypot(lq[0].real() - t[0], lq[1].real() - t[1]));
            }
        REQUIRE(nearest > 1.0);
        CHECK(kind_of([&] { solve_lattice_for_targets(t, 0.0); }) == ErrorKind::Infeasible);
    }
}

TEST_CASE("lattice map G") {
    auto g = lattice_map_G(pi / 3, pi / 3);
    CHECK(std::abs(g[0]) < 1e-15);
    CHECK(std::abs(g[1]) < 1e-15);
    auto lq = lattice_cross_ratios(LatticeSpec::from_angles(0.7, 1.1, 2, 2));
    auto h = lattice_map_G(0.7, 1.1);
    CHECK(lq[0].real() == doctest::Approx(2 * h[0]));
    CHECK(lq[1].real() == doctest::Approx(2 * h[1]));
}

TEST_CASE("conformally symmetric flowers") {
    std::array<cplx, 7> hex{0.0};
    for (int k = 0; k < 6; ++k) hex[1 + k] = std::polar(1.0, pi * k / 3);
    SymmetryReport r = check_conf_symmetric_flower(hex);
    CHECK(r.is_symmetric);
    CHECK(r.iii_holds);
    // For the centered regular flower the three circles are lines through 0 after reflection,
    // so the partner point is at infinity.
    CHECK(r.x_at_infinity);

    // Doyle flower
    DoyleSpec s = doyle_fixture(5);
    TriMesh m = gen_doyle(s);
    GridShape g{5, 5};
    FlowerView f = flower(m, g.index(2, 2));
    std::array<cplx, 7> z{m.positions[f.center]};
    for (int k = 0; k < 6; ++k) z[1 + k] = m.positions[f.ring[k]];
    SymmetryReport d = check_conf_symmetric_flower(z);
    CHECK(d.is_symmetric);
    CHECK(d.iii_holds);
    CHECK_FALSE(d.x_at_infinity);

    // One vertex moved by 1%
    z[3] += 0.01 * std::abs(z[3] - z[0]) * std::polar(1.0, 0.7);
    CHECK_FALSE(check_conf_symmetric_flower(z).is_symmetric);
}

TEST_CASE("symmetric flowers satisfy the circle condition and asymmetric ones do not") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ph(-0.25, 0.25), md(-0.2, 0.2);
    int symmetric_checked = 0, asymmetric_checked = 0;
    for (int it = 0; it < 200; ++it) {
        cplx a = std::polar(std::exp(md(rng)), 2 * pi / 3 + ph(rng));
        cplx c = std::polar(std::exp(md(rng)), 2 * pi / 3 + ph(rng));
        std::vector<cplx> q{a, c, 1.0 / (a * c), a, c, 1.0 / (a * c)};
        auto w = flower_from_q(q);
        std::array<cplx, 7> z;
        for (int k = 0; k < 7; ++k) z[k] = w[k];
        TriMesh fan = build_mesh({{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}, {0, 5, 6}, {0, 6, 1}},
                                 std::vector<cplx>(w.begin(), w.end()), false);
        if (!all_embedded(is_discrete_immersion(fan, fan.positions))) continue;
        SymmetryReport r = check_conf_symmetric_flower(z);
        CHECK(r.is_symmetric);
        CHECK(r.iii_holds);
        ++symmetric_checked;

        z[2] += 0.02 * std::abs(z[2] - z[0]) * std::polar(1.0, 2.0);
        SymmetryReport n = check_conf_symmetric_flower(z);
        CHECK_FALSE(n.is_symmetric);
        CHECK_FALSE(n.iii_holds);
        ++asymmetric_checked;
    }
    CHECK(symmetric_checked > 100);
    CHECK(asymmetric_checked > 100);
}

TEST_CASE("confsym field identities") {
    ConfSymParams p{std::polar(1.1, 2.0), std::polar(0.95, 2.2), std::polar(1.02, 2.1), 9};
    CrossRatioPatch f = confsym_field(p);
    const TriMesh& m = f.mesh;
    for (size_t e = 0; e < m.edges.size(); ++e)
        if (m.edges[e].interior() && f.label[e] == 1) {
            cplx base = f.family[e] == 0 ? p.a : f.family[e] == 1 ? p.b : p.c;
            CHECK(std::abs(f.q[e] - base) < 1e-15);
        }
    for (int v : m.interior_vertices()) {
        FlowerView fv = flower(m, v);
        REQUIRE(fv.spokes.size() == 6);
        for (int k = 0; k < 6; ++k) {
            cplx qk = f.q[fv.spokes[k]];
            CHECK(std::abs(qk - f.q[fv.spokes[(k + 3) % 6]]) < 1e-12 * std::abs(qk));
            cplx prod = qk * f.q[fv.spokes[(k + 1) % 6]] * f.q[fv.spokes[(k + 2) % 6]];
            CHECK(std::abs(prod - 1.0) < 1e-12);
        }
    }
    CHECK(kind_of([] { confsym_field({2.0, kI, kI, 5}); }) == ErrorKind::InvalidInput);
}

TEST_CASE("confsym field is constant on classes when abc is one") {
    cplx a = std::polar(1.2, 1.9), b = std::polar(0.8, 2.3);
    CrossRatioPatch f = confsym_field({a, b, 1.0 / (a * b), 8});
    std::array<cplx, 3> first{};
    std::array<bool, 3> seen{};
    for (int e : f.mesh.interior_edges) {
        int fam = f.family[e];
        if (!seen[fam]) first[fam] = f.q[e], seen[fam] = true;
        CHECK(std::abs(f.q[e] - first[fam]) < 1e-14);
    }
}

TEST_CASE("doyle parameters grow to the full patch") {
    SUBCASE("equilateral") {
        cplx w = std::polar(1.0, 2 * pi / 3);
        ConfSymGrowth r = grow_confsym({w, w, w, 20});
        CHECK(r.growth.complete);
        CHECK(r.growth.failures.empty());
        CHECK(all_embedded(is_discrete_immersion(r.patch.mesh, r.growth.positions)));
    }
    SUBCASE("spiral") {
        DoyleSpec s = doyle_fixture(5);
        auto a = doyle_angles(s);
        auto lq = doyle_cross_ratios(a);
        ConfSymParams p{std::exp(lq[1]), std::exp(lq[2]), std::exp(lq[0]), 20};
        ConfSymGrowth r = grow_confsym(p);
        CHECK(r.growth.complete);
        CHECK(r.growth.failures.empty());
        CHECK(all_embedded(is_discrete_immersion(r.patch.mesh, r.growth.positions)));
    }
}

TEST_CASE("figure parameters develop singularities") {
    cplx w = std::polar(1.0, (2.0 / 3.0 + 1.0 / 200.0) * pi);
    ConfSymGrowth r = grow_confsym({w, w, w, 30});
    CHECK_FALSE(r.growth.complete);
    REQUIRE_FALSE(r.growth.failures.empty());
    CHECK(r.growth.triangles_placed < static_cast<int>(r.patch.mesh.triangles.size()));
    CHECK(r.growth.triangles_placed > 0);
}

TEST_CASE("growth reproduces an immersion up to moebius maps") {
    LatticeSpec s = LatticeSpec::from_angles(1.0, 1.1, 10, 10);
    TriMesh lat = gen_lattice(s);
    auto M = MoebiusMap::make(1.0, 0.3, cplx(0.03, 0.02), 1.0);
    std::vector<cplx> z = apply_moebius(M, lat.positions);
    TriMesh m = build_mesh(lat.triangles, z);
    std::vector<cplx> q(m.edges.size(), 0.0);
    for (int e : m.interior_edges) q[e] = edge_cross_ratio(m, z, e);
    GridShape g{10, 10};
    int c = g.index(5, 5);
    FlowerView fv = flower(m, c);
    std::vector<cplx> seed{z[c]};
    for (int v : fv.ring) seed.push_back(z[v]);
    GrowResult r = grow_from_q(m, q, c, seed);
    REQUIRE(r.complete);
    CHECK(moebius_aligned_error(z, r.positions, 0, 9, 99) < 1e-8);

    // Seed rebuilt from q alone
    GrowResult r2 = grow_from_q(m, q, c);
    REQUIRE(r2.complete);
    CHECK(moebius_aligned_error(z, r2.positions, 0, 9, 99) < 1e-8);
}

TEST_CASE("inconsistent seed is rejected") {
    TriMesh m = gen_lattice(LatticeSpec::from_angles(1.0, 1.1, 5, 5));
    std::vector<cplx> q(m.edges.size(), 0.0);
    for (int e : m.interior_edges) q[e] = edge_cross_ratio(m, m.positions, e);
    int c = 12;
    FlowerView fv = flower(m, c);
    std::vector<cplx> seed{m.positions[c]};
    for (int v : fv.ring) seed.push_back(m.positions[v]);
    seed[2] += 0.05;
    CHECK(kind_of([&] { grow_from_q(m, q, c, seed); }) == ErrorKind::SeedInconsistent);
}

TEST_CASE("log scale factor fit") {
    LatticeSpec s = LatticeSpec::from_angles(1.0, 1.1, 6, 6);
    TriMesh m = gen_lattice(s);
    GridShape g{6, 6};
    std::vector<cplx> img;
    for (cplx z : m.positions) img.push_back(cplx(1.5, 2.0) * z + 3.0);
    ScaleFit f = fit_log_scale_factors(m, g, m.positions, img);
    CHECK(std::abs(f.A) < 1e-12);
    CHECK(std::abs(f.B) < 1e-12);
    CHECK(f.C == doctest::Approx(std::log(2.5)));
    CHECK(f.rms < 1e-12);

    // One step along n is the similarity L1.
    DoyleSpec d = doyle_fixture(6);
    auto [L1, L2] = doyle_similarities(d);
    TriMesh sp = gen_doyle(d);
    d.n0 += 1;
    ScaleFit h = fit_log_scale_factors(sp, g, sp.positions, gen_doyle(d).positions);
    CHECK(std::abs(h.A) < 1e-12);
    CHECK(std::abs(h.B) < 1e-12);
    CHECK(h.C == doctest::Approx(std::log(std::abs(L1.a))));
}

TEST_CASE("doyle family") {
    auto lq = lattice_cross_ratios(LatticeSpec::from_angles(1.0, 1.2, 2, 2));
    cplx a = std::polar(1.3, 2.0), b = std::polar(0.9, 1.8), c = std::polar(1.1, 2.4);
    for (double th : {0.0, 0.6, pi / 2}) {
        auto q0 = doyle_family(lq, a, b, c, th, 0.0);
        for (int k = 0; k < 3; ++k) CHECK(std::abs(q0[k] - std::exp(lq[k])) < 1e-12 * std::abs(q0[k]));
        for (double t : {0.3, 1.0, 2.5}) {
            auto qt = doyle_family(lq, a, b, c, th, t);
            for (int k = 0; k < 3; ++k) {
                cplx l = lq[k] + std::log(qt[k] / std::exp(lq[k]));
                CHECK(std::abs(theta_residual(lq[k], l, th)) < 1e-12);
            }
        }
        const double h = 1e-6;
        auto qp = doyle_family(lq, a, b, c, th, h), qm = doyle_family(lq, a, b, c, th, -h);
        for (int k = 0; k < 3; ++k) {
            cplx d = std::log(qp[k] / qm[k]) / (2 * h);
            cplx dir = kI * std::polar(1.0, th);
            CHECK(std::abs((d / dir).imag()) < 1e-6 * std::max(1.0, std::abs(d)));
        }
    }
    auto bad = lq;
    bad[0] += 0.1;
    CHECK(kind_of([&] { doyle_family(bad, a, b, c, 0.0, 0.0); }) == ErrorKind::ProductConstraintViolated);
}
