#include "thetaconf/trisolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace thetaconf {

using std::numbers::pi;

namespace {

constexpr int kMaxIter = 50;
constexpr int kMaxHalvings = 30;
constexpr double kAcceptTol = 1e-12;
constexpr double kTargetTol = 1e-15;

double wrap_pi(double a) { return std::remainder(a, 2 * pi); }

struct Closing {
    cplx r;
    cplx j0, j1;  // dR/dp0, dR/dp1
    double scale;
};

struct NewtonOut {
    double p0, p1, rel;
    int iters;
};

// Damped Newton on a complex equation in two real unknowns.
NewtonOut newton2(const std::function<Closing(double, double)>& eval, double p0, double p1) {
    Closing c = eval(p0, p1);
    double rel = std::abs(c.r) / c.scale;
    int it = 0;
    while (rel > kTargetTol && it < kMaxIter) {
        double a = c.j0.real(), b = c.j1.real(), cc = c.j0.imag(), d = c.j1.imag();
        double det = a * d - b * cc;
        if (!(std::abs(det) > 1e-300)) break;
        double d0 = (-c.r.real() * d + b * c.r.imag()) / det;
        double d1 = (-a * c.r.imag() + cc * c.r.real()) / det;
        double f0 = std::norm(c.r), step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
            Closing t = eval(p0 + step * d0, p1 + step * d1);
            if (std::isfinite(std::norm(t.r)) && std::norm(t.r) <= (1.0 - 1e-4 * step) * f0) {
                p0 += step * d0;
                p1 += step * d1;
                c = t;
                accepted = true;
                break;
            }
        }
        ++it;
        if (!accepted) break;
        double nrel = std::abs(c.r) / c.scale;
        if (nrel <= kAcceptTol && nrel >= 0.5 * rel) {
            rel = nrel;
            break;
        }
        rel = nrel;
    }
    return {p0, p1, rel, it};
}

double angle_at(const std::array<cplx, 3>& e, int m) { return std::arg(-e[(m + 2) % 3] / e[m]); }

} // namespace

TriangleFrame TriangleFrame::from_points(cplx vi, cplx vj, cplx vk) {
    TriangleFrame f;
    f.w = {vj - vi, vk - vj, vi - vk};
    for (int m = 0; m < 3; ++m) f.alpha[m] = angle_at(f.w, m);
    return f;
}

std::vector<TriangleFrame> make_frames(const TriMesh& mesh, const std::vector<cplx>& z) {
    std::vector<TriangleFrame> out;
    out.reserve(mesh.triangles.size());
    for (const Tri& t : mesh.triangles) out.push_back(TriangleFrame::from_points(z[t[0]], z[t[1]], z[t[2]]));
    return out;
}

std::array<cplx, 3> image_edges(const TriangleFrame& f, const Vec3& omega, const Vec3& nu, double theta) {
    cplx E = std::polar(1.0, theta);
    std::array<cplx, 3> z;
    for (int m = 0; m < 3; ++m) z[m] = f.w[m] * std::exp(E * cplx(nu[m], omega[m]));
    return z;
}

Vec3 image_angles(const TriangleFrame& f, const Vec3& omega, const Vec3& nu, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    Vec3 a;
    for (int m = 0; m < 3; ++m) {
        int p = (m + 2) % 3;  // other edge at vertex m
        a[m] = f.alpha[m] + c * (omega[p] - omega[m]) + s * (nu[p] - nu[m]);
    }
    return a;
}

NuSolution solve_nu(const TriangleFrame& f, const Vec3& omega_in, double theta, const std::optional<NuSolution>& init) {
    const cplx E = std::polar(1.0, theta);
    // A common shift of omega only rotates/scales the image.
    const double shift = omega_in[1];
    const Vec3 om{omega_in[0] - shift, 0.0, omega_in[2] - shift};
    auto eval = [&](double x, double y) {
        cplx t0 = f.w[0] * std::exp(E * cplx(x, om[0]));
        cplx t1 = f.w[1] * std::exp(E * cplx(0.0, om[1]));
        cplx t2 = f.w[2] * std::exp(E * cplx(y, om[2]));
        double scale = std::max({std::abs(t0), std::abs(t1), std::abs(t2)});
        return Closing{t0 + t1 + t2, E * t0, E * t2, scale};
    };
    double x0 = 0.0, y0 = 0.0;
    if (init) {
        x0 = init->nu[0] - init->nu[1];
        y0 = init->nu[2] - init->nu[1];
    }
    NewtonOut out = newton2(eval, x0, y0);
    if (!(out.rel <= kAcceptTol))
        throw Error(ErrorKind::Infeasible, "closing condition has no solution near the initial guess");

    NuSolution s;
    s.nu = {out.p0, 0.0, out.p1};
    s.iterations = out.iters;
    s.residual = out.rel;
    s.angles = image_angles(f, omega_in, s.nu, theta);
    auto z = image_edges(f, om, s.nu, theta);
    for (int m = 0; m < 3; ++m) {
        if (!(s.angles[m] > 0.0 && s.angles[m] < pi))
            throw Error(ErrorKind::DegenerateImage, "image angle leaves (0, pi)");
        if (std::abs(wrap_pi(s.angles[m] - angle_at(z, m))) > 1e-8)
            throw Error(ErrorKind::Infeasible, "solution lies on a different branch");
    }
    return s;
}

std::array<Vec3, 2> nu_jacobian(const TriangleFrame&, const Vec3&, const NuSolution& s, double) {
    for (double a : s.angles)
        if (a < 1e-8 || a > pi - 1e-8) throw Error(ErrorKind::NearDegenerate, "image angle too close to 0 or pi");
    double ci = 1.0 / std::tan(s.angles[0]), cj = 1.0 / std::tan(s.angles[1]), ck = 1.0 / std::tan(s.angles[2]);
    return {Vec3{ci, ck, -ck - ci}, Vec3{ci + cj, -cj, -ci}};
}

Mat3 local_hessian(const Vec3& angles) {
    Vec3 cot;
    for (int m = 0; m < 3; ++m) cot[m] = 1.0 / std::tan(angles[m]);
    Mat3 h{};
    for (int m = 0; m < 3; ++m) {
        int n = (m + 1) % 3;
        h[m][m] = -(cot[m] + cot[n]);
        h[m][n] = h[n][m] = cot[n];  // edges m and m+1 meet at vertex m+1
    }
    return h;
}

Vec3 local_gradient(const Vec3& nu) {
    return {nu[1] - nu[2], nu[2] - nu[0], nu[0] - nu[1]};
}

std::array<cplx, 3> image_edges_xi(const TriangleFrame& f, const Vec3& u, const Vec3& xi, double theta) {
    cplx E = std::polar(1.0, theta);
    std::array<cplx, 3> z;
    for (int m = 0; m < 3; ++m) {
        int n = (m + 1) % 3;
        z[m] = f.w[m] * std::exp(E * cplx(0.5 * (u[m] + u[n]), 0.5 * (xi[m] + xi[n])));
    }
    return z;
}

XiSolution solve_xi(const TriangleFrame& f, const Vec3& u_in, double theta, const std::optional<XiSolution>& init) {
    const cplx E = std::polar(1.0, theta);
    const double shift = (u_in[0] + u_in[1] + u_in[2]) / 3.0;
    const Vec3 u{u_in[0] - shift, u_in[1] - shift, u_in[2] - shift};
    const cplx half_i(0.0, 0.5);
    // Unknowns xi_0, xi_1 with xi_2 = 0.
    auto eval = [&](double a, double b) {
        Vec3 xi{a, b, 0.0};
        auto t = image_edges_xi(f, u, xi, theta);
        double scale = std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2])});
        // slot 0 has xi_0 + xi_1, slot 1 has xi_1 + xi_2, slot 2 has xi_2 + xi_0
        return Closing{t[0] + t[1] + t[2], E * half_i * (t[0] + t[2]), E * half_i * (t[0] + t[1]), scale};
    };
    double a0 = 0.0, b0 = 0.0;
    if (init) {
        a0 = init->xi[0] - init->xi[2];
        b0 = init->xi[1] - init->xi[2];
    }
    NewtonOut out = newton2(eval, a0, b0);
    if (!(out.rel <= kAcceptTol)) throw Error(ErrorKind::Infeasible, "vertex closing condition has no solution");
    XiSolution s;
    double mean = (out.p0 + out.p1) / 3.0;
    s.xi = {out.p0 - mean, out.p1 - mean, -mean};
    s.iterations = out.iters;
    s.residual = out.rel;
    auto z = image_edges_xi(f, u, s.xi, theta);
    for (int m = 0; m < 3; ++m) {
        // angle at vertex m moves by sin(theta)(u_{m+2}-u_{m+1})/2 + cos(theta)(xi_{m+2}-xi_{m+1})/2
        int n = (m + 1) % 3, p = (m + 2) % 3;
        double a = f.alpha[m] + 0.5 * std::sin(theta) * (u[p] - u[n]) + 0.5 * std::cos(theta) * (s.xi[p] - s.xi[n]);
        if (!(a > 0.0 && a < pi)) throw Error(ErrorKind::DegenerateImage, "image angle leaves (0, pi)");
        if (std::abs(wrap_pi(a - angle_at(z, m))) > 1e-8)
            throw Error(ErrorKind::Infeasible, "solution lies on a different branch");
    }
    return s;
}

std::array<cplx, 3> log_tau(const std::array<cplx, 3>& e) {
    std::array<cplx, 3> out;
    for (int m = 0; m < 3; ++m) out[m] = std::log(-e[(m + 2) % 3] / e[m]);
    return out;
}

std::array<cplx, 3> zeta(const std::array<cplx, 3>& ref, const std::array<cplx, 3>& img) {
    auto a = log_tau(img), b = log_tau(ref);
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

} // namespace thetaconf
