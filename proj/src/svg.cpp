#include "thetaconf/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace thetaconf {

namespace {

std::string num(double x) {
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

const char* severity_color(double d) {
    if (d <= 1e-10) return "#2b8a3e";
    if (d <= 1e-6) return "#e8a33d";
    return "#c92a2a";
}

} // namespace

std::pair<cplx, double> circumcircle(cplx a, cplx b, cplx c) {
    cplx u = b - a, v = c - a;
    double d = 2.0 * (u.real() * v.imag() - u.imag() * v.real());
    if (d == 0.0) throw Error(ErrorKind::DegenerateTriangle, "collinear points have no circumcircle");
    double nu = std::norm(u), nv = std::norm(v);
    cplx o((v.imag() * nu - u.imag() * nv) / d, (u.real() * nv - v.real() * nu) / d);
    return {a + o, std::abs(o)};
}

std::string render_svg(const TriMesh& mesh, const RenderStyle& st) {
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!mesh.positions.empty()) {
        x0 = x1 = mesh.positions[0].real();
        y0 = y1 = mesh.positions[0].imag();
        for (cplx z : mesh.positions) {
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, z.imag());
            y1 = std::max(y1, z.imag());
        }
    }
    double span = std::max(x1 - x0, y1 - y0);
    double s = st.fit && span > 0 ? (st.size - 2 * st.margin) / span : 1.0;
    double w = st.fit ? (x1 - x0) * s + 2 * st.margin : st.size;
    double h = st.fit ? (y1 - y0) * s + 2 * st.margin : st.size;
    auto X = [&](cplx z) { return num(st.fit ? (z.real() - x0) * s + st.margin : z.real()); };
    auto Y = [&](cplx z) { return num(st.fit ? (y1 - z.imag()) * s + st.margin : -z.imag()); };
    const auto& P = mesh.positions;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " +
           num(w) + " " + num(h) + "\">\n";
    out += "<g fill=\"#e7eef7\" stroke=\"none\">\n";
    for (const Tri& t : mesh.triangles)
        out += "<polygon points=\"" + X(P[t[0]]) + "," + Y(P[t[0]]) + " " + X(P[t[1]]) + "," + Y(P[t[1]]) + " " +
               X(P[t[2]]) + "," + Y(P[t[2]]) + "\"/>\n";
    out += "</g>\n<g stroke=\"#1f2933\" stroke-width=\"" + num(st.stroke_width) + "\" stroke-linecap=\"round\">\n";
    for (const Edge& e : mesh.edges) {
        out += "<line x1=\"" + X(P[e.a]) + "\" y1=\"" + Y(P[e.a]) + "\" x2=\"" + X(P[e.b]) + "\" y2=\"" + Y(P[e.b]) + "\"";
        auto it = st.edge_defect.find({e.a, e.b});
        if (it != st.edge_defect.end()) out += std::string(" stroke=\"") + severity_color(std::abs(it->second)) + "\"";
        out += "/>\n";
    }
    out += "</g>\n";
    if (st.circumcircles) {
        out += "<g fill=\"none\" stroke=\"#5c7cfa\" stroke-width=\"" + num(st.stroke_width) + "\" stroke-dasharray=\"" +
               num(2 * st.stroke_width) + "," + num(3 * st.stroke_width) + "\">\n";
        for (const Tri& t : mesh.triangles) {
            auto [c, r] = circumcircle(P[t[0]], P[t[1]], P[t[2]]);
            out += "<circle cx=\"" + X(c) + "\" cy=\"" + Y(c) + "\" r=\"" + num(st.fit ? r * s : r) + "\"/>\n";
        }
        out += "</g>\n";
    }
    if (st.vertex_radius > 0) {
        out += "<g fill=\"#1f2933\">\n";
        for (cplx z : P) out += "<circle cx=\"" + X(z) + "\" cy=\"" + Y(z) + "\" r=\"" + num(st.vertex_radius) + "\"/>\n";
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace thetaconf
