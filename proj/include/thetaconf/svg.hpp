#pragma once

#include <map>
#include <string>
#include <utility>

#include "thetaconf/geom.hpp"

namespace thetaconf {

struct RenderStyle {
    double stroke_width = 1.0;
    double vertex_radius = 0.0;  // 0 hides vertices
    bool circumcircles = false;  // dotted circumcircle per triangle
    bool fit = true;             // scale the mesh into the viewport
    double size = 800.0;
    double margin = 20.0;
    // Per-edge defect magnitude keyed by (a, b) with a < b; drives the edge color.
    std::map<std::pair<int, int>, double> edge_defect;
};

// One polygon per triangle, one line per edge, in mesh order.
std::string render_svg(const TriMesh& mesh, const RenderStyle& style);

// Center and radius of the circle through a, b, c.
std::pair<cplx, double> circumcircle(cplx a, cplx b, cplx c);

} // namespace thetaconf
