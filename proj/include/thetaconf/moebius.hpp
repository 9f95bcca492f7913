#pragma once

#include <vector>

#include "thetaconf/geom.hpp"

namespace thetaconf {

struct MoebiusMap {
    cplx a{1.0}, b{0.0}, c{0.0}, d{1.0};

    static MoebiusMap make(cplx a, cplx b, cplx c, cplx d);  // throws SingularMap
    static MoebiusMap identity() { return {}; }
    // Sends z1, z2, z3 to w1, w2, w3.
    static MoebiusMap from_three_points(cplx z1, cplx z2, cplx z3, cplx w1, cplx w2, cplx w3);

    cplx operator()(cplx z) const;  // throws PointAtInfinity
    MoebiusMap compose(const MoebiusMap& inner) const;  // this after inner
    MoebiusMap inverse() const;
    cplx det() const { return a * d - b * c; }
};

std::vector<cplx> apply_moebius(const MoebiusMap& m, const std::vector<cplx>& positions);

} // namespace thetaconf
