#include "thetaconf/moebius.hpp"

#include <algorithm>
#include <cmath>

namespace thetaconf {

namespace {
constexpr double kDetTol = 1e-12;
constexpr double kInfTol = 1e-13;
} // namespace

MoebiusMap MoebiusMap::make(cplx a, cplx b, cplx c, cplx d) {
    double s = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(std::abs(a * d - b * c) > kDetTol * s * s))
        throw Error(ErrorKind::SingularMap, "ad - bc vanishes");
    return MoebiusMap{a, b, c, d};
}

cplx MoebiusMap::operator()(cplx z) const {
    cplx den = c * z + d;
    double scale = std::abs(c) * std::abs(z) + std::abs(d);
    if (std::abs(den) <= kInfTol * scale) throw Error(ErrorKind::PointAtInfinity, "point is sent to infinity");
    return (a * z + b) / den;
}

MoebiusMap MoebiusMap::compose(const MoebiusMap& m) const {
    return MoebiusMap{a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
}

MoebiusMap MoebiusMap::inverse() const { return MoebiusMap{d, -b, -c, a}; }

namespace {
// z1, z2, z3 -> 0, 1, inf
MoebiusMap to_standard(cplx z1, cplx z2, cplx z3) {
    return MoebiusMap::make(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1));
}
} // namespace

MoebiusMap MoebiusMap::from_three_points(cplx z1, cplx z2, cplx z3, cplx w1, cplx w2, cplx w3) {
    return to_standard(w1, w2, w3).inverse().compose(to_standard(z1, z2, z3));
}

std::vector<cplx> apply_moebius(const MoebiusMap& m, const std::vector<cplx>& positions) {
    std::vector<cplx> out;
    out.reserve(positions.size());
    for (cplx z : positions) out.push_back(m(z));
    return out;
}

} // namespace thetaconf
