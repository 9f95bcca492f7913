#pragma once

#include <array>
#include <optional>
#include <vector>

#include "thetaconf/geom.hpp"

namespace thetaconf {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

// Reference triangle (v_i, v_j, v_k), CCW. Edge slot m joins vertex m and m+1:
// w[0] = w_ij, w[1] = w_jk, w[2] = w_ki. alpha[m] is the angle at vertex m.
struct TriangleFrame {
    std::array<cplx, 3> w{};
    Vec3 alpha{};
    static TriangleFrame from_points(cplx vi, cplx vj, cplx vk);
};

std::vector<TriangleFrame> make_frames(const TriMesh& mesh, const std::vector<cplx>& positions);
inline std::vector<TriangleFrame> make_frames(const TriMesh& mesh) { return make_frames(mesh, mesh.positions); }

struct NuSolution {
    Vec3 nu{};      // nu_ij, nu_jk, nu_ki with nu_jk = 0
    Vec3 angles{};  // image angles at i, j, k
    int iterations = 0;
    double residual = 0.0;  // closing residual relative to the largest edge term
};

// Solves w_ij e^{E(i om_ij + nu_ij)} + ... = 0 for the nu differences, E = e^{i theta}.
NuSolution solve_nu(const TriangleFrame& f, const Vec3& omega, double theta,
                    const std::optional<NuSolution>& init = std::nullopt);

// alpha_k + cos(theta)(om_jk - om_ki) + sin(theta)(nu_jk - nu_ki), cyclically.
Vec3 image_angles(const TriangleFrame& f, const Vec3& omega, const Vec3& nu, double theta);

// z_ij, z_jk, z_ki.
std::array<cplx, 3> image_edges(const TriangleFrame& f, const Vec3& omega, const Vec3& nu, double theta);

// Rows: d(nu_ij - nu_jk), d(nu_ki - nu_jk) with respect to (om_ij, om_jk, om_ki).
std::array<Vec3, 2> nu_jacobian(const TriangleFrame& f, const Vec3& omega, const NuSolution& s, double theta);

// d(nu_{m+1} - nu_{m+2}) / d om_n for edge slots m, n: the per-triangle cotan block.
Mat3 local_hessian(const Vec3& angles);

// Contribution of a triangle to the 1-form on edge slot m: nu_{m+1} - nu_{m+2}.
Vec3 local_gradient(const Vec3& nu);

struct XiSolution {
    Vec3 xi{};  // mean zero
    int iterations = 0;
    double residual = 0.0;
};

// Vertex form: edge slot m carries (u_m + u_{m+1})/2 as real and (xi_m + xi_{m+1})/2 as imaginary part.
XiSolution solve_xi(const TriangleFrame& f, const Vec3& u, double theta,
                    const std::optional<XiSolution>& init = std::nullopt);

// z_ij, z_jk, z_ki in the vertex form.
std::array<cplx, 3> image_edges_xi(const TriangleFrame& f, const Vec3& u, const Vec3& xi, double theta);

// log tau at vertices i, j, k: log(z_kj / z_ki) etc.; the three add to pi i.
std::array<cplx, 3> log_tau(const std::array<cplx, 3>& edges);
// zeta = log tau(image) - log tau(reference); the three add to 0.
std::array<cplx, 3> zeta(const std::array<cplx, 3>& ref_edges, const std::array<cplx, 3>& img_edges);

} // namespace thetaconf
