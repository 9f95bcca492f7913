#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "thetaconf/geom.hpp"
#include "thetaconf/trisolve.hpp"

namespace thetaconf {

// All per-edge vectors are indexed by edge id.
struct OmegaField {
    std::vector<double> value;
    std::vector<char> fixed;
    std::vector<double> target;  // prescribed offset of Re[e^{-i theta}(log q - log Q)]
    bool gauge_mean = false;     // pin the mean of the free values when nothing is fixed

    // Zero field; boundary edges fixed when fix_boundary, else the mean gauge is used.
    static OmegaField zeros(const TriMesh& mesh, bool fix_boundary = true);
    std::vector<int> free_edges() const;
};

// Sum of targets over the spokes of each interior vertex (mesh.interior_vertices() order).
// A layout can only realize targets whose sums all vanish.
std::vector<double> target_vertex_sums(const TriMesh& mesh, const std::vector<double>& target);
// Least-squares projection of interior-edge targets onto the realizable subspace.
std::vector<double> project_targets(const TriMesh& mesh, const std::vector<double>& target);

struct TriangleEvent {
    int triangle = -1;
    std::string kind;
    std::string message;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> gradient_norm_history;  // max |g| per iterate
    double final_max_residual = 0.0;
    std::vector<double> per_edge_residuals;  // Xi - target on free edges, by edge id (0 elsewhere)
    std::vector<TriangleEvent> failures;
    bool converged = false;
};

// Per-triangle nu for the current omega. Throws Error(where = triangle) on failure.
std::vector<NuSolution> solve_triangles(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                        const std::vector<double>& omega, double theta,
                                        const std::vector<NuSolution>* warm = nullptr);

// Xi on every edge (boundary edges carry their single-triangle term), before targets.
std::vector<double> edge_form(const TriMesh& mesh, const std::vector<NuSolution>& nu);

// Xi - target on interior edges, ordered like mesh.interior_edges.
std::vector<double> gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                             double theta);

struct Hessian {
    Eigen::SparseMatrix<double> H;
    std::vector<int> edges;  // edge id of each row
};

// Derivative of Xi over the free edges of the field.
Hessian hessian(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field, double theta);

struct Assembly {
    std::vector<NuSolution> nu;
    std::vector<double> g;  // per edge, Xi - target
    Eigen::SparseMatrix<double> H;
    std::vector<int> free;
};

// Both kernels solve triangles independently and scatter per edge in a fixed order,
// so they agree bit for bit.
Assembly assemble(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                  double theta, const std::vector<NuSolution>* warm = nullptr, bool with_hessian = true);
namespace serial {
Assembly assemble(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                  double theta, const std::vector<NuSolution>* warm = nullptr, bool with_hessian = true);
}

struct MaximizeOptions {
    double tol = 1e-10;
    int max_iter = 50;
    bool parallel = true;
};

struct MaximizeResult {
    OmegaField field;
    SolveReport report;
    std::vector<NuSolution> nu;
};

// Damped Newton ascent. Throws InfeasibleTriangle for an infeasible start and
// InfeasibleStep when backtracking is exhausted; NotConverged is reported, not thrown.
MaximizeResult maximize(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const OmegaField& field,
                        double theta, const MaximizeOptions& opts = {});

// Integral of Xi along the segment from omega0 to omega1 (free edges only); a local primitive.
double functional_line_integral(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                const OmegaField& field, const std::vector<double>& omega0,
                                const std::vector<double>& omega1, double theta);

// Angles of the triangle with side lengths l12, l23, l31: (at 1, at 2, at 3).
// Outside the triangle inequalities the angle opposite the longest side is pi.
Vec3 angles_from_lengths(double l12, double l23, double l31);

// Sum rho*alpha + 2 sum L(alpha); angles from the triangle with sides e^{rho/2}.
double vhat(double rho12, double rho23, double rho31);

// -1/2 sum_T vhat(2(log|w| - omega)) - sum_e Phi_e omega_e, Phi by edge id.
double functional_value_pi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                            const std::vector<double>& omega, const std::vector<double>& Phi);
std::vector<double> functional_gradient_pi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                            const std::vector<double>& omega, const std::vector<double>& Phi);

// Opposite-angle sums per edge (single angle on the boundary).
std::vector<double> opposite_angle_sums(const TriMesh& mesh, const std::vector<TriangleFrame>& frames);

// 2L terms plus doubled log-length terms; throws OutsideDomain.
double functional_value_0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                          const std::vector<double>& omega);
std::vector<double> functional_gradient_0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                          const std::vector<double>& omega);

struct VertexField {
    std::vector<double> u;
    std::vector<double> Theta;  // target angle sums
    std::vector<double> Phi;    // exterior intersection angles by edge id
    static VertexField zeros(const TriMesh& mesh, const std::vector<TriangleFrame>& frames);
};

// Per interior vertex (order of mesh.interior_vertices()): sum over petals of xi_{j+1} - xi_j.
std::vector<double> vertex_gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                    const VertexField& vf, double theta);

double energy_E0(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const VertexField& vf);
// (angle sum - Theta)/2 per vertex.
std::vector<double> energy_E0_gradient(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                                       const VertexField& vf);

double energy_Epi2(const TriMesh& mesh, const std::vector<TriangleFrame>& frames, const VertexField& vf);

} // namespace thetaconf
