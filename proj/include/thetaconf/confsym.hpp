#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "thetaconf/crossratio.hpp"
#include "thetaconf/geom.hpp"

namespace thetaconf {

// Vertex (n, m) of a cols x rows grid has index m * cols + n. Each cell
// (n,m),(n+1,m),(n+1,m+1),(n,m+1) is split along (n,m)-(n+1,m+1).
struct GridShape {
    int cols = 0, rows = 0;
    int index(int n, int m) const { return m * cols + n; }
    int n_of(int v) const { return v % cols; }
    int m_of(int v) const { return v / cols; }
};
std::vector<Tri> grid_triangles(const GridShape& g);

// Parallel edge classes of a grid: 1 diagonal, 2 along n, 3 along m.
int grid_edge_class(const TriMesh& mesh, const GridShape& g, int e);

struct LatticeSpec {
    double alpha = 0, beta = 0, gamma = 0;
    int rows = 2, cols = 2;
    static LatticeSpec from_angles(double alpha, double beta, int rows, int cols);
    void validate() const;
};

// v(n,m) = n sin(beta) + m e2 with e1 + e2 = sin(gamma) e^{i alpha}.
TriMesh gen_lattice(const LatticeSpec& spec);

// (log Q1, log Q2, log Q3) for the diagonal, n- and m-direction classes.
std::array<cplx, 3> lattice_cross_ratios(const LatticeSpec& spec);

struct DoyleSpec {
    cplx A, B, C, D;  // convex, CCW
    int n0 = 0, m0 = 0;
    int cols = 2, rows = 2;
    bool split_ac = true;  // diagonal A-C, else B-D
};

struct Similarity {
    cplx a, b;  // z -> a z + b
    cplx operator()(cplx z) const { return a * z + b; }
    cplx power(int k, cplx z) const;  // k-fold application (negative k uses the inverse)
};

// L1: A->B, D->C. L2: A->D, B->C.
std::pair<Similarity, Similarity> doyle_similarities(const DoyleSpec& spec);
TriMesh gen_doyle(const DoyleSpec& spec);

// Angles alpha1..alpha6 of the split quad (triangle ABC: a3 at A, a1 at B, a2 at C;
// triangle ACD: a6 at A, a4 at C, a5 at D).
std::array<double, 6> doyle_angles(const DoyleSpec& spec);
// Quad with A = 0, C = 1 realizing the given angles.
DoyleSpec quad_from_angles(const std::array<double, 6>& a);

// (log q1, log q2, log q3); throws ConstraintViolation.
std::array<cplx, 3> doyle_cross_ratios(const std::array<double, 6>& a);

// Lattice whose angles match a Doyle quad at theta = pi/2.
LatticeSpec matched_lattice_pi2(const std::array<double, 6>& a, int rows, int cols);

// Finds alpha, beta with Re[e^{-i theta} log Q_k] = targets[k]. Throws Infeasible or SumConstraintViolated.
LatticeSpec solve_lattice_for_targets(const std::array<double, 3>& targets, double theta, int rows = 2, int cols = 2);

// G(alpha, beta) = (log sin b / sin a, log sin a / sin(a+b)).
std::array<double, 2> lattice_map_G(double alpha, double beta);

struct SymmetryReport {
    bool is_symmetric = false;
    double q_defect = 0.0;  // max |q_k - q_{k+3}| / |q_k|
    std::array<cplx, 6> q{};
    bool x_at_infinity = false;
    cplx X{};
    double circle_defect = 0.0;  // distance of X from C3, measured after inverting at z0
    double cr_defect = 0.0;      // max |cr(z_k, z0, z_{k+3}, X) + 1|
    bool iii_holds = false;
};

// positions: center then six ring vertices in CCW order.
SymmetryReport check_conf_symmetric_flower(const std::array<cplx, 7>& z);

struct ConfSymParams {
    cplx a, b, c;
    int extent = 10;  // vertices per side of the grid patch
};

struct CrossRatioPatch {
    GridShape grid;
    TriMesh mesh;             // combinatorics (positions are a placeholder lattice)
    std::vector<cplx> q;      // by edge id, 0 on the boundary
    std::vector<int> label;   // index of a_n / b_l / c_m per edge id
    std::vector<int> family;  // 0 a, 1 b, 2 c per edge id
    int origin = 0;           // grid coordinates are shifted by this before labeling
};

// a_n = a (abc)^{n-1}, b_l = b (abc)^{l-1}, c_m = c (abc)^{m-1}. With (n, m) measured from
// (origin, origin): n-direction edges in row m carry a_{1-m}, m-direction edges in column n
// carry b_n, diagonals from (n,m) carry c_{1-n+m}. The flowers at (0,0), (1,0), (1,1) carry
// (a, c, 1/ac), (a, b, 1/ab), (c, b, 1/bc).
CrossRatioPatch confsym_field(const ConfSymParams& p);

// Principal log moved to the branch with imaginary part in (0, 2 pi).
cplx log_branch(cplx q);

struct GrowthFailure {
    int vertex = -1;
    std::string kind;  // non_closing, non_embedded, degenerate
    double defect = 0.0;
};

struct GrowResult {
    std::vector<cplx> positions;
    std::vector<char> placed;
    int triangles_placed = 0;
    bool complete = false;
    std::vector<GrowthFailure> failures;
};

// Grows positions triangle by triangle (breadth first) from the flower around `seed_center`.
// seed holds the center followed by its ring; empty means rebuild the flower from q
// (symmetric flowers get ring[k+3] = -ring[k] about a center at 0).
GrowResult grow_from_q(const TriMesh& mesh, const std::vector<cplx>& q, int seed_center,
                       const std::vector<cplx>& seed = {}, double tol = 1e-9);

struct ConfSymGrowth {
    CrossRatioPatch patch;
    GrowResult growth;
    int seed_vertex = -1;
};

// Grows the patch from the symmetric flower at seed_vertex (-1: the origin) whose involution
// is a point reflection. The recursion runs in quad precision: extending from one flower
// amplifies rounding by a fixed factor per ring.
ConfSymGrowth grow_confsym(const ConfSymParams& p, int seed_vertex = -1, double tol = 1e-9);

// Quadratic-differential family of generalized Doyle spirals.
std::array<cplx, 3> doyle_family(const std::array<cplx, 3>& logQ, cplx a, cplx b, cplx c, double theta, double t);

// Least-squares fit of per-vertex log scale factors u ~ A n + B m + C (diagnostic).
struct ScaleFit {
    double A, B, C, rms;
};
ScaleFit fit_log_scale_factors(const TriMesh& mesh, const GridShape& g, const std::vector<cplx>& src,
                               const std::vector<cplx>& img);

} // namespace thetaconf
