#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "thetaconf/crossratio.hpp"
#include "thetaconf/geom.hpp"
#include "thetaconf/trisolve.hpp"

namespace thetaconf {

struct Anchor {
    int triangle = 0;
    // Target positions of the anchor triangle's first two vertices. Unset means its
    // first edge keeps its reference placement; `raw` skips normalization entirely.
    std::optional<std::pair<cplx, cplx>> placement;
    bool raw = false;
};

enum class GlueOrder { BreadthFirst, DepthFirst };

struct LayoutResult {
    std::vector<cplx> positions;
    Anchor anchor;
    std::vector<double> per_edge_mismatch;          // by edge id, relative to the diameter
    std::vector<double> per_edge_theta_residuals;   // interior edges, mesh.interior_edges order
    std::vector<double> flower_consistency_defects; // interior vertices, gauge drift around the flower
    std::vector<FlowerEmbedding> embedded;
    double max_mismatch = 0.0;
};

LayoutResult reconstruct(const TriMesh& mesh, const std::vector<TriangleFrame>& frames,
                         const std::vector<double>& omega, double theta, const Anchor& anchor = {},
                         GlueOrder order = GlueOrder::BreadthFirst,
                         const std::vector<NuSolution>* nu = nullptr);

struct VerifyReport {
    std::vector<double> residuals;  // measured minus target, interior edges
    double max_residual = 0.0;
    std::vector<ClosingReport> closing;  // interior vertices
    double max_closing_defect = 0.0;
    std::vector<FlowerEmbedding> embedded;
    bool all_embedded = true;
    bool pass(double tol) const { return all_embedded && max_residual <= tol && max_closing_defect <= tol; }
};

// targets indexed by edge id (may be empty for zero).
VerifyReport verify_layout(const TriMesh& mesh, const std::vector<cplx>& src, const std::vector<cplx>& img,
                           double theta, const std::vector<double>& targets = {});

// Least-squares z -> a z + b taking `from` to `to`; returns (a, b, max residual).
struct SimilarityFit {
    cplx a, b;
    double max_residual;
};
SimilarityFit fit_similarity(const std::vector<cplx>& from, const std::vector<cplx>& to);

} // namespace thetaconf
