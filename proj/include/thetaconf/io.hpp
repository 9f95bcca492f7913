#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thetaconf/confsym.hpp"
#include "thetaconf/crossratio.hpp"
#include "thetaconf/geom.hpp"
#include "thetaconf/layout.hpp"
#include "thetaconf/varprin.hpp"

namespace thetaconf::io {

using json = nlohmann::json;

// Parse errors and missing files raise InvalidInput.
json read_json_file(const std::string& path);
// Writes through a temporary file in the same directory, then renames.
void write_text_file(const std::string& path, const std::string& text);
std::string dump(const json& j);

json to_json(cplx z);
cplx complex_from_json(const json& j, const char* what);

// {"vertices":[[re,im],...],"triangles":[[i,j,k],...]}
TriMesh mesh_from_json(const json& j);
json mesh_to_json(const std::vector<cplx>& positions, const std::vector<Tri>& triangles);
json mesh_to_json(const TriMesh& mesh);

LatticeSpec lattice_params(const json& j);
DoyleSpec doyle_params(const json& j);
struct ConfSymJob {
    ConfSymParams params;
    int seed_vertex = -1;  // -1: center of the patch
};
ConfSymJob confsym_params(const json& j);

json edge_key(const TriMesh& mesh, int e);
// Entries {edge, q, logq, residual}; residual uses the reference when given.
json cross_ratio_report(const TriMesh& mesh, const std::vector<cplx>& z, const std::vector<cplx>* ref, double theta);
json closing_report(const ClosingReport& r);
json solve_report(const TriMesh& mesh, const SolveReport& r);
json verify_report(const TriMesh& mesh, const VerifyReport& r);
json grow_report(const GrowResult& r);

// Targets file: {"targets":[{"edge":[i,j],"value":t},...]}; returns values by edge id.
std::vector<double> targets_from_json(const TriMesh& mesh, const json& j);

} // namespace thetaconf::io
