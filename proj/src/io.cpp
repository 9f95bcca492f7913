#include "thetaconf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace thetaconf::io {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

double number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number()) bad(std::string("field '") + key + "' must be a number");
    double v = j[key].get<double>();
    if (!std::isfinite(v)) bad(std::string("field '") + key + "' must be finite");
    return v;
}

int integer(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
    return j[key].get<int>();
}

void require_object(const json& j, const char* what) {
    if (!j.is_object()) bad(std::string(what) + " must be a JSON object");
}

} // namespace

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        bad(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
        out << text;
        if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad(std::string(what) + " must be [re, im]");
    cplx z(j[0].get<double>(), j[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) bad(std::string(what) + " must be finite");
    return z;
}

TriMesh mesh_from_json(const json& j) {
    require_object(j, "mesh");
    if (!j.contains("vertices") || !j["vertices"].is_array()) bad("mesh needs a 'vertices' array");
    if (!j.contains("triangles") || !j["triangles"].is_array()) bad("mesh needs a 'triangles' array");
    std::vector<cplx> pos;
    for (const auto& v : j["vertices"]) pos.push_back(complex_from_json(v, "vertex"));
    std::vector<Tri> tris;
    for (const auto& t : j["triangles"]) {
        if (!t.is_array() || t.size() != 3) bad("triangle must be [i, j, k]");
        Tri tri;
        for (int k = 0; k < 3; ++k) {
            if (!t[k].is_number_integer()) bad("triangle indices must be integers");
            tri[k] = t[k].get<int>();
        }
        tris.push_back(tri);
    }
    if (tris.empty()) bad("mesh has no triangles");
    return build_mesh(tris, pos);
}

json mesh_to_json(const std::vector<cplx>& positions, const std::vector<Tri>& triangles) {
    json v = json::array(), t = json::array();
    for (cplx z : positions) v.push_back(to_json(z));
    for (const Tri& tri : triangles) t.push_back(json::array({tri[0], tri[1], tri[2]}));
    return json{{"vertices", v}, {"triangles", t}};
}

json mesh_to_json(const TriMesh& mesh) { return mesh_to_json(mesh.positions, mesh.triangles); }

LatticeSpec lattice_params(const json& j) {
    require_object(j, "lattice params");
    LatticeSpec s = LatticeSpec::from_angles(number(j, "alpha"), number(j, "beta"), integer(j, "rows"), integer(j, "cols"));
    s.validate();
    return s;
}

DoyleSpec doyle_params(const json& j) {
    require_object(j, "doyle params");
    DoyleSpec s;
    for (const char* k : {"A", "B", "C", "D"})
        if (!j.contains(k)) bad(std::string("doyle params need '") + k + "'");
    s.A = complex_from_json(j["A"], "A");
    s.B = complex_from_json(j["B"], "B");
    s.C = complex_from_json(j["C"], "C");
    s.D = complex_from_json(j["D"], "D");
    if (!j.contains("extent")) bad("doyle params need 'extent'");
    const json& ex = j["extent"];
    if (ex.is_number_integer()) {
        s.cols = s.rows = ex.get<int>();
    } else if (ex.is_array() && ex.size() == 2 && ex[0].is_number_integer() && ex[1].is_number_integer()) {
        s.cols = ex[0].get<int>();
        s.rows = ex[1].get<int>();
    } else {
        bad("'extent' must be an integer or [cols, rows]");
    }
    if (s.cols < 2 || s.rows < 2) bad("'extent' must be at least 2");
    if (j.contains("origin")) {
        const json& o = j["origin"];
        if (!o.is_array() || o.size() != 2 || !o[0].is_number_integer() || !o[1].is_number_integer())
            bad("'origin' must be [n0, m0]");
        s.n0 = o[0].get<int>();
        s.m0 = o[1].get<int>();
    }
    if (j.contains("split")) {
        if (j["split"] == "AC") s.split_ac = true;
        else if (j["split"] == "BD") s.split_ac = false;
        else bad("'split' must be \"AC\" or \"BD\"");
    }
    return s;
}

ConfSymJob confsym_params(const json& j) {
    require_object(j, "confsym params");
    ConfSymJob job;
    for (const char* k : {"a", "b", "c"})
        if (!j.contains(k)) bad(std::string("confsym params need '") + k + "'");
    job.params.a = complex_from_json(j["a"], "a");
    job.params.b = complex_from_json(j["b"], "b");
    job.params.c = complex_from_json(j["c"], "c");
    job.params.extent = integer(j, "extent");
    if (job.params.extent < 3) bad("'extent' must be at least 3");
    for (cplx v : {job.params.a, job.params.b, job.params.c})
        if (v.imag() == 0.0 && v.real() >= 0.0) bad("a, b, c must avoid [0, inf)");
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (s.is_number_integer()) {
            job.seed_vertex = s.get<int>();
        } else if (s.is_array() && s.size() == 2 && s[0].is_number_integer() && s[1].is_number_integer()) {
            job.seed_vertex = s[1].get<int>() * job.params.extent + s[0].get<int>();
        } else {
            bad("'seed' must be a vertex index or [n, m]");
        }
        const int N = job.params.extent;
        if (job.seed_vertex < 0 || job.seed_vertex >= N * N) bad("'seed' is outside the patch");
        int n = job.seed_vertex % N, m = job.seed_vertex / N;
        if (n == 0 || m == 0 || n == N - 1 || m == N - 1) bad("'seed' must be an interior vertex");
    }
    return job;
}

json edge_key(const TriMesh& mesh, int e) { return json::array({mesh.edges[e].a, mesh.edges[e].b}); }

json cross_ratio_report(const TriMesh& mesh, const std::vector<cplx>& z, const std::vector<cplx>* ref, double theta) {
    json out = json::array();
    for (int e : mesh.interior_edges) {
        cplx q = edge_cross_ratio(mesh, z, e);
        cplx lq = edge_log_cross_ratio(mesh, z, e);
        double res = ref ? theta_residual(edge_log_cross_ratio(mesh, *ref, e), lq, theta) : 0.0;
        out.push_back({{"edge", edge_key(mesh, e)}, {"q", to_json(q)}, {"logq", to_json(lq)}, {"residual", res}});
    }
    return out;
}

json closing_report(const ClosingReport& r) {
    return {{"valence", r.valence},
            {"arg_sum", r.arg_sum},
            {"product_defect", r.product_defect},
            {"alternating_defect", r.alternating_defect},
            {"polygon_defect", r.polygon_defect}};
}

json solve_report(const TriMesh& mesh, const SolveReport& r) {
    json edges = json::array();
    for (int e : mesh.interior_edges)
        edges.push_back({{"edge", edge_key(mesh, e)}, {"residual", r.per_edge_residuals.empty() ? 0.0 : r.per_edge_residuals[e]}});
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"triangle", f.triangle}, {"kind", f.kind}, {"message", f.message}});
    return {{"iterations", r.iterations},
            {"gradient_norm_history", r.gradient_norm_history},
            {"final_max_residual", r.final_max_residual},
            {"converged", r.converged},
            {"per_edge_residuals", edges},
            {"failures", fails}};
}

json verify_report(const TriMesh& mesh, const VerifyReport& r) {
    json edges = json::array();
    for (size_t k = 0; k < mesh.interior_edges.size(); ++k)
        edges.push_back({{"edge", edge_key(mesh, mesh.interior_edges[k])}, {"residual", r.residuals[k]}});
    return {{"max_residual", r.max_residual},
            {"max_closing_defect", r.max_closing_defect},
            {"all_embedded", r.all_embedded},
            {"residuals", edges}};
}

json grow_report(const GrowResult& r) {
    json fails = json::array();
    for (const auto& f : r.failures) fails.push_back({{"vertex", f.vertex}, {"kind", f.kind}, {"defect", f.defect}});
    return {{"complete", r.complete}, {"triangles_placed", r.triangles_placed}, {"failures", fails}};
}

std::vector<double> targets_from_json(const TriMesh& mesh, const json& j) {
    require_object(j, "targets");
    std::vector<double> t(mesh.edges.size(), 0.0);
    if (!j.contains("targets")) return t;
    if (!j["targets"].is_array()) bad("'targets' must be an array");
    for (const auto& item : j["targets"]) {
        require_object(item, "target entry");
        if (!item.contains("edge") || !item["edge"].is_array() || item["edge"].size() != 2 ||
            !item["edge"][0].is_number_integer() || !item["edge"][1].is_number_integer())
            bad("target entry needs 'edge': [i, j]");
        int e = mesh.edge_id(item["edge"][0].get<int>(), item["edge"][1].get<int>());
        if (e < 0) bad("target names an edge that is not in the mesh");
        if (!mesh.edges[e].interior()) bad("targets apply to interior edges only");
        t[e] = number(item, "value");
    }
    return t;
}

} // namespace thetaconf::io
