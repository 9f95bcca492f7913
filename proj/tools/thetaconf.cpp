#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thetaconf/confsym.hpp"
#include "thetaconf/crossratio.hpp"
#include "thetaconf/io.hpp"
#include "thetaconf/layout.hpp"
#include "thetaconf/parallel.hpp"
#include "thetaconf/svg.hpp"
#include "thetaconf/varprin.hpp"

using namespace thetaconf;
using io::json;

namespace {

bool g_quiet = false;
bool g_json_logs = false;

void log(const std::string& level, const std::string& msg) {
    if (g_quiet && level == "info") return;
    if (g_json_logs)
        std::cerr << json{{"level", level}, {"msg", msg}}.dump() << "\n";
    else
        std::cerr << level << ": " << msg << "\n";
}

int exit_code(ErrorKind k) {
    switch (k) {
    case ErrorKind::Infeasible:
    case ErrorKind::InfeasibleStep:
    case ErrorKind::InfeasibleTriangle:
    case ErrorKind::OutsideDomain:
    case ErrorKind::DegenerateImage:
        return 3;
    case ErrorKind::NotConverged:
        return 4;
    default:
        return 2;
    }
}

void emit(const std::optional<std::string>& path, const json& j) {
    if (path)
        io::write_text_file(*path, io::dump(j));
    else
        std::cout << io::dump(j);
}

int cmd_gen(const std::string& kind, const std::string& params_file, const std::string& out,
            const std::optional<std::string>& report_file) {
    json p = io::read_json_file(params_file);
    if (kind == "lattice") {
        TriMesh m = gen_lattice(io::lattice_params(p));
        io::write_text_file(out, io::dump(io::mesh_to_json(m)));
        log("info", "lattice with " + std::to_string(m.triangles.size()) + " triangles");
        return 0;
    }
    if (kind == "doyle") {
        TriMesh m = gen_doyle(io::doyle_params(p));
        io::write_text_file(out, io::dump(io::mesh_to_json(m)));
        log("info", "Doyle spiral with " + std::to_string(m.triangles.size()) + " triangles");
        return 0;
    }
    io::ConfSymJob job = io::confsym_params(p);
    ConfSymGrowth cg = grow_confsym(job.params, job.seed_vertex);
    const CrossRatioPatch& patch = cg.patch;
    const GrowResult& g = cg.growth;
    const int seed = cg.seed_vertex;

    std::vector<int> remap(patch.mesh.vertex_count, -1);
    std::vector<cplx> pos;
    std::vector<Tri> tris;
    for (const Tri& t : patch.mesh.triangles) {
        if (!g.placed[t[0]] || !g.placed[t[1]] || !g.placed[t[2]]) continue;
        if (!(signed_area(g.positions[t[0]], g.positions[t[1]], g.positions[t[2]]) > 0)) continue;
        Tri nt;
        for (int k = 0; k < 3; ++k) {
            if (remap[t[k]] < 0) {
                remap[t[k]] = static_cast<int>(pos.size());
                pos.push_back(g.positions[t[k]]);
            }
            nt[k] = remap[t[k]];
        }
        tris.push_back(nt);
    }
    json rep = io::grow_report(g);
    for (auto& f : rep["failures"]) {
        int v = f["vertex"].get<int>();
        f["grid"] = json::array({patch.grid.n_of(v), patch.grid.m_of(v)});
    }
    rep["seed"] = json::array({patch.grid.n_of(seed), patch.grid.m_of(seed)});
    io::write_text_file(out, io::dump(io::mesh_to_json(pos, tris)));
    if (report_file) io::write_text_file(*report_file, io::dump(rep));
    if (g.complete)
        log("info", "conformally symmetric patch grown to full extent");
    else
        log("warn", "growth stopped: " + (g.failures.empty() ? std::string("incomplete") : g.failures[0].kind) + " after " +
                        std::to_string(g.triangles_placed) + " triangles");
    return 0;
}

int cmd_analyze(const std::string& mesh_file, const std::optional<std::string>& ref_file, double theta,
                const std::optional<std::string>& out) {
    TriMesh m = io::mesh_from_json(io::read_json_file(mesh_file));
    std::optional<TriMesh> ref;
    if (ref_file) {
        ref = io::mesh_from_json(io::read_json_file(*ref_file));
        if (ref->vertex_count != m.vertex_count || ref->triangles != m.triangles)
            throw Error(ErrorKind::CombinatoricsMismatch, "reference and image meshes differ in combinatorics");
    }
    json rep;
    rep["theta"] = theta;
    rep["cross_ratios"] = io::cross_ratio_report(m, m.positions, ref ? &ref->positions : nullptr, theta);
    json flowers = json::array();
    for (int v : m.interior_vertices()) {
        FlowerView f = flower(m, v);
        std::vector<cplx> q;
        for (int e : f.spokes) q.push_back(edge_cross_ratio(m, m.positions, e));
        json fj = io::closing_report(check_flower_closing(q));
        fj["vertex"] = v;
        if (f.ring.size() == 6) {
            std::array<cplx, 7> z;
            z[0] = m.positions[v];
            for (int k = 0; k < 6; ++k) z[1 + k] = m.positions[f.ring[k]];
            try {
                SymmetryReport s = check_conf_symmetric_flower(z);
                fj["conformally_symmetric"] = s.is_symmetric;
                fj["symmetry_defect"] = s.q_defect;
            } catch (const Error&) {
                fj["conformally_symmetric"] = nullptr;
            }
        }
        flowers.push_back(fj);
    }
    rep["flowers"] = flowers;
    if (ref) {
        ThetaConformalReport tc = check_theta_conformal(m, ref->positions, m.positions, theta, 1e-9);
        rep["max_residual"] = tc.max_residual;
        rep["theta_conformal"] = tc.conformal;
    }
    emit(out, rep);
    return 0;
}

int cmd_solve(const std::string& mesh_file, const std::string& targets_file, double theta, double tol, int max_iter,
              const std::string& pin, const std::string& fix_boundary, bool project, const std::string& out_dir) {
    TriMesh m = io::mesh_from_json(io::read_json_file(mesh_file));
    std::vector<double> targets = io::targets_from_json(m, io::read_json_file(targets_file));
    OmegaField f = OmegaField::zeros(m, fix_boundary == "on");
    if (pin.rfind("edge:", 0) == 0) {
        int e;
        try {
            e = std::stoi(pin.substr(5));
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidInput, "--pin edge:<id> needs an integer id");
        }
        if (e < 0 || e >= static_cast<int>(m.edges.size())) throw Error(ErrorKind::InvalidInput, "--pin edge id out of range");
        f.fixed[e] = 1;
        f.gauge_mean = false;
    } else if (pin != "mean") {
        throw Error(ErrorKind::InvalidInput, "--pin must be mean or edge:<id>");
    }
    std::vector<double> sums = target_vertex_sums(m, targets);
    double worst = 0.0;
    for (double x : sums) worst = std::max(worst, std::abs(x));
    if (project) {
        targets = project_targets(m, targets);
    } else if (worst > 1e-12) {
        log("warn", "targets do not sum to zero around every interior vertex (max " + std::to_string(worst) +
                        "); the layout cannot close, see --project-targets");
    }
    if (fix_boundary != "on") {
        double total = 0.0;
        for (double t : targets) total += t;
        if (std::abs(total) > 1e-12)
            log("warn", "with a free boundary the targets must add up to zero (sum " + std::to_string(total) + ")");
    }
    f.target = targets;
    auto frames = make_frames(m);
    MaximizeOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    MaximizeResult r = maximize(m, frames, f, theta, opts);

    json omega = json::array();
    for (size_t e = 0; e < m.edges.size(); ++e)
        omega.push_back({{"edge", io::edge_key(m, static_cast<int>(e))}, {"omega", r.field.value[e]}, {"fixed", r.field.fixed[e] != 0}});
    json rep{{"theta", theta}, {"solve", io::solve_report(m, r.report)}, {"target_vertex_sum_max", worst},
             {"targets_projected", project}};
    json mesh_out;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (r.report.converged) {
        LayoutResult L = reconstruct(m, frames, r.field.value, theta, {}, GlueOrder::BreadthFirst, &r.nu);
        VerifyReport v = verify_layout(m, m.positions, L.positions, theta, targets);
        rep["layout"] = {{"max_mismatch", L.max_mismatch}};
        rep["verify"] = io::verify_report(m, v);
        mesh_out = io::mesh_to_json(L.positions, m.triangles);
    }
    io::write_text_file(out_dir + "/omega.json", io::dump(json{{"theta", theta}, {"omega", omega}}));
    io::write_text_file(out_dir + "/report.json", io::dump(rep));
    if (!r.report.converged) {
        log("error", "not converged after " + std::to_string(r.report.iterations) + " iterations");
        return 4;
    }
    io::write_text_file(out_dir + "/mesh.json", io::dump(mesh_out));
    log("info", "converged in " + std::to_string(r.report.iterations) + " Newton steps");
    return 0;
}

int cmd_render(const std::string& mesh_file, const std::string& out, bool circles,
               const std::optional<std::string>& report_file, double stroke, double vradius) {
    TriMesh m = io::mesh_from_json(io::read_json_file(mesh_file));
    RenderStyle st;
    st.circumcircles = circles;
    st.stroke_width = stroke;
    st.vertex_radius = vradius;
    if (report_file) {
        json rep = io::read_json_file(*report_file);
        const json* list = nullptr;
        if (rep.contains("cross_ratios")) list = &rep["cross_ratios"];
        else if (rep.contains("verify")) list = &rep["verify"]["residuals"];
        if (!list || !list->is_array()) throw Error(ErrorKind::InvalidInput, "report has no per-edge residuals");
        for (const auto& item : *list) {
            if (!item.contains("edge") || !item.contains("residual") || !item["residual"].is_number())
                throw Error(ErrorKind::InvalidInput, "report entries need 'edge' and 'residual'");
            int a = item["edge"][0].get<int>(), b = item["edge"][1].get<int>();
            st.edge_defect[{std::min(a, b), std::max(a, b)}] = item["residual"].get<double>();
        }
    }
    io::write_text_file(out, render_svg(m, st));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete theta-conformal maps: generate, analyze, solve and render triangulations"};
    app.require_subcommand(1);
    app.add_flag("--quiet", g_quiet, "Suppress informational messages");
    app.add_flag("--json-logs", g_json_logs, "Write log lines as JSON objects");

    std::string kind, params, out, mesh, ref, targets, out_dir = ".", pin = "mean", fixb = "on";
    std::optional<std::string> report, analyze_out;
    double theta = std::numbers::pi / 2, tol = 1e-10, stroke = 1.0, vradius = 0.0;
    int max_iter = 50;
    bool circles = false, project = false;

    auto* gen = app.add_subcommand("gen", "Generate a lattice, Doyle spiral or conformally symmetric patch");
    gen->add_option("kind", kind, "lattice, doyle or confsym")->required()->check(CLI::IsMember({"lattice", "doyle", "confsym"}));
    gen->add_option("params", params, "Parameter JSON")->required();
    gen->add_option("out", out, "Output mesh JSON")->required();
    gen->add_option("--report", report, "Growth report JSON (confsym)");

    auto* an = app.add_subcommand("analyze", "Cross-ratios, closing defects and theta-residuals");
    an->add_option("mesh", mesh, "Mesh JSON")->required();
    auto* ref_opt = an->add_option("ref", ref, "Reference mesh JSON");
    an->add_option("--theta", theta, "Angle theta");
    an->add_option("-o,--out", analyze_out, "Report JSON (default stdout)");

    auto* so = app.add_subcommand("solve", "Maximize the functional and lay out the image");
    so->add_option("mesh", mesh, "Mesh JSON")->required();
    so->add_option("targets", targets, "Targets JSON")->required();
    so->add_option("--theta", theta, "Angle theta");
    so->add_option("--tol", tol, "Gradient tolerance");
    so->add_option("--max-iter", max_iter, "Newton iteration cap");
    so->add_option("--pin", pin, "Gauge: mean or edge:<id>");
    so->add_option("--fix-boundary", fixb, "Fix boundary omega")->check(CLI::IsMember({"on", "off"}));
    so->add_flag("--project-targets", project, "Project targets onto zero vertex sums");
    so->add_option("--out-dir", out_dir, "Directory for omega.json, report.json, mesh.json");

    auto* re = app.add_subcommand("render", "Write an SVG picture of a mesh");
    re->add_option("mesh", mesh, "Mesh JSON")->required();
    re->add_option("out", out, "Output SVG")->required();
    re->add_flag("--circumcircles", circles, "Draw dotted circumcircles");
    re->add_option("--report", report, "Report JSON with per-edge residuals");
    re->add_option("--stroke-width", stroke, "Stroke width");
    re->add_option("--vertex-radius", vradius, "Vertex dot radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    apply_thread_env();
    try {
        if (gen->parsed()) return cmd_gen(kind, params, out, report);
        if (an->parsed())
            return cmd_analyze(mesh, ref_opt->count() ? std::optional<std::string>(ref) : std::nullopt, theta, analyze_out);
        if (so->parsed()) return cmd_solve(mesh, targets, theta, tol, max_iter, pin, fixb, project, out_dir);
        if (re->parsed()) return cmd_render(mesh, out, circles, report, stroke, vradius);
    } catch (const Error& e) {
        log("error", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        log("error", e.what());
        return 1;
    }
    return 0;
}
