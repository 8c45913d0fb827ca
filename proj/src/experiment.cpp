#include "pgfem/experiment.hpp"

#include "pgfem/quadrature.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace pgfem {

namespace fs = std::filesystem;
using nlohmann::json;

Discretization discretize(TriMesh mesh, const ProblemSpec& problem, int k) {
    validate_mesh(mesh, problem.geom);
    Discretization disc;
    disc.k = k;
    disc.mesh = classify_elements(std::move(mesh), problem.geom);
    disc.bases = build_local_bases(disc.mesh, problem.geom, k);
    disc.dofmap = build_dof_map(disc.mesh, disc.bases, k, problem.d);
    return disc;
}

SolvedProblem solve_problem(TriMesh mesh, const ProblemSpec& problem, int k, const QuadratureDegrees& rules) {
    SolvedProblem out;
    out.disc = discretize(std::move(mesh), problem, k);
    out.system = assemble(out.disc.mesh, out.disc.dofmap, out.disc.bases, problem, rules);
    out.report = solve(out.system.A, out.system.rhs);
    out.nodal = expand_solution(out.disc.dofmap, out.report.x);
    return out;
}

double interpolation_grad_error(const Discretization& disc, const ProblemSpec& problem,
                                const QuadratureDegrees& rules) {
    if (!problem.exact) throw Error(ErrorCode::MissingExact, "interpolation error needs an exact solution");
    const Eigen::VectorXd ih = interpolate_Ih(problem.exact->value, disc.dofmap);
    ErrorOptions opts;
    opts.quadrature_degree = rules.resolved(disc.k).error;
    return error_norms(disc.mesh, disc.dofmap, disc.bases, ih, problem.exact, opts).grad_err;
}

double inf_sup_constant(const Discretization& disc, const AssembledSystem& system, const QuadratureDegrees& rules,
                        std::size_t max_unknowns) {
    if (disc.dofmap.n_unknowns() > max_unknowns)
        throw Error(ErrorCode::TooLargeForDense, "too many unknowns for the dense inf-sup estimate");
    const SparseMatrix g_test = assemble_gram(disc.mesh, disc.dofmap, disc.bases, BasisChoice::test_space, rules);
    const SparseMatrix g_trial = assemble_gram(disc.mesh, disc.dofmap, disc.bases, BasisChoice::trial_space, rules);
    return inf_sup_estimate(system.A, g_test, g_trial, max_unknowns);
}

BoundaryGeometry GeometrySpec::build() const {
    switch (kind) {
        case GeometryKind::ellipse: return BoundaryGeometry::ellipse(e);
        case GeometryKind::annulus: return BoundaryGeometry::annulus(e);
        case GeometryKind::polygon: return BoundaryGeometry::polygon(vertices);
    }
    throw Error(ErrorCode::InvalidParam, "unknown geometry kind");
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return problem == o.problem && e == o.e && k == o.k && sweep == o.sweep && extension_mode == o.extension_mode &&
           angular_range == o.angular_range && ellipse_layout == o.ellipse_layout && quadrature.stiffness == o.quadrature.stiffness &&
           quadrature.load == o.quadrature.load && quadrature.error == o.quadrature.error && out_dir == o.out_dir &&
           deterministic == o.deterministic && threads == o.threads && dump_meshes == o.dump_meshes &&
           dump_matrices == o.dump_matrices && inf_sup_max_unknowns == o.inf_sup_max_unknowns &&
           patch_degree == o.patch_degree && geometry == o.geometry && mesh_files == o.mesh_files;
}

ProblemKind parse_problem_kind(const std::string& name) {
    if (name == "ellipse_test1") return ProblemKind::ellipse_test1;
    if (name == "annulus_test2") return ProblemKind::annulus_test2;
    if (name == "polygon_patch") return ProblemKind::polygon_patch;
    if (name == "custom") return ProblemKind::custom;
    throw Error(ErrorCode::ParseError, "unknown problem '" + name + "'");
}

std::string to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::ellipse_test1: return "ellipse_test1";
        case ProblemKind::annulus_test2: return "annulus_test2";
        case ProblemKind::polygon_patch: return "polygon_patch";
        case ProblemKind::custom: return "custom";
    }
    return "custom";
}

ExperimentConfig default_config(ProblemKind problem) {
    ExperimentConfig cfg;
    cfg.problem = problem;
    switch (problem) {
        case ProblemKind::ellipse_test1:
            cfg.geometry = {GeometryKind::ellipse, cfg.e, {}};
            break;
        case ProblemKind::annulus_test2:
            cfg.geometry = {GeometryKind::annulus, cfg.e, {}};
            break;
        case ProblemKind::polygon_patch:
            cfg.sweep = {2, 4, 8};
            cfg.geometry = {GeometryKind::polygon, 0.0, {Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)}};
            break;
        case ProblemKind::custom:
            cfg.sweep.clear();
            break;
    }
    return cfg;
}

namespace {

const char* kind_name(GeometryKind k) {
    switch (k) {
        case GeometryKind::ellipse: return "ellipse";
        case GeometryKind::annulus: return "annulus";
        case GeometryKind::polygon: return "polygon";
    }
    return "ellipse";
}

json geometry_to_json(const GeometrySpec& g) {
    json j{{"kind", kind_name(g.kind)}};
    if (g.kind == GeometryKind::polygon) {
        json verts = json::array();
        for (const auto& p : g.vertices) verts.push_back({p.x(), p.y()});
        j["vertices"] = verts;
    } else {
        j["e"] = g.e;
    }
    return j;
}

GeometrySpec geometry_from_json(const json& j) {
    GeometrySpec g;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ellipse")
        g.kind = GeometryKind::ellipse;
    else if (kind == "annulus")
        g.kind = GeometryKind::annulus;
    else if (kind == "polygon")
        g.kind = GeometryKind::polygon;
    else
        throw Error(ErrorCode::ParseError, "unknown geometry kind '" + kind + "'");
    if (g.kind == GeometryKind::polygon) {
        g.e = 0.0;
        for (const auto& v : j.at("vertices")) g.vertices.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    } else {
        g.e = j.at("e").get<double>();
    }
    return g;
}

template <class T>
void read_opt(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
    return json{
        {"problem", to_string(cfg.problem)},
        {"e", cfg.e},
        {"k", cfg.k},
        {"sweep", cfg.sweep},
        {"extension", cfg.extension_mode == ExtensionMode::analytic ? "analytic" : "zero"},
        {"angular_range", cfg.angular_range == AngularRange::half_pi ? "half_pi" : "quarter_pi"},
        {"ellipse_layout", cfg.ellipse_layout == EllipseLayout::square_rings ? "square_rings" : "polar_fan"},
        {"quadrature",
         {{"stiffness", cfg.quadrature.stiffness}, {"load", cfg.quadrature.load}, {"error", cfg.quadrature.error}}},
        {"out_dir", cfg.out_dir},
        {"deterministic", cfg.deterministic},
        {"threads", cfg.threads},
        {"dump_meshes", cfg.dump_meshes},
        {"dump_matrices", cfg.dump_matrices},
        {"inf_sup_max_unknowns", cfg.inf_sup_max_unknowns},
        {"patch_degree", cfg.patch_degree},
        {"geometry", geometry_to_json(cfg.geometry)},
        {"mesh_files", cfg.mesh_files},
    };
}

ExperimentConfig config_from_json(const json& j) {
    try {
        if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
        const ProblemKind kind = parse_problem_kind(j.value("problem", std::string("ellipse_test1")));
        ExperimentConfig cfg = default_config(kind);
        read_opt(j, "e", cfg.e);
        if (kind == ProblemKind::ellipse_test1 || kind == ProblemKind::annulus_test2) cfg.geometry.e = cfg.e;
        read_opt(j, "k", cfg.k);
        read_opt(j, "sweep", cfg.sweep);
        if (j.contains("extension")) {
            const auto mode = j.at("extension").get<std::string>();
            if (mode == "analytic")
                cfg.extension_mode = ExtensionMode::analytic;
            else if (mode == "zero" || mode == "zero_outside")
                cfg.extension_mode = ExtensionMode::zero_outside;
            else
                throw Error(ErrorCode::ParseError, "unknown extension mode '" + mode + "'");
        }
        if (j.contains("angular_range")) {
            const auto range = j.at("angular_range").get<std::string>();
            if (range == "half_pi")
                cfg.angular_range = AngularRange::half_pi;
            else if (range == "quarter_pi")
                cfg.angular_range = AngularRange::quarter_pi;
            else
                throw Error(ErrorCode::ParseError, "unknown angular range '" + range + "'");
        }
        if (j.contains("ellipse_layout")) {
            const auto layout = j.at("ellipse_layout").get<std::string>();
            if (layout == "square_rings")
                cfg.ellipse_layout = EllipseLayout::square_rings;
            else if (layout == "polar_fan")
                cfg.ellipse_layout = EllipseLayout::polar_fan;
            else
                throw Error(ErrorCode::ParseError, "unknown ellipse layout '" + layout + "'");
        }
        if (j.contains("quadrature")) {
            const auto& q = j.at("quadrature");
            read_opt(q, "stiffness", cfg.quadrature.stiffness);
            read_opt(q, "load", cfg.quadrature.load);
            read_opt(q, "error", cfg.quadrature.error);
        }
        read_opt(j, "out_dir", cfg.out_dir);
        read_opt(j, "deterministic", cfg.deterministic);
        read_opt(j, "threads", cfg.threads);
        read_opt(j, "dump_meshes", cfg.dump_meshes);
        read_opt(j, "dump_matrices", cfg.dump_matrices);
        read_opt(j, "inf_sup_max_unknowns", cfg.inf_sup_max_unknowns);
        read_opt(j, "patch_degree", cfg.patch_degree);
        if (j.contains("geometry")) cfg.geometry = geometry_from_json(j.at("geometry"));
        read_opt(j, "mesh_files", cfg.mesh_files);
        validate_config(cfg);
        return cfg;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::ParseError, ex.what());
    }
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.k != 2 && cfg.k != 3) throw Error(ErrorCode::InvalidParam, "k must be 2 or 3");
    if (cfg.sweep.empty()) throw Error(ErrorCode::InvalidParam, "sweep is empty");
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
        if (cfg.sweep[i] < 1) throw Error(ErrorCode::InvalidParam, "sweep entries must be positive");
        if (i > 0 && cfg.sweep[i] <= cfg.sweep[i - 1])
            throw Error(ErrorCode::InvalidParam, "sweep must be strictly increasing");
        if (i > 0 && cfg.sweep[i] != 2 * cfg.sweep[i - 1])
            throw Error(ErrorCode::NonDyadicSequence, "sweep entries must double");
    }
    if (cfg.problem == ProblemKind::annulus_test2) {
        for (int I : cfg.sweep)
            if (I % 2 != 0) throw Error(ErrorCode::InvalidParam, "annulus sweep uses I = 2J, so I must be even");
        if (!(cfg.e > 0.0 && cfg.e < 1.0)) throw Error(ErrorCode::InvalidParam, "annulus e must lie in (0,1)");
    }
    if (cfg.problem == ProblemKind::ellipse_test1 && !(cfg.e > 0.0 && cfg.e <= 1.0))
        throw Error(ErrorCode::InvalidParam, "ellipse e must lie in (0,1]");
    if (cfg.problem == ProblemKind::custom && cfg.mesh_files.size() != cfg.sweep.size())
        throw Error(ErrorCode::InvalidParam, "custom problems need one mesh file per sweep entry");
    if (cfg.patch_degree > cfg.k) throw Error(ErrorCode::InvalidParam, "patch_degree cannot exceed k");
    for (int d : {cfg.quadrature.stiffness, cfg.quadrature.load, cfg.quadrature.error})
        if (d > kMaxRuleDegree) throw Error(ErrorCode::InvalidParam, "quadrature degree above 10");
    if (cfg.threads < 1) throw Error(ErrorCode::InvalidParam, "threads must be >= 1");
}

ProblemSpec make_problem(const ExperimentConfig& cfg) {
    const int patch = cfg.patch_degree > 0 ? cfg.patch_degree : cfg.k;
    switch (cfg.problem) {
        case ProblemKind::ellipse_test1: return ellipse_test1(cfg.e, cfg.extension_mode);
        case ProblemKind::annulus_test2: return annulus_test2(cfg.e, cfg.extension_mode);
        case ProblemKind::polygon_patch: return polygon_patch(cfg.geometry.build(), patch);
        case ProblemKind::custom:
            switch (cfg.geometry.kind) {
                case GeometryKind::ellipse: return ellipse_test1(cfg.geometry.e, cfg.extension_mode);
                case GeometryKind::annulus: return annulus_test2(cfg.geometry.e, cfg.extension_mode);
                case GeometryKind::polygon: return polygon_patch(cfg.geometry.build(), patch);
            }
    }
    throw Error(ErrorCode::InvalidParam, "unknown problem");
}

TriMesh make_sweep_mesh(const ExperimentConfig& cfg, std::size_t entry) {
    const int p = cfg.sweep.at(entry);
    switch (cfg.problem) {
        case ProblemKind::ellipse_test1: return gen_quarter_ellipse_mesh(p, cfg.e, cfg.ellipse_layout);
        case ProblemKind::annulus_test2: return gen_quarter_annulus_mesh(p, p / 2, cfg.e, cfg.angular_range);
        case ProblemKind::polygon_patch: {
            const auto& v = cfg.geometry.vertices;
            double x0 = v.front().x(), x1 = x0, y0 = v.front().y(), y1 = y0;
            for (const auto& q : v) {
                x0 = std::min(x0, q.x()), x1 = std::max(x1, q.x());
                y0 = std::min(y0, q.y()), y1 = std::max(y1, q.y());
            }
            return gen_rectangle_mesh(p, x0, x1, y0, y1);
        }
        case ProblemKind::custom: return read_mesh_file(cfg.mesh_files.at(entry));
    }
    throw Error(ErrorCode::InvalidParam, "unknown problem");
}

namespace {

SweepEntryResult run_entry(const ExperimentConfig& cfg, const ProblemSpec& problem, std::size_t entry,
                           const fs::path& out_dir, bool write_files) {
    SweepEntryResult r;
    r.param = cfg.sweep[entry];
    TriMesh mesh = make_sweep_mesh(cfg, entry);
    if (write_files && cfg.dump_meshes) write_mesh_file((out_dir / ("mesh_" + std::to_string(r.param) + ".txt")).string(), mesh);

    const SolvedProblem solved = solve_problem(std::move(mesh), problem, cfg.k, cfg.quadrature);
    const auto& disc = solved.disc;
    if (write_files && cfg.dump_matrices) {
        std::ofstream out(out_dir / ("matrix_" + std::to_string(r.param) + ".txt"));
        write_matrix_coo(out, solved.system.A);
    }

    ErrorOptions opts;
    opts.quadrature_degree = cfg.quadrature.resolved(cfg.k).error;
    r.errors = error_norms(disc.mesh, disc.dofmap, disc.bases, solved.nodal, problem.exact, opts);
    r.errors.param = r.param;
    r.interp_grad_err = interpolation_grad_error(disc, problem, cfg.quadrature);
    r.residual = solved.report.residual_norm;
    r.n_unknowns = disc.dofmap.n_unknowns();
    r.n_boundary_elements = count_boundary_elements(disc.mesh);
    r.gamma = mesh_stats(disc.mesh).gamma;
    r.diagnostics.kt_dev = kt_perturbation_report(disc.mesh, disc.bases).max_dev;
    if (r.n_unknowns <= cfg.inf_sup_max_unknowns)
        r.diagnostics.alpha_h = inf_sup_constant(disc, solved.system, cfg.quadrature, cfg.inf_sup_max_unknowns);
    return r;
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10e", v);
    return buf;
}

void write_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorCode::InvalidParam, "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files) {
    validate_config(cfg);
    const ProblemSpec problem = make_problem(cfg);
    fs::path out_dir = cfg.out_dir;
    if (const char* env = std::getenv("PGFEM_OUT_DIR"); env && *env) out_dir = env;
    if (write_files) fs::create_directories(out_dir);

    ExperimentResult result;
    result.entries.resize(cfg.sweep.size());
    auto run_one = [&](std::size_t i) {
        try {
            return run_entry(cfg, problem, i, out_dir, write_files);
        } catch (const Error& ex) {
            throw Error(ex.code(), "sweep entry " + std::to_string(cfg.sweep[i]) + ": " + ex.what());
        }
    };
    if (cfg.deterministic || cfg.threads == 1) {
        for (std::size_t i = 0; i < cfg.sweep.size(); ++i) result.entries[i] = run_one(i);
    } else {
        std::vector<std::future<SweepEntryResult>> pending;
        for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
            pending.push_back(std::async(std::launch::async, run_one, i));
            if (pending.size() == static_cast<std::size_t>(cfg.threads) || i + 1 == cfg.sweep.size()) {
                const std::size_t first = i + 1 - pending.size();
                for (std::size_t p = 0; p < pending.size(); ++p) result.entries[first + p] = pending[p].get();
                pending.clear();
            }
        }
    }

    std::vector<ErrorReport> reports;
    for (const auto& e : result.entries) reports.push_back(e.errors);
    result.table = convergence_orders(reports);
    for (std::size_t i = 0; i < result.entries.size(); ++i) result.table.rows[i].diagnostics = result.entries[i].diagnostics;

    if (write_files) {
        std::ostringstream csv, md, diag;
        write_table_csv(csv, result.table);
        const std::string param_name = cfg.problem == ProblemKind::annulus_test2 ? "I" : "J";
        write_table_markdown(md, result.table, param_name, "Errors for " + to_string(cfg.problem) + ", k = " + std::to_string(cfg.k));
        diag << "param,n_unknowns,boundary_elements,gamma,residual,kt_dev,alpha_h,interp_grad_err\n";
        for (const auto& e : result.entries)
            diag << e.param << ',' << e.n_unknowns << ',' << e.n_boundary_elements << ',' << fmt(e.gamma) << ','
                 << fmt(e.residual) << ',' << fmt(e.diagnostics.kt_dev) << ',' << fmt(e.diagnostics.alpha_h) << ','
                 << fmt(e.interp_grad_err) << '\n';
        write_atomically(out_dir / "table.csv", csv.str());
        write_atomically(out_dir / "table.md", md.str());
        write_atomically(out_dir / "diagnostics.csv", diag.str());
        for (const char* name : {"table.csv", "table.md", "diagnostics.csv"}) result.files.push_back((out_dir / name).string());
    }
    return result;
}

}  // namespace pgfem
