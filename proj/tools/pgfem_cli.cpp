// Experiment runner: convergence sweeps for the boundary-shifted P2/P3 method.
#include "pgfem/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

std::vector<int> parse_sweep(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw pgfem::Error(pgfem::ErrorCode::ParseError, "bad sweep entry '" + item + "'");
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson solver on curved domains with straight triangles and shifted boundary nodes"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a convergence sweep");
    std::string config_path, problem, sweep, extension, angular, layout, out_dir;
    int k = 0;
    double e = 0.0;
    bool dump_meshes = false, dump_matrices = false, print_config = false;
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_option("--problem", problem, "ellipse_test1 | annulus_test2 | polygon_patch | custom");
    run->add_option("--k", k, "polynomial degree (2 or 3)");
    run->add_option("--e", e, "geometry parameter");
    run->add_option("--sweep", sweep, "comma separated J (or I) values, e.g. 4,8,16");
    run->add_option("--extension", extension, "analytic | zero");
    run->add_option("--angular-range", angular, "half_pi | quarter_pi (annulus)");
    run->add_option("--ellipse-layout", layout, "square_rings | polar_fan (ellipse)");
    run->add_option("--out", out_dir, "output directory (PGFEM_OUT_DIR overrides)");
    run->add_flag("--dump-meshes", dump_meshes, "write mesh_<param>.txt per sweep entry");
    run->add_flag("--dump-matrices", dump_matrices, "write matrix_<param>.txt per sweep entry");
    run->add_flag("--print-config", print_config, "print the effective config as JSON and exit");

    auto* mesh_cmd = app.add_subcommand("mesh", "write a generated mesh in the text format");
    std::string mesh_kind = "ellipse", mesh_out;
    int mesh_param = 4;
    double mesh_e = 0.5;
    mesh_cmd->add_option("--kind", mesh_kind, "ellipse | annulus | square");
    mesh_cmd->add_option("--param", mesh_param, "J (ellipse, square) or I with J = I/2 (annulus)");
    mesh_cmd->add_option("--e", mesh_e, "geometry parameter");
    mesh_cmd->add_option("--out", mesh_out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& ex) {
        const int code = app.exit(ex);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*mesh_cmd) {
        try {
            pgfem::TriMesh mesh;
            if (mesh_kind == "ellipse")
                mesh = pgfem::gen_quarter_ellipse_mesh(mesh_param, mesh_e);
            else if (mesh_kind == "annulus")
                mesh = pgfem::gen_quarter_annulus_mesh(mesh_param, mesh_param / 2, mesh_e);
            else if (mesh_kind == "square")
                mesh = pgfem::gen_rectangle_mesh(mesh_param);
            else
                throw pgfem::Error(pgfem::ErrorCode::InvalidParam, "unknown mesh kind '" + mesh_kind + "'");
            pgfem::write_mesh_file(mesh_out, mesh);
            return 0;
        } catch (const pgfem::Error& ex) {
            std::cerr << "error: " << ex.what() << '\n';
            return kExitConfig;
        }
    }

    pgfem::ExperimentConfig cfg;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw pgfem::Error(pgfem::ErrorCode::InvalidParam, "cannot open " + config_path);
            try {
                in >> j;
            } catch (const nlohmann::json::exception& ex) {
                throw pgfem::Error(pgfem::ErrorCode::ParseError, ex.what());
            }
        }
        if (!problem.empty()) {
            if (j.contains("problem") && j["problem"] != problem) {
                // a different problem on the command line resets problem-specific defaults
                j.erase("sweep");
                j.erase("geometry");
            }
            j["problem"] = problem;
        }
        if (!j.contains("problem")) throw pgfem::Error(pgfem::ErrorCode::InvalidParam, "need --config or --problem");
        if (k) j["k"] = k;
        if (e > 0.0) j["e"] = e;
        if (!sweep.empty()) j["sweep"] = parse_sweep(sweep);
        if (!extension.empty()) j["extension"] = extension;
        if (!angular.empty()) j["angular_range"] = angular;
        if (!layout.empty()) j["ellipse_layout"] = layout;
        if (!out_dir.empty()) j["out_dir"] = out_dir;
        if (dump_meshes) j["dump_meshes"] = true;
        if (dump_matrices) j["dump_matrices"] = true;
        cfg = pgfem::config_from_json(j);
    } catch (const pgfem::Error& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return kExitConfig;
    }

    if (print_config) {
        std::cout << pgfem::to_json(cfg).dump(2) << '\n';
        return 0;
    }

    try {
        const auto result = pgfem::run_experiment(cfg);
        pgfem::write_table_markdown(std::cout, result.table, cfg.problem == pgfem::ProblemKind::annulus_test2 ? "I" : "J",
                                    "Errors for " + pgfem::to_string(cfg.problem) + ", k = " + std::to_string(cfg.k));
        for (const auto& f : result.files) std::cerr << "wrote " << f << '\n';
    } catch (const pgfem::Error& ex) {
        std::cerr << "numerical failure: " << ex.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& ex) {
        std::cerr << "failure: " << ex.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}
