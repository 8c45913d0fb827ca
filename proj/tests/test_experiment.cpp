#include "doctest.h"

#include "pgfem/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pgfem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("pgfem_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ErrorCode code_of(const nlohmann::json& j) {
    try {
        config_from_json(j);
    } catch (const Error& ex) {
        return ex.code();
    }
    FAIL("config was accepted");
    return ErrorCode::InvalidParam;
}

}  // namespace

TEST_CASE("default configs") {
    const auto e = default_config(ProblemKind::ellipse_test1);
    CHECK(e.k == 2);
    CHECK(e.e == 0.5);
    CHECK(e.sweep == std::vector<int>{4, 8, 16, 32, 64});
    CHECK(e.ellipse_layout == EllipseLayout::square_rings);
    const auto a = default_config(ProblemKind::annulus_test2);
    CHECK(a.sweep == std::vector<int>{4, 8, 16, 32, 64});
    CHECK(a.angular_range == AngularRange::half_pi);
    CHECK(a.extension_mode == ExtensionMode::analytic);
    CHECK(default_config(ProblemKind::polygon_patch).sweep == std::vector<int>{2, 4, 8});
    CHECK(config_from_json(nlohmann::json::object()) == e);
}

TEST_CASE("config JSON round trip") {
    for (auto kind : {ProblemKind::ellipse_test1, ProblemKind::annulus_test2, ProblemKind::polygon_patch}) {
        const auto cfg = default_config(kind);
        CHECK(config_from_json(to_json(cfg)) == cfg);
    }
    auto cfg = default_config(ProblemKind::annulus_test2);
    cfg.k = 3;
    cfg.sweep = {2, 4};
    cfg.extension_mode = ExtensionMode::zero_outside;
    cfg.angular_range = AngularRange::quarter_pi;
    cfg.quadrature.load = 9;
    cfg.out_dir = "elsewhere";
    cfg.deterministic = false;
    cfg.threads = 3;
    cfg.dump_meshes = true;
    cfg.inf_sup_max_unknowns = 100;
    const auto back = config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
    CHECK(back == cfg);
    CHECK(to_json(back) == to_json(cfg));

    auto fan = default_config(ProblemKind::ellipse_test1);
    fan.ellipse_layout = EllipseLayout::polar_fan;
    CHECK(config_from_json(to_json(fan)) == fan);
}

TEST_CASE("config validation") {
    using nlohmann::json;
    CHECK(code_of(json{{"problem", "nope"}}) == ErrorCode::ParseError);
    CHECK(code_of(json::array()) == ErrorCode::ParseError);
    CHECK(code_of(json{{"k", "two"}}) == ErrorCode::ParseError);
    CHECK(code_of(json{{"k", 4}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"sweep", json::array()}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"sweep", {4, 12}}}) == ErrorCode::NonDyadicSequence);
    CHECK(code_of(json{{"sweep", {8, 4}}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"extension", "sideways"}}) == ErrorCode::ParseError);
    CHECK(code_of(json{{"angular_range", "full"}}) == ErrorCode::ParseError);
    CHECK(code_of(json{{"ellipse_layout", "spiral"}}) == ErrorCode::ParseError);
    CHECK(code_of(json{{"problem", "annulus_test2"}, {"sweep", {3, 6}}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"problem", "annulus_test2"}, {"e", 1.0}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"problem", "custom"}, {"sweep", {4}}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"quadrature", {{"load", 11}}}}) == ErrorCode::InvalidParam);
    CHECK(code_of(json{{"threads", 0}}) == ErrorCode::InvalidParam);
    CHECK(config_from_json(json{{"extension", "zero"}}).extension_mode == ExtensionMode::zero_outside);
}

TEST_CASE("polygon patch experiment reproduces the solution exactly") {
    for (int k : {2, 3}) {
        auto cfg = default_config(ProblemKind::polygon_patch);
        cfg.k = k;
        const auto result = run_experiment(cfg, false);
        REQUIRE(result.table.rows.size() == 3);
        for (const auto& row : result.table.rows) {
            CHECK(row.errors.grad_err <= 1e-10);
            CHECK(row.errors.l2_err <= 1e-10);
            CHECK(row.errors.max_nodal_err <= 1e-10);
            CHECK(std::isnan(row.grad_order));
            CHECK(row.diagnostics.alpha_h == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(result.files.empty());
    }
}

TEST_CASE("experiment writes identical files on repeated runs") {
    auto cfg = default_config(ProblemKind::ellipse_test1);
    cfg.sweep = {2, 4, 8};
    cfg.dump_meshes = true;
    const fs::path dir_a = scratch_dir("det_a");
    cfg.out_dir = dir_a.string();
    const auto first = run_experiment(cfg);
    cfg.out_dir = scratch_dir("det_b").string();
    run_experiment(cfg);
    for (const char* name : {"table.csv", "table.md", "diagnostics.csv", "mesh_4.txt"}) {
        CAPTURE(name);
        const fs::path a = dir_a / name;
        const fs::path b = fs::path(cfg.out_dir) / name;
        REQUIRE(fs::exists(a));
        CHECK(slurp(a) == slurp(b));
    }
    CHECK(first.files.size() >= 3);
    CHECK(first.entries.size() == 3);
    CHECK(first.entries[2].n_boundary_elements == 16);
    CHECK(first.entries[2].residual <= kResidualContract);

    // the mesh dump reads back as the generated mesh
    const auto dumped = read_mesh_file((fs::path(cfg.out_dir) / "mesh_4.txt").string());
    const auto mesh = gen_quarter_ellipse_mesh(4, 0.5);
    CHECK(dumped.vertices == mesh.vertices);
    CHECK(dumped.triangles == mesh.triangles);
}

TEST_CASE("parallel sweep matches the deterministic one") {
    auto cfg = default_config(ProblemKind::annulus_test2);
    cfg.sweep = {4, 8, 16};
    const auto serial = run_experiment(cfg, false);
    cfg.deterministic = false;
    cfg.threads = 3;
    const auto parallel = run_experiment(cfg, false);
    REQUIRE(serial.table.rows.size() == parallel.table.rows.size());
    for (std::size_t i = 0; i < serial.table.rows.size(); ++i) {
        CHECK(serial.table.rows[i].errors.grad_err == parallel.table.rows[i].errors.grad_err);
        CHECK(serial.table.rows[i].errors.l2_err == parallel.table.rows[i].errors.l2_err);
    }
}

TEST_CASE("output directory override from the environment") {
    auto cfg = default_config(ProblemKind::polygon_patch);
    cfg.sweep = {2};
    cfg.out_dir = scratch_dir("ignored").string();
    const fs::path target = scratch_dir("env");
    ::setenv("PGFEM_OUT_DIR", target.c_str(), 1);
    const auto result = run_experiment(cfg);
    ::unsetenv("PGFEM_OUT_DIR");
    CHECK(fs::exists(target / "table.csv"));
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "table.csv"));
    REQUIRE_FALSE(result.files.empty());
    CHECK(fs::path(result.files.front()).parent_path() == target);
}

TEST_CASE("custom problem reads meshes from files") {
    const fs::path dir = scratch_dir("custom");
    fs::create_directories(dir);
    ExperimentConfig cfg = default_config(ProblemKind::custom);
    cfg.geometry.kind = GeometryKind::ellipse;
    cfg.geometry.e = 0.5;
    cfg.sweep = {4, 8};
    for (int J : cfg.sweep) {
        const auto path = dir / ("m" + std::to_string(J) + ".txt");
        write_mesh_file(path.string(), gen_quarter_ellipse_mesh(J, 0.5));
        cfg.mesh_files.push_back(path.string());
    }
    const auto custom = run_experiment(cfg, false);
    auto ref_cfg = default_config(ProblemKind::ellipse_test1);
    ref_cfg.sweep = {4, 8};
    const auto ref = run_experiment(ref_cfg, false);
    for (std::size_t i = 0; i < 2; ++i) CHECK(custom.table.rows[i].errors.grad_err == ref.table.rows[i].errors.grad_err);
}

TEST_CASE("numerical failures name the sweep entry") {
    const fs::path dir = scratch_dir("broken");
    fs::create_directories(dir);
    // A mesh whose curved edge does not lie on the ellipse.
    auto mesh = gen_quarter_ellipse_mesh(2, 0.5);
    mesh.vertices[mesh.boundary_edges[0].v[0]] *= 0.9;
    const auto path = dir / "bad.txt";
    write_mesh_file(path.string(), mesh);
    ExperimentConfig cfg = default_config(ProblemKind::custom);
    cfg.geometry.kind = GeometryKind::ellipse;
    cfg.sweep = {2};
    cfg.mesh_files = {path.string()};
    try {
        run_experiment(cfg, false);
        FAIL("expected a failure");
    } catch (const Error& ex) {
        CHECK(std::string(ex.what()).find("2") != std::string::npos);
    }
}
