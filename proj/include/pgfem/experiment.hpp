#pragma once

#include "pgfem/analysis.hpp"
#include "pgfem/linsolve.hpp"
#include "pgfem/problems.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pgfem {

/// Mesh, local bases and global numbering for one problem and degree.
struct Discretization {
    TriMesh mesh;
    std::vector<LocalBasis> bases;
    DofMap dofmap;
    int k = 2;
};

Discretization discretize(TriMesh mesh, const ProblemSpec& problem, int k);

struct SolvedProblem {
    Discretization disc;
    AssembledSystem system;
    SolveReport report;
    Eigen::VectorXd nodal;  // solution at every global node
};

SolvedProblem solve_problem(TriMesh mesh, const ProblemSpec& problem, int k, const QuadratureDegrees& rules = {});

/// Gradient-norm error of the trial-space interpolant of the exact solution.
double interpolation_grad_error(const Discretization& disc, const ProblemSpec& problem,
                                const QuadratureDegrees& rules = {});

/// Discrete inf-sup constant of an assembled problem.
double inf_sup_constant(const Discretization& disc, const AssembledSystem& system, const QuadratureDegrees& rules = {},
                        std::size_t max_unknowns = kMaxDenseInfSup);

enum class ProblemKind { ellipse_test1, annulus_test2, polygon_patch, custom };

struct GeometrySpec {
    GeometryKind kind = GeometryKind::ellipse;
    double e = 0.5;
    std::vector<Point> vertices;

    BoundaryGeometry build() const;
    bool operator==(const GeometrySpec&) const = default;
};

struct ExperimentConfig {
    ProblemKind problem = ProblemKind::ellipse_test1;
    double e = 0.5;
    int k = 2;
    std::vector<int> sweep{4, 8, 16, 32, 64};
    ExtensionMode extension_mode = ExtensionMode::analytic;
    AngularRange angular_range = AngularRange::half_pi;
    EllipseLayout ellipse_layout = EllipseLayout::square_rings;
    QuadratureDegrees quadrature;
    std::string out_dir = "out";
    bool deterministic = true;
    int threads = 1;
    bool dump_meshes = false;
    bool dump_matrices = false;
    std::size_t inf_sup_max_unknowns = 2500;
    int patch_degree = -1;  // polygon_patch: degree of the exact polynomial, -1 means k
    // custom problems: geometry and one mesh file per sweep entry
    GeometrySpec geometry;
    std::vector<std::string> mesh_files;

    bool operator==(const ExperimentConfig& other) const;
};

/// Defaults for a named problem (sweep and geometry).
ExperimentConfig default_config(ProblemKind problem);

ProblemKind parse_problem_kind(const std::string& name);
std::string to_string(ProblemKind kind);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Throws Error(ParseError | InvalidParam) on malformed or invalid input.
ExperimentConfig config_from_json(const nlohmann::json& j);
void validate_config(const ExperimentConfig& cfg);

struct SweepEntryResult {
    int param = 0;
    ErrorReport errors;
    Diagnostics diagnostics;
    double interp_grad_err = kNaN;
    double residual = kNaN;
    std::size_t n_unknowns = 0;
    std::size_t n_boundary_elements = 0;
    double gamma = kNaN;
};

struct ExperimentResult {
    ConvergenceTable table;
    std::vector<SweepEntryResult> entries;
    std::vector<std::string> files;
};

/// Builds the problem and mesh for one sweep entry.
ProblemSpec make_problem(const ExperimentConfig& cfg);
TriMesh make_sweep_mesh(const ExperimentConfig& cfg, std::size_t entry);

/// Runs the whole sweep. Errors are rethrown with the failing sweep entry in
/// the message. When `write_files` is set, table.csv, table.md and
/// diagnostics.csv are written to cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write_files = true);

}  // namespace pgfem
