#pragma once

// Run configuration: INI sections model/grid/run/data/diagnostics/plan,
// command-line overrides on top, and a JSON echo of the resolved values.

#include "relaxfv/planner.hpp"
#include "relaxfv/solver.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace relaxfv {

struct RunSpec {
    double gamma = 2.0;
    double tau = 1.0;

    double dx = 1.0 / 32.0;
    double cfl = 0.4;
    double domain_margin = -1.0;

    double t_end = 0.2;
    int order = 2;
    Splitting splitting = Splitting::Godunov;
    Limiter limiter = Limiter::VanLeer;
    Coupling coupling = Coupling::Flux;
    double output_dt = 0.01;
    /// A snapshot every this many observer calls (plus the last one);
    /// 0 disables snapshots.
    int snapshot_every = 10;

    /// "profile" or "zero" (fluid at rest).
    std::string velocity = "profile";
    /// Absent L and M select the smallest admissible plan.
    std::optional<double> L;
    std::optional<int> M;
    double R = 1.0;
    ProfileVariant variant = ProfileVariant::Corrected;
    /// "uniform" or "bump".
    std::string density = "uniform";
    double bump_rho = 0.0;
    double bump_stress = 0.0;

    double eps_support = 1e-6;
    double grad_jump = 1.0;
    double min_rho = 1e-8;
    int breach_cells = 5;

    PlanPolicy policy;

    ModelParams params() const { return ModelParams(gamma, tau); }
    DensityData density_data() const;
    SimConfig sim_config() const;
    /// Throws ConfigError on inconsistent values.
    void validate() const;
};

/// Reads an INI file. Unknown sections or keys are errors (ConfigError).
/// Consistency is left to RunSpec::validate so command-line overrides can
/// complete a partial file.
RunSpec load_run_spec(const std::string &path);

nlohmann::json to_json(const RunSpec &spec);

/// Inverse of to_json; used by `verify` to read the manifest echo.
RunSpec run_spec_from_json(const nlohmann::json &j);

} // namespace relaxfv
