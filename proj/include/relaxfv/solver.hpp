#pragma once

// Conservative finite-volume evolution with operator splitting: a local
// Lax-Friedrichs (or limited MUSCL) update of the transport part followed by
// an exact exponential integration of the stress relaxation.
//
// Two ways of splitting the stress equation are offered. In the "source"
// coupling the transport part carries only rho u S and the relaxation step
// integrates S_t = (u_x - S) / (tau rho) with a central u_x. In the "flux"
// coupling the velocity term moves into the flux, (rho S)_t + (rho u S - u /
// tau)_x = -S / tau, so the transport part is a full hyperbolic system with
// the model's characteristic speeds and the relaxation is pure decay.

#include "relaxfv/model.hpp"
#include "relaxfv/planner.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaxfv {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown from inside a step when a density turns non-positive or a value
/// stops being finite. `run` converts it into a blow-up outcome.
class SingularityDetected : public std::runtime_error {
public:
    SingularityDetected(double time, std::size_t cell, double x, const std::string &what);

    double time() const { return time_; }
    std::size_t cell() const { return cell_; }
    double x() const { return x_; }

private:
    double time_;
    std::size_t cell_;
    double x_;
};

class Grid {
public:
    Grid() : Grid(0.0, 1.0, 1) {}
    Grid(double x_min, double x_max, std::size_t n_cells);

    /// Symmetric grid [-n dx / 2, n dx / 2] with n even, covering at least
    /// [-half_width, half_width]. Cell edges fall on multiples of dx.
    static Grid symmetric(double half_width, double dx);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }
    double center(std::size_t i) const { return x_min_ + (static_cast<double>(i) + 0.5) * dx_; }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

struct Field {
    Grid grid;
    std::vector<ConsTriple> cells;
    double time = 0.0;

    PointState primitive(std::size_t i) const { return to_primitive(cells[i]); }
};

enum class Splitting { Godunov, Strang };

std::string to_string(Splitting s);
Splitting parse_splitting(const std::string &s);

enum class Coupling { Flux, Source };

std::string to_string(Coupling c);
Coupling parse_coupling(const std::string &s);

enum class Limiter { VanLeer, Minmod, MC };

std::string to_string(Limiter l);
Limiter parse_limiter(const std::string &s);

struct SimConfig {
    ModelParams params{2.0, 1.0};
    double dx = 1.0 / 32.0;
    /// Extra room beyond the propagation cone max(R, M) + sigma_tilde t_end.
    /// A negative value selects the default 20 dx + 2.
    double domain_margin = -1.0;
    double cfl = 0.4;
    double t_end = 0.2;
    int order = 2;
    Limiter limiter = Limiter::VanLeer;
    Coupling coupling = Coupling::Flux;
    Splitting splitting = Splitting::Godunov;
    /// Observer cadence in simulation time; steps are shortened to land on it.
    double output_dt = 0.01;
    double eps_support = 1e-6;
    /// Blow-up when max |u_{i+1} - u_i| / dx exceeds grad_jump / dx, i.e.
    /// when a single cell carries a velocity jump of grad_jump.
    double grad_jump = 1.0;
    double min_rho = 1e-8;
    /// Cells from either boundary that must stay at equilibrium.
    std::size_t breach_cells = 5;

    double grad_limit() const { return grad_jump / dx; }
    void validate() const;
};

/// Half-width of the computational domain for `data` and `cfg`.
double domain_half_width(const SimConfig &cfg, const InitialData &data, double sigma_tilde);

/// Cell averages of (rho0, rho0 u0, rho0 S0) from four midpoint samples per
/// cell. Cells entirely outside (-M, M) and (-R, R) are set to equilibrium
/// exactly.
Field init_state(const Grid &grid, const InitialData &data, const ModelParams &params);

/// cfl dx / max |lambda|. Throws SingularityDetected on a non-finite speed.
double stable_dt(const Field &f, double cfl, const ModelParams &params);

/// Flux of the transport part: physical_flux, plus -u / tau in the third
/// component for the flux coupling.
FluxTriple transport_flux(const ConsTriple &c, const ModelParams &params, Coupling coupling);

/// Conservative transport update with equilibrium ghost cells. Order 2 is
/// MUSCL on the conserved variables with a midpoint predictor.
Field hyperbolic_step(const Field &f, double dt, const ModelParams &params, int order = 1,
                      Coupling coupling = Coupling::Source, Limiter limiter = Limiter::VanLeer);

/// S <- u_x + (S - u_x) exp(-dt / (tau rho)) per cell, rho frozen. For the
/// source coupling u_x is the central difference of the cell velocities
/// (one-sided at the ends); for the flux coupling u_x = 0.
Field relaxation_step(const Field &f, double dt, const ModelParams &params, Coupling coupling = Coupling::Source);

/// Cells the split update can touch per time step (numerical dependence
/// cone): a transport stage reaches 1 cell at order 1 and 2 per predictor
/// stage at order 2; a source-coupled relaxation reaches 1 more.
std::size_t stencil_reach_per_step(int order, Splitting splitting, Coupling coupling = Coupling::Source);

/// One full split step.
Field advance(const Field &f, double dt, const SimConfig &cfg);

enum class Outcome { Completed, BlowUp, BoundaryBreach };

std::string to_string(Outcome o);

struct RunResult {
    Outcome outcome = Outcome::Completed;
    double time = 0.0;
    /// Location of the detected singularity or breach.
    double x = 0.0;
    std::string reason;
    std::size_t steps = 0;
    /// max |du/dx| at the stopping time.
    double max_grad = 0.0;
    Field final_field;
};

/// Called with an immutable snapshot at t = 0, on every output_dt boundary
/// and at the stopping time.
using Observer = std::function<void(const Field &)>;

/// max_i |u_{i+1} - u_i| / dx and its interface location.
struct GradientProbe {
    double max_grad = 0.0;
    double x = 0.0;
};
GradientProbe max_velocity_gradient(const Field &f);

/// Runs on a grid sized by domain_half_width. Deterministic.
RunResult run(const SimConfig &cfg, const InitialData &data, double sigma_tilde, const Observer &observer = {});

/// Same on a caller-supplied grid.
RunResult run_on(const SimConfig &cfg, Field initial, const Observer &observer = {});

} // namespace relaxfv
