#include "relaxfv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace relaxfv {

SingularityDetected::SingularityDetected(double time, std::size_t cell, double x, const std::string &what)
    : std::runtime_error(what), time_(time), cell_(cell), x_(x) {}

Grid::Grid(double x_min, double x_max, std::size_t n_cells) : x_min_(x_min), x_max_(x_max), n_(n_cells) {
    if (n_cells == 0) throw ConfigError("grid needs at least one cell");
    if (!(x_max > x_min)) throw ConfigError("grid bounds must satisfy x_min < x_max");
    dx_ = (x_max - x_min) / static_cast<double>(n_cells);
}

Grid Grid::symmetric(double half_width, double dx) {
    if (!(dx > 0.0) || !(half_width > 0.0)) throw ConfigError("grid spacing and width must be positive");
    const auto half = static_cast<std::size_t>(std::ceil(half_width / dx - 1e-9));
    const double edge = static_cast<double>(half) * dx;
    return Grid(-edge, edge, 2 * half);
}

std::string to_string(Splitting s) { return s == Splitting::Godunov ? "godunov" : "strang"; }

Splitting parse_splitting(const std::string &s) {
    if (s == "godunov") return Splitting::Godunov;
    if (s == "strang") return Splitting::Strang;
    throw ConfigError("unknown splitting '" + s + "' (expected godunov or strang)");
}

std::string to_string(Coupling c) { return c == Coupling::Flux ? "flux" : "source"; }

Coupling parse_coupling(const std::string &s) {
    if (s == "flux") return Coupling::Flux;
    if (s == "source") return Coupling::Source;
    throw ConfigError("unknown coupling '" + s + "' (expected flux or source)");
}

std::string to_string(Limiter l) {
    switch (l) {
    case Limiter::VanLeer: return "vanleer";
    case Limiter::Minmod: return "minmod";
    case Limiter::MC: return "mc";
    }
    return "unknown";
}

Limiter parse_limiter(const std::string &s) {
    if (s == "vanleer") return Limiter::VanLeer;
    if (s == "minmod") return Limiter::Minmod;
    if (s == "mc") return Limiter::MC;
    throw ConfigError("unknown limiter '" + s + "' (expected vanleer, minmod or mc)");
}

FluxTriple transport_flux(const ConsTriple &c, const ModelParams &params, Coupling coupling) {
    FluxTriple fl = physical_flux(c, params);
    if (coupling == Coupling::Flux) fl.f_rw -= c.mom / c.rho / params.tau();
    return fl;
}

void SimConfig::validate() const {
    if (!(dx > 0.0)) throw ConfigError("dx must be positive");
    if (!(cfl > 0.0 && cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
    if (!(output_dt > 0.0)) throw ConfigError("output_dt must be positive");
    if (!(eps_support > 0.0)) throw ConfigError("eps_support must be positive");
    if (!(grad_jump > 0.0)) throw ConfigError("grad_jump must be positive");
    if (!(min_rho > 0.0)) throw ConfigError("min_rho must be positive");
}

double domain_half_width(const SimConfig &cfg, const InitialData &data, double sigma_tilde) {
    const double margin = cfg.domain_margin < 0.0 ? 20.0 * cfg.dx + 2.0 : cfg.domain_margin;
    const double reach = std::max(static_cast<double>(data.velocity.M()), data.density.R);
    return reach + sigma_tilde * cfg.t_end + margin;
}

Field init_state(const Grid &grid, const InitialData &data, const ModelParams &params) {
    if (grid.dx() > 1.0 / 16.0) throw ConfigError("grid too coarse: need at least 16 cells per unit length");
    const double reach = std::max(static_cast<double>(data.velocity.M()), data.density.R);
    const double h = grid.dx();
    Field f{grid, std::vector<ConsTriple>(grid.size(), equilibrium(params)), 0.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid.center(i) - 0.5 * h;
        const double b = a + h;
        if (b <= -reach || a >= reach) continue;
        ConsTriple avg{0.0, 0.0, 0.0};
        for (int k = 0; k < 4; ++k) {
            const double x = a + (k + 0.5) * 0.25 * h;
            const double rho = data.rho(x);
            avg += to_conservative({rho, data.u(x), data.S(x)});
        }
        f.cells[i] = 0.25 * avg;
    }
    return f;
}

double stable_dt(const Field &f, double cfl, const ModelParams &params) {
    double smax = char_speeds(to_primitive(equilibrium(params)), params).max_abs();
    for (std::size_t i = 0; i < f.cells.size(); ++i) {
        const double s = char_speeds(f.primitive(i), params).max_abs();
        if (!std::isfinite(s))
            throw SingularityDetected(f.time, i, f.grid.center(i), "non-finite characteristic speed");
        smax = std::max(smax, s);
    }
    return cfl * f.grid.dx() / smax;
}

namespace {

double limited(double a, double b, Limiter lim) {
    if (a * b <= 0.0) return 0.0;
    if (lim == Limiter::VanLeer) return 2.0 * a * b / (a + b);
    if (lim == Limiter::MC) {
        const double m = std::min({2.0 * std::abs(a), 2.0 * std::abs(b), 0.5 * std::abs(a + b)});
        return a > 0.0 ? m : -m;
    }
    return std::abs(a) < std::abs(b) ? a : b;
}

ConsTriple limited(const ConsTriple &a, const ConsTriple &b, Limiter lim) {
    return {limited(a.rho, b.rho, lim), limited(a.mom, b.mom, lim), limited(a.rw, b.rw, lim)};
}

struct Scheme {
    int order;
    Coupling coupling;
    Limiter limiter;
};

struct Evaluated {
    FluxTriple flux;
    double speed;
};

Evaluated evaluate(const ConsTriple &c, const ModelParams &params, Coupling coupling) {
    return {transport_flux(c, params, coupling), char_speeds(to_primitive(c), params).max_abs()};
}

ConsTriple llf(const ConsTriple &uL, const ConsTriple &uR, const ModelParams &params, Coupling coupling) {
    const Evaluated l = evaluate(uL, params, coupling);
    const Evaluated r = evaluate(uR, params, coupling);
    const double alpha = std::max(l.speed, r.speed);
    return {0.5 * (l.flux.f_rho + r.flux.f_rho) - 0.5 * alpha * (uR.rho - uL.rho),
            0.5 * (l.flux.f_mom + r.flux.f_mom) - 0.5 * alpha * (uR.mom - uL.mom),
            0.5 * (l.flux.f_rw + r.flux.f_rw) - 0.5 * alpha * (uR.rw - uL.rw)};
}

void check_cell(const ConsTriple &c, double time, std::size_t i, const Grid &grid) {
    if (!std::isfinite(c.rho) || !std::isfinite(c.mom) || !std::isfinite(c.rw)) {
        throw SingularityDetected(time, i, grid.center(i), "non-finite state");
    }
    if (!(c.rho > 0.0)) throw SingularityDetected(time, i, grid.center(i), "non-positive density");
}

/// Interface fluxes F_{i-1/2}, i = 0..n, with equilibrium ghosts.
std::vector<ConsTriple> interface_fluxes(const std::vector<ConsTriple> &u, const ModelParams &params,
                                         const Scheme &scheme, double time, const Grid &grid) {
    const std::size_t n = u.size();
    const ConsTriple ghost = equilibrium(params);
    auto at = [&](std::ptrdiff_t i) -> const ConsTriple & {
        if (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) return ghost;
        return u[static_cast<std::size_t>(i)];
    };
    std::vector<ConsTriple> flux(n + 1);
    if (scheme.order == 1) {
        for (std::size_t k = 0; k <= n; ++k) {
            const auto i = static_cast<std::ptrdiff_t>(k);
            flux[k] = llf(at(i - 1), at(i), params, scheme.coupling);
        }
        return flux;
    }
    // slopes for cells -1..n
    std::vector<ConsTriple> slope(n + 2);
    for (std::ptrdiff_t i = -1; i <= static_cast<std::ptrdiff_t>(n); ++i) {
        slope[static_cast<std::size_t>(i + 1)] = limited(at(i) - at(i - 1), at(i + 1) - at(i), scheme.limiter);
    }
    for (std::size_t k = 0; k <= n; ++k) {
        const auto i = static_cast<std::ptrdiff_t>(k);
        const ConsTriple uL = at(i - 1) + 0.5 * slope[k];
        const ConsTriple uR = at(i) - 0.5 * slope[k + 1];
        if (!(uL.rho > 0.0) || !(uR.rho > 0.0)) {
            const std::size_t cell = std::min(k, n - 1);
            throw SingularityDetected(time, cell, grid.center(cell), "non-positive reconstructed density");
        }
        flux[k] = llf(uL, uR, params, scheme.coupling);
    }
    return flux;
}

std::vector<ConsTriple> apply_update(const std::vector<ConsTriple> &base, const std::vector<ConsTriple> &flux,
                                     double ratio, double time, const Grid &grid) {
    std::vector<ConsTriple> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = base[i] - ratio * (flux[i + 1] - flux[i]);
        check_cell(out[i], time, i, grid);
    }
    return out;
}

} // namespace

Field hyperbolic_step(const Field &f, double dt, const ModelParams &params, int order, Coupling coupling,
                      Limiter limiter) {
    if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
    const Scheme scheme{order, coupling, limiter};
    const double ratio = dt / f.grid.dx();
    const double t_new = f.time + dt;
    Field out{f.grid, {}, t_new};
    if (order == 1) {
        out.cells = apply_update(f.cells, interface_fluxes(f.cells, params, scheme, f.time, f.grid), ratio, t_new, f.grid);
        return out;
    }
    // midpoint predictor
    const auto half = apply_update(f.cells, interface_fluxes(f.cells, params, scheme, f.time, f.grid), 0.5 * ratio,
                                   f.time + 0.5 * dt, f.grid);
    out.cells =
        apply_update(f.cells, interface_fluxes(half, params, scheme, f.time + 0.5 * dt, f.grid), ratio, t_new, f.grid);
    return out;
}

Field relaxation_step(const Field &f, double dt, const ModelParams &params, Coupling coupling) {
    const std::size_t n = f.cells.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = f.cells[i].mom / f.cells[i].rho;
    const double dx = f.grid.dx();
    Field out = f;
    for (std::size_t i = 0; i < n; ++i) {
        double u_x;
        if (n == 1 || coupling == Coupling::Flux) {
            u_x = 0.0;
        } else if (i == 0) {
            u_x = (u[1] - u[0]) / dx;
        } else if (i + 1 == n) {
            u_x = (u[n - 1] - u[n - 2]) / dx;
        } else {
            u_x = (u[i + 1] - u[i - 1]) / (2.0 * dx);
        }
        const double rho = f.cells[i].rho;
        const double S = f.cells[i].rw / rho;
        const double S_new = u_x + (S - u_x) * std::exp(-dt / (params.tau() * rho));
        out.cells[i].rw = rho * S_new;
    }
    return out;
}

std::size_t stencil_reach_per_step(int order, Splitting splitting, Coupling coupling) {
    const std::size_t hyperbolic = order == 1 ? 1 : 4;
    if (coupling == Coupling::Flux) return hyperbolic;
    const std::size_t relaxations = splitting == Splitting::Godunov ? 1 : 2;
    return hyperbolic + relaxations;
}

Field advance(const Field &f, double dt, const SimConfig &cfg) {
    auto hyp = [&](const Field &g) {
        return hyperbolic_step(g, dt, cfg.params, cfg.order, cfg.coupling, cfg.limiter);
    };
    if (cfg.splitting == Splitting::Godunov) {
        return relaxation_step(hyp(f), dt, cfg.params, cfg.coupling);
    }
    const Field a = relaxation_step(f, 0.5 * dt, cfg.params, cfg.coupling);
    return relaxation_step(hyp(a), 0.5 * dt, cfg.params, cfg.coupling);
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::BlowUp: return "blow-up detected";
    case Outcome::BoundaryBreach: return "boundary breached";
    }
    return "unknown";
}

GradientProbe max_velocity_gradient(const Field &f) {
    GradientProbe probe;
    const double dx = f.grid.dx();
    for (std::size_t i = 0; i + 1 < f.cells.size(); ++i) {
        const double g =
            std::abs(f.cells[i + 1].mom / f.cells[i + 1].rho - f.cells[i].mom / f.cells[i].rho) / dx;
        if (g > probe.max_grad) {
            probe.max_grad = g;
            probe.x = f.grid.center(i) + 0.5 * dx;
        }
    }
    return probe;
}

namespace {

bool off_equilibrium(const ConsTriple &c, const ModelParams &params, double eps) {
    const PointState p = to_primitive(c);
    return std::max({std::abs(p.rho - params.rho_bar()), std::abs(p.u), std::abs(p.S)}) > eps;
}

} // namespace

RunResult run_on(const SimConfig &cfg, Field field, const Observer &observer) {
    cfg.validate();
    const std::size_t n = field.cells.size();
    if (n < 2 * cfg.breach_cells + 1) throw ConfigError("grid too small for the boundary breach detector");

    RunResult result;
    const double t0 = field.time;
    double last_observed = t0;
    if (observer) observer(field);
    long next_k = 1;
    // tolerance for landing on output and end times
    const double slack = 1e-12 * std::max(1.0, cfg.t_end);

    auto stop = [&](Outcome o, double x, std::string reason) {
        result.outcome = o;
        result.x = x;
        result.reason = std::move(reason);
        result.time = field.time;
        result.max_grad = max_velocity_gradient(field).max_grad;
        if (observer && field.time != last_observed) observer(field);
        result.final_field = field;
        return result;
    };

    while (field.time < cfg.t_end - slack) {
        const double next_out = t0 + static_cast<double>(next_k) * cfg.output_dt;
        double dt;
        try {
            dt = stable_dt(field, cfg.cfl, cfg.params);
        } catch (const SingularityDetected &e) {
            return stop(Outcome::BlowUp, e.x(), e.what());
        }
        bool lands_on_output = false;
        if (field.time + dt >= next_out - slack) {
            dt = next_out - field.time;
            lands_on_output = true;
        }
        if (field.time + dt > cfg.t_end - slack) {
            dt = cfg.t_end - field.time;
            lands_on_output = std::abs(cfg.t_end - next_out) <= slack;
        }
        try {
            Field next = advance(field, dt, cfg);
            next.time = lands_on_output ? next_out : field.time + dt;
            field = std::move(next);
        } catch (const SingularityDetected &e) {
            return stop(Outcome::BlowUp, e.x(), e.what());
        }
        ++result.steps;
        if (lands_on_output) ++next_k;

        double min_rho = field.cells[0].rho;
        for (const auto &c : field.cells) min_rho = std::min(min_rho, c.rho);
        if (min_rho < cfg.min_rho) {
            const auto it = std::min_element(field.cells.begin(), field.cells.end(),
                                             [](const ConsTriple &a, const ConsTriple &b) { return a.rho < b.rho; });
            const auto i = static_cast<std::size_t>(it - field.cells.begin());
            return stop(Outcome::BlowUp, field.grid.center(i), "density below min_rho");
        }
        const GradientProbe probe = max_velocity_gradient(field);
        if (probe.max_grad > cfg.grad_limit()) {
            std::ostringstream os;
            os << "velocity gradient " << probe.max_grad << " above limit " << cfg.grad_limit();
            return stop(Outcome::BlowUp, probe.x, os.str());
        }
        for (std::size_t k = 0; k < cfg.breach_cells; ++k) {
            for (const std::size_t i : {k, n - 1 - k}) {
                if (off_equilibrium(field.cells[i], cfg.params, cfg.eps_support)) {
                    return stop(Outcome::BoundaryBreach, field.grid.center(i), "non-equilibrium state near boundary");
                }
            }
        }
        if (lands_on_output && observer) {
            observer(field);
            last_observed = field.time;
        }
    }
    return stop(Outcome::Completed, 0.0, "reached t_end");
}

RunResult run(const SimConfig &cfg, const InitialData &data, double sigma_tilde, const Observer &observer) {
    cfg.validate();
    const Grid grid = Grid::symmetric(domain_half_width(cfg, data, sigma_tilde), cfg.dx);
    return run_on(cfg, init_state(grid, data, cfg.params), observer);
}

} // namespace relaxfv
