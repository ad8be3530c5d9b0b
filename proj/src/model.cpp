#include "relaxfv/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relaxfv {

namespace {

void require_positive_density(double rho, const char *where) {
    if (!(rho > 0.0)) {
        throw DomainError(std::string(where) + ": density must be positive, got " +
                          std::to_string(rho));
    }
}

} // namespace

ModelParams::ModelParams(double gamma, double tau, double rho_bar)
    : gamma_(gamma), tau_(tau), rho_bar_(rho_bar) {
    if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    if (!(rho_bar > 0.0)) throw DomainError("rho_bar must be positive");
}

double SpeedTriple::max_abs() const {
    return std::max({std::abs(lambda1), std::abs(lambda2), std::abs(lambda3)});
}

double pressure(double rho, const ModelParams &params) {
    require_positive_density(rho, "pressure");
    return std::pow(rho, params.gamma());
}

double pressure_derivative(double rho, const ModelParams &params) {
    require_positive_density(rho, "pressure_derivative");
    return params.gamma() * std::pow(rho, params.gamma() - 1.0);
}

ConsTriple to_conservative(const PointState &p) {
    require_positive_density(p.rho, "to_conservative");
    return {p.rho, p.rho * p.u, p.rho * p.S};
}

PointState to_primitive(const ConsTriple &c) {
    require_positive_density(c.rho, "to_primitive");
    return {c.rho, c.mom / c.rho, c.rw / c.rho};
}

FluxTriple physical_flux(const ConsTriple &c, const ModelParams &params) {
    const PointState p = to_primitive(c);
    return {c.mom, c.mom * p.u + pressure(p.rho, params) - p.S, c.mom * p.S};
}

double wave_speed(double rho, const ModelParams &params) {
    require_positive_density(rho, "wave_speed");
    return std::sqrt(pressure_derivative(rho, params) + 1.0 / (params.tau() * rho * rho));
}

SpeedTriple char_speeds(const PointState &p, const ModelParams &params) {
    const double a = wave_speed(p.rho, params);
    return {p.u - a, p.u, p.u + a};
}

QuasilinearForm quasilinear_matrices(const PointState &p, const ModelParams &params) {
    require_positive_density(p.rho, "quasilinear_matrices");
    const double tau = params.tau();
    QuasilinearForm q;
    q.A0 = {{{1.0, 0.0, 0.0}, {0.0, p.rho, 0.0}, {0.0, 0.0, tau * p.rho}}};
    q.A1 = {{{p.u, p.rho, 0.0},
             {pressure_derivative(p.rho, params), p.rho * p.u, -1.0},
             {0.0, -1.0, tau * p.rho * p.u}}};
    q.B = {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}}};
    return q;
}

double entropy_density(const PointState &p, const ModelParams &params) {
    const double g = params.gamma();
    const double rb = params.rho_bar();
    const double internal =
        (pressure(p.rho, params) - pressure(rb, params) - pressure_derivative(rb, params) * (p.rho - rb)) /
        (g - 1.0);
    return internal + 0.5 * params.tau() * p.rho * p.S * p.S + 0.5 * p.rho * p.u * p.u;
}

double entropy_flux(const PointState &p, const ModelParams &params) {
    const double g = params.gamma();
    const double m = p.rho * p.u;
    return g / (g - 1.0) * p.u * pressure(p.rho, params) -
           pressure_derivative(params.rho_bar(), params) / (g - 1.0) * m + 0.5 * m * p.u * p.u +
           0.5 * params.tau() * m * p.S * p.S - p.u * p.S;
}

double relaxation_rhs(const PointState &p, double u_x, const ModelParams &params) {
    require_positive_density(p.rho, "relaxation_rhs");
    return (u_x - p.S) / params.tau();
}

ConsTriple equilibrium(const ModelParams &params) { return {params.rho_bar(), 0.0, 0.0}; }

} // namespace relaxfv
