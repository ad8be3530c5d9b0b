#pragma once

// Constitutive layer of the isentropic Euler system with Maxwell-type stress
// relaxation in divergence form:
//
//   rho_t + (rho u)_x                   = 0
//   (rho u)_t + (rho u^2 + p(rho) - S)_x = 0
//   tau ((rho S)_t + (rho u S)_x) - u_x = -S
//
// with p(rho) = rho^gamma. Everything here is a pure function.

#include <array>
#include <stdexcept>

namespace relaxfv {

/// Thrown for states outside the open state space (rho <= 0) and for
/// parameters outside their admissible ranges.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ModelParams {
public:
    ModelParams(double gamma, double tau, double rho_bar = 1.0);

    double gamma() const { return gamma_; }
    double tau() const { return tau_; }
    double rho_bar() const { return rho_bar_; }

private:
    double gamma_;
    double tau_;
    double rho_bar_;
};

/// Primitive point state (rho, u, S).
struct PointState {
    double rho = 1.0;
    double u = 0.0;
    double S = 0.0;
};

/// Conserved densities (rho, rho u, rho S).
struct ConsTriple {
    double rho = 1.0;
    double mom = 0.0;
    double rw = 0.0;

    ConsTriple &operator+=(const ConsTriple &o) {
        rho += o.rho;
        mom += o.mom;
        rw += o.rw;
        return *this;
    }
    ConsTriple &operator-=(const ConsTriple &o) {
        rho -= o.rho;
        mom -= o.mom;
        rw -= o.rw;
        return *this;
    }
    ConsTriple &operator*=(double a) {
        rho *= a;
        mom *= a;
        rw *= a;
        return *this;
    }
    friend ConsTriple operator+(ConsTriple a, const ConsTriple &b) { return a += b; }
    friend ConsTriple operator-(ConsTriple a, const ConsTriple &b) { return a -= b; }
    friend ConsTriple operator*(double s, ConsTriple a) { return a *= s; }
    friend bool operator==(const ConsTriple &, const ConsTriple &) = default;
};

/// Physical flux of the homogeneous part: (rho u, rho u^2 + p - S, rho u S).
struct FluxTriple {
    double f_rho = 0.0;
    double f_mom = 0.0;
    double f_rw = 0.0;
};

/// Characteristic speeds, ordered: lambda1 = u - a, lambda2 = u, lambda3 = u + a.
struct SpeedTriple {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;

    double max_abs() const;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Coefficients of the quasilinear form A0(U) U_t + A1(U) U_x + B U = 0
/// written in primitive variables U = (rho, u, S).
struct QuasilinearForm {
    Matrix3 A0{};
    Matrix3 A1{};
    Matrix3 B{};
};

double pressure(double rho, const ModelParams &params);
/// p'(rho) = gamma rho^(gamma - 1).
double pressure_derivative(double rho, const ModelParams &params);

ConsTriple to_conservative(const PointState &p);
PointState to_primitive(const ConsTriple &c);

FluxTriple physical_flux(const ConsTriple &c, const ModelParams &params);

/// a = sqrt(p'(rho) + 1 / (tau rho^2)).
double wave_speed(double rho, const ModelParams &params);
SpeedTriple char_speeds(const PointState &p, const ModelParams &params);

QuasilinearForm quasilinear_matrices(const PointState &p, const ModelParams &params);

/// Convex entropy
///   (p(rho) - p(rho_bar) - p'(rho_bar)(rho - rho_bar)) / (gamma - 1)
///   + tau rho S^2 / 2 + rho u^2 / 2,
/// vanishing only at (rho_bar, 0, 0).
double entropy_density(const PointState &p, const ModelParams &params);

/// Entropy flux paired with entropy_density so that, on smooth solutions,
/// eta_t + q_x = -S^2:
///   gamma/(gamma-1) u p - p'(rho_bar)/(gamma-1) rho u
///   + rho u^3 / 2 + tau rho u S^2 / 2 - u S.
/// The affine term carries a minus sign: it compensates the time derivative
/// of -p'(rho_bar)(rho - rho_bar)/(gamma-1) through the mass equation.
double entropy_flux(const PointState &p, const ModelParams &params);

/// Rate of the rho S balance: (u_x - S) / tau.
double relaxation_rhs(const PointState &p, double u_x, const ModelParams &params);

/// Reference equilibrium (rho_bar, 0, 0) in conserved form.
ConsTriple equilibrium(const ModelParams &params);

} // namespace relaxfv
