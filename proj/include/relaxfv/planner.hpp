#pragma once

// Large-data construction: the odd plateau/cosine velocity profile, the
// constants of the blow-up argument, their admissibility inequalities and
// the deadline t* past which no smooth solution can exist.

#include "relaxfv/model.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace relaxfv {

class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// `Corrected` is C^1 and odd. `Printed` keeps the literal middle piece
/// L cos(pi (x + M)) and right ramp (L/2) cos(pi (x + M)) + L/2, which jump
/// at x = 1 and x = M - 1; it is kept only for comparison.
enum class ProfileVariant { Corrected, Printed };

std::string to_string(ProfileVariant v);
ProfileVariant parse_profile_variant(const std::string &s);

class ProfileSpec {
public:
    /// Requires L > 0, M even and M >= max(4, R), R > 0.
    ProfileSpec(double L, int M, double R = 1.0, ProfileVariant variant = ProfileVariant::Corrected);

    double L() const { return L_; }
    int M() const { return M_; }
    double R() const { return R_; }
    ProfileVariant variant() const { return variant_; }

private:
    double L_;
    int M_;
    double R_;
    ProfileVariant variant_;
};

double velocity_profile(const ProfileSpec &spec, double x);

/// Exact squared L2 norm, 2 L^2 M - (9/4) L^2 (both variants share it for
/// even M). Never exceeds 2 L^2 M.
double profile_norm_sq(const ProfileSpec &spec);

/// Density and stress part of the initial data. rho0 - rho_bar and S0 are
/// supported in (-R, R).
struct DensityData {
    std::function<double(double)> rho0;
    std::function<double(double)> S0;
    double R = 1.0;
};

/// rho0 == 1, S0 == 0.
DensityData uniform_density(double R = 1.0);

/// rho0 = 1 + a cos^2(pi x / 2R), S0 = b cos^2(pi x / 2R) on |x| < R.
/// C^1, and the mass condition holds for a >= 0.
DensityData bump_density(double rho_amplitude, double stress_amplitude, double R);

struct InitialData {
    ProfileSpec velocity;
    DensityData density;
    /// 0 gives the fluid at rest; the profile still fixes the support.
    double velocity_scale = 1.0;

    double rho(double x) const { return density.rho0(x); }
    double u(double x) const { return velocity_scale * velocity_profile(velocity, x); }
    double S(double x) const { return density.S0(x); }
};

struct DensityStats {
    double rho_min = 1.0;
    double rho_max = 1.0;
    /// integral of rho0 - 1.
    double mass = 0.0;
};

/// Sampled at `resolution` cells per unit length over (-R, R); the far field
/// value 1 is always included in the min and max.
DensityStats density_stats(const DensityData &d, int resolution);

/// Integral of the entropy of (rho0, 0, S0) over (-R, R), composite midpoint.
/// Requires resolution >= 64 cells per unit length.
double compute_H0(const DensityData &d, const ModelParams &params, int resolution);

/// Integral of x rho0 u0 over (-M, M), composite midpoint.
double initial_moment(const InitialData &data, int resolution);

/// One inequality re-checked in floating point. margin > 0 iff satisfied
/// (for strict relations) and margin >= 0 iff satisfied otherwise.
struct InequalityCheck {
    std::string name;
    std::string relation; // "<", "<=", ">", ">=", "=="
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double rel_margin = 0.0;
    bool pass = false;
};

InequalityCheck make_check(std::string name, double lhs, const std::string &relation, double rhs,
                           double tolerance = 0.0);

struct TheoremPlan {
    double gamma = 0.0;
    double tau = 0.0;
    double rho_bar = 1.0;
    double R = 0.0;
    double rho_min = 1.0;
    double rho_max = 1.0;
    double mass = 0.0;
    double sigma = 0.0;
    double sigma_tilde = 0.0;
    double L = 0.0;
    int M = 0;
    ProfileVariant variant = ProfileVariant::Corrected;
    double H0 = 0.0;
    double norm_sq = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double F0 = 0.0;
    double F0_threshold = 0.0;
    double F0_critical = 0.0; // 8 c2 / c3
    std::optional<double> t_star;
    std::vector<InequalityCheck> checks;
    bool admissible = false;
    std::string violated; // first failing clause, empty if admissible

    const InequalityCheck *find_check(const std::string &name) const;
};

struct PlanPolicy {
    /// Relative strictness margin used when choosing L and M.
    double margin = 1e-9;
    int max_L = 1'000'000;
    int max_M = 100'000'000;
    int resolution = 64;
    ProfileVariant variant = ProfileVariant::Corrected;
};

/// Evaluates every constant and inequality for a given (L, M).
TheoremPlan evaluate_plan(const ModelParams &params, const DensityData &density, double L, int M,
                          const PlanPolicy &policy = {});

/// Picks the smallest even L and M satisfying the large-data and
/// large-support conditions, then evaluates the plan. Throws PlanningError
/// naming the binding constraint when a cap in `policy` is exceeded or the
/// preconditions fail.
TheoremPlan plan(const ModelParams &params, const DensityData &density, const PlanPolicy &policy = {});

/// Unique t* with c3 / (4 c2 (1 + c2 t*)^2) = c3 / (8 c2) - 1 / F0.
double blowup_deadline(double c2, double c3, double F0);
double blowup_deadline(const TheoremPlan &plan);

nlohmann::json to_json(const TheoremPlan &plan);
TheoremPlan plan_from_json(const nlohmann::json &j);

} // namespace relaxfv
