#include "relaxfv/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace relaxfv {

namespace {

constexpr double pi = std::numbers::pi;

double cos2_bump(double x, double R) {
    if (std::abs(x) >= R) return 0.0;
    const double c = std::cos(0.5 * pi * x / R);
    return c * c;
}

/// Composite midpoint rule on [a, b] with n equal cells.
template <class F>
double midpoint(F &&f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += f(a + (static_cast<double>(i) + 0.5) * h);
    return sum * h;
}

long cells_for(double length, int resolution) {
    return std::max(1L, static_cast<long>(std::ceil(length * resolution - 1e-9)));
}

int next_even_above(double x) {
    // smallest even integer strictly greater than x
    return 2 * (static_cast<int>(std::floor(x / 2.0)) + 1);
}

int even_ceil(double x) {
    int m = static_cast<int>(std::ceil(x - 1e-12));
    return m % 2 == 0 ? m : m + 1;
}

} // namespace

std::string to_string(ProfileVariant v) { return v == ProfileVariant::Corrected ? "corrected" : "printed"; }

ProfileVariant parse_profile_variant(const std::string &s) {
    if (s == "corrected") return ProfileVariant::Corrected;
    if (s == "printed") return ProfileVariant::Printed;
    throw PlanningError("unknown profile variant '" + s + "' (expected corrected or printed)");
}

ProfileSpec::ProfileSpec(double L, int M, double R, ProfileVariant variant)
    : L_(L), M_(M), R_(R), variant_(variant) {
    if (!(L > 0.0)) throw PlanningError("L must be positive");
    if (!(R > 0.0)) throw PlanningError("R must be positive");
    if (M <= 2) throw PlanningError("M must exceed 2");
    if (M % 2 != 0) throw PlanningError("M must be even");
    if (static_cast<double>(M) < std::max(4.0, R)) throw PlanningError("M must be at least max(4, R)");
}

double velocity_profile(const ProfileSpec &spec, double x) {
    const double L = spec.L();
    const double M = spec.M();
    const bool printed = spec.variant() == ProfileVariant::Printed;
    // M is an even integer, so cos(pi (x + M)) = cos(pi (x - M)) = cos(pi x);
    // the reduced arguments below are exact near the breakpoints.
    if (x <= -M) return 0.0;
    if (x <= -M + 1.0) return 0.5 * L * std::cos(pi * (x + M)) - 0.5 * L;
    if (x <= -1.0) return -L;
    if (x <= 1.0) return printed ? L * std::cos(pi * x) : L * std::sin(0.5 * pi * x);
    if (x <= M - 1.0) return L;
    if (x <= M) {
        const double c = std::cos(pi * (x - M));
        return printed ? 0.5 * L * c + 0.5 * L : -0.5 * L * c + 0.5 * L;
    }
    return 0.0;
}

double profile_norm_sq(const ProfileSpec &spec) {
    const double L2 = spec.L() * spec.L();
    const double value = 2.0 * L2 * spec.M() - 2.25 * L2;
    if (value > 2.0 * L2 * spec.M()) throw std::logic_error("profile norm exceeds 2 L^2 M");
    return value;
}

DensityData uniform_density(double R) {
    return {[](double) { return 1.0; }, [](double) { return 0.0; }, R};
}

DensityData bump_density(double rho_amplitude, double stress_amplitude, double R) {
    if (!(R > 0.0)) throw PlanningError("R must be positive");
    if (!(1.0 + std::min(rho_amplitude, 0.0) > 0.0)) throw PlanningError("density bump would leave (0, inf)");
    return {[=](double x) { return 1.0 + rho_amplitude * cos2_bump(x, R); },
            [=](double x) { return stress_amplitude * cos2_bump(x, R); }, R};
}

DensityStats density_stats(const DensityData &d, int resolution) {
    DensityStats s;
    const long n = cells_for(2.0 * d.R, resolution);
    const double h = 2.0 * d.R / static_cast<double>(n);
    double mass = 0.0;
    for (long i = 0; i < n; ++i) {
        const double r = d.rho0(-d.R + (static_cast<double>(i) + 0.5) * h);
        s.rho_min = std::min(s.rho_min, r);
        s.rho_max = std::max(s.rho_max, r);
        mass += r - 1.0;
    }
    s.mass = mass * h;
    return s;
}

double compute_H0(const DensityData &d, const ModelParams &params, int resolution) {
    if (resolution < 64) throw PlanningError("H0 quadrature needs at least 64 cells per unit length");
    const double H0 = midpoint(
        [&](double x) { return entropy_density({d.rho0(x), 0.0, d.S0(x)}, params); }, -d.R, d.R,
        cells_for(2.0 * d.R, resolution));
    if (H0 < -1e-12) throw std::logic_error("negative H0: broken quadrature or invalid rho0");
    return std::max(H0, 0.0);
}

double initial_moment(const InitialData &data, int resolution) {
    const double M = data.velocity.M();
    return midpoint([&](double x) { return x * data.rho(x) * data.u(x); }, -M, M,
                    cells_for(2.0 * M, resolution));
}

InequalityCheck make_check(std::string name, double lhs, const std::string &relation, double rhs,
                           double tolerance) {
    InequalityCheck c;
    c.name = std::move(name);
    c.relation = relation;
    c.lhs = lhs;
    c.rhs = rhs;
    if (relation == "<" || relation == "<=") {
        c.margin = rhs - lhs;
    } else if (relation == ">" || relation == ">=") {
        c.margin = lhs - rhs;
    } else if (relation == "==") {
        c.margin = -std::abs(lhs - rhs);
    } else {
        throw std::invalid_argument("unknown relation " + relation);
    }
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    c.rel_margin = scale > 0.0 ? c.margin / scale : 0.0;
    if (relation == "<" || relation == ">") {
        c.pass = c.margin > 0.0;
    } else if (relation == "==") {
        c.pass = -c.margin <= tolerance * std::max(scale, 1.0);
    } else {
        c.pass = c.margin >= -tolerance;
    }
    return c;
}

const InequalityCheck *TheoremPlan::find_check(const std::string &name) const {
    for (const auto &c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

void require_theorem_setting(const ModelParams &params) {
    if (params.rho_bar() != 1.0) throw PlanningError("the large-data construction requires rho_bar = 1");
}

double sigma_tilde_for(const ModelParams &params, double rho_max) {
    const double sigma2 = params.gamma() + 1.0 / params.tau();
    return std::sqrt(std::max(sigma2, 1.0 / (8.0 * rho_max)));
}

} // namespace

TheoremPlan evaluate_plan(const ModelParams &params, const DensityData &density, double L, int M,
                          const PlanPolicy &policy) {
    require_theorem_setting(params);
    const DensityStats stats = density_stats(density, policy.resolution);
    const InitialData data{ProfileSpec(L, M, density.R, policy.variant), density};

    TheoremPlan p;
    p.gamma = params.gamma();
    p.tau = params.tau();
    p.rho_bar = params.rho_bar();
    p.R = density.R;
    p.rho_min = stats.rho_min;
    p.rho_max = stats.rho_max;
    p.mass = stats.mass;
    p.sigma = std::sqrt(params.gamma() + 1.0 / params.tau());
    p.sigma_tilde = sigma_tilde_for(params, stats.rho_max);
    p.L = L;
    p.M = M;
    p.variant = policy.variant;
    p.H0 = compute_H0(density, params, policy.resolution);
    p.norm_sq = profile_norm_sq(data.velocity);

    const double rmax = p.rho_max;
    const double Md = M;
    p.c2 = p.sigma_tilde / Md;
    p.c3 = 1.0 / (2.0 * rmax * Md * Md * Md);
    p.c1 = 2.0 * p.c2 / p.c3;
    p.c4 = p.H0 / (2.0 * p.c1 * p.c1);
    p.c5 = rmax / (4.0 * p.c1 * p.c1);
    p.F0 = initial_moment(data, policy.resolution);
    p.F0_threshold = std::max(16.0 * p.sigma_tilde * Md * Md * rmax, Md * Md * std::sqrt(8.0 * rmax));
    p.F0_critical = 8.0 * p.c2 / p.c3;

    const double F0_fine = initial_moment(data, 2 * policy.resolution);
    const double H0_fine = compute_H0(density, params, 2 * policy.resolution);
    const double forcing = p.H0 + rmax * L * L * Md;
    const double chain_mid = p.c3 * p.c3 / (8.0 * p.c2 * p.c2) * forcing;

    auto &c = p.checks;
    c.push_back(make_check("initialmass", p.mass, ">=", 0.0, 1e-12));
    c.push_back(make_check("rho0_positive", p.rho_min, ">", 0.0));
    c.push_back(make_check("largespeed", p.sigma_tilde * p.sigma_tilde, "==",
                           std::max(p.sigma * p.sigma, 1.0 / (8.0 * rmax)), 1e-14));
    c.push_back(make_check("largedata", 0.5 * L * p.rho_min, ">",
                           std::max(std::sqrt(8.0 * rmax), 16.0 * p.sigma_tilde * rmax)));
    c.push_back(make_check("support_floor", Md, ">=", std::max(4.0, p.R)));
    c.push_back(make_check("largesupport", forcing, "<=", 2.0 * p.sigma_tilde * Md * Md * rmax));
    c.push_back(make_check("norm_bound", p.norm_sq, "<=", 2.0 * L * L * Md));
    c.push_back(make_check("chain_left", p.c4 + p.c5 * p.norm_sq, "<=", chain_mid));
    c.push_back(make_check("chain_right", chain_mid, "<=", p.c3 / (8.0 * p.c2)));
    c.push_back(make_check("threshold", p.F0, ">", p.F0_threshold));
    c.push_back(make_check("critical", p.F0, ">", p.F0_critical));
    c.push_back(make_check("apriori_F", p.F0, ">=", 2.0 * p.c1));
    c.push_back(make_check("apriori_F_squared", p.F0 * p.F0, ">=", 4.0 * Md / p.c3));
    c.push_back(make_check("quadrature_F0", std::abs(p.F0 - F0_fine), "<=", 1e-8 * std::abs(F0_fine)));
    c.push_back(make_check("quadrature_H0", std::abs(p.H0 - H0_fine), "<=", 1e-8 * std::abs(H0_fine)));

    if (1.0 / p.F0 < p.c3 / (8.0 * p.c2)) p.t_star = blowup_deadline(p.c2, p.c3, p.F0);
    c.push_back(make_check("deadline", 1.0 / p.F0, "<", p.c3 / (8.0 * p.c2)));

    p.admissible = true;
    for (const auto &chk : c) {
        if (!chk.pass) {
            p.admissible = false;
            p.violated = chk.name;
            break;
        }
    }
    return p;
}

TheoremPlan plan(const ModelParams &params, const DensityData &density, const PlanPolicy &policy) {
    require_theorem_setting(params);
    const DensityStats stats = density_stats(density, policy.resolution);
    if (!(stats.rho_min > 0.0)) throw PlanningError("rho0_positive: rho0 must be positive");
    if (stats.mass < -1e-12) throw PlanningError("initialmass: integral of rho0 - 1 is negative");

    const double rmax = stats.rho_max;
    const double st = sigma_tilde_for(params, rmax);
    const double widen = 1.0 + policy.margin;
    const double shrink = 1.0 - policy.margin;

    const double data_bound = std::max(std::sqrt(8.0 * rmax), 16.0 * st * rmax) * widen;
    int L = next_even_above(2.0 * data_bound / stats.rho_min);
    while (!(0.5 * L * stats.rho_min > data_bound)) L += 2;
    if (L > policy.max_L)
        throw PlanningError("largedata: needs L = " + std::to_string(L) + " above the cap " +
                            std::to_string(policy.max_L));

    const double H0 = compute_H0(density, params, policy.resolution);
    const double Ld = L;
    auto support_ok = [&](double M) { return H0 + rmax * Ld * Ld * M <= 2.0 * st * M * M * rmax * shrink; };
    const double a = 2.0 * st * rmax * shrink;
    const double b = rmax * Ld * Ld;
    const double root = (b + std::sqrt(b * b + 4.0 * a * H0)) / (2.0 * a);
    const int floor_M = even_ceil(std::max(4.0, density.R));
    if (root > static_cast<double>(policy.max_M))
        throw PlanningError("largesupport: needs M >= " + std::to_string(root) + " above the cap " +
                            std::to_string(policy.max_M));
    int M = std::max(floor_M, even_ceil(root));
    while (M - 2 >= floor_M && support_ok(M - 2)) M -= 2;
    while (!support_ok(M)) M += 2;
    if (M > policy.max_M)
        throw PlanningError("largesupport: needs M = " + std::to_string(M) + " above the cap " +
                            std::to_string(policy.max_M));

    return evaluate_plan(params, density, L, M, policy);
}

double blowup_deadline(double c2, double c3, double F0) {
    const double gap = c3 / (8.0 * c2) - 1.0 / F0;
    if (!(gap > 0.0)) throw PlanningError("deadline undefined: 1/F0 >= c3 / (8 c2)");
    return (std::sqrt((c3 / (4.0 * c2)) / gap) - 1.0) / c2;
}

double blowup_deadline(const TheoremPlan &plan) { return blowup_deadline(plan.c2, plan.c3, plan.F0); }

nlohmann::json to_json(const TheoremPlan &p) {
    nlohmann::json j;
    j["model.gamma"] = p.gamma;
    j["model.tau"] = p.tau;
    j["model.rho_bar"] = p.rho_bar;
    j["data.R"] = p.R;
    j["data.rho_min"] = p.rho_min;
    j["data.rho_max"] = p.rho_max;
    j["data.mass"] = p.mass;
    j["data.profile_variant"] = to_string(p.variant);
    j["sigma"] = p.sigma;
    j["sigma_tilde"] = p.sigma_tilde;
    j["L"] = p.L;
    j["M"] = p.M;
    j["H0"] = p.H0;
    j["norm_sq"] = p.norm_sq;
    j["norm_bound"] = 2.0 * p.L * p.L * p.M;
    j["c1"] = p.c1;
    j["c2"] = p.c2;
    j["c3"] = p.c3;
    j["c4"] = p.c4;
    j["c5"] = p.c5;
    j["F0"] = p.F0;
    j["F0_threshold"] = p.F0_threshold;
    j["F0_critical"] = p.F0_critical;
    j["t_star"] = p.t_star ? nlohmann::json(*p.t_star) : nlohmann::json(nullptr);
    j["admissible"] = p.admissible;
    j["violated"] = p.violated;
    for (const auto &c : p.checks) {
        const std::string k = "check." + c.name + ".";
        j[k + "lhs"] = c.lhs;
        j[k + "relation"] = c.relation;
        j[k + "rhs"] = c.rhs;
        j[k + "margin"] = c.margin;
        j[k + "rel_margin"] = c.rel_margin;
        j[k + "pass"] = c.pass;
    }
    return j;
}

TheoremPlan plan_from_json(const nlohmann::json &j) {
    TheoremPlan p;
    try {
        p.gamma = j.at("model.gamma");
        p.tau = j.at("model.tau");
        p.rho_bar = j.at("model.rho_bar");
        p.R = j.at("data.R");
        p.rho_min = j.at("data.rho_min");
        p.rho_max = j.at("data.rho_max");
        p.mass = j.at("data.mass");
        p.variant = parse_profile_variant(j.at("data.profile_variant"));
        p.sigma = j.at("sigma");
        p.sigma_tilde = j.at("sigma_tilde");
        p.L = j.at("L");
        p.M = j.at("M");
        p.H0 = j.at("H0");
        p.norm_sq = j.at("norm_sq");
        p.c1 = j.at("c1");
        p.c2 = j.at("c2");
        p.c3 = j.at("c3");
        p.c4 = j.at("c4");
        p.c5 = j.at("c5");
        p.F0 = j.at("F0");
        p.F0_threshold = j.at("F0_threshold");
        p.F0_critical = j.at("F0_critical");
        if (!j.at("t_star").is_null()) p.t_star = j.at("t_star").get<double>();
        p.admissible = j.at("admissible");
        p.violated = j.at("violated");
    } catch (const nlohmann::json::exception &e) {
        throw PlanningError(std::string("plan report schema mismatch: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string &key = it.key();
        if (key.rfind("check.", 0) != 0 || key.size() < 10 || key.substr(key.size() - 4) != ".lhs") continue;
        const std::string name = key.substr(6, key.size() - 10);
        const std::string k = "check." + name + ".";
        InequalityCheck c;
        c.name = name;
        c.lhs = j.at(k + "lhs");
        c.relation = j.at(k + "relation");
        c.rhs = j.at(k + "rhs");
        c.margin = j.at(k + "margin");
        c.rel_margin = j.at(k + "rel_margin");
        c.pass = j.at(k + "pass");
        p.checks.push_back(c);
    }
    return p;
}

} // namespace relaxfv
